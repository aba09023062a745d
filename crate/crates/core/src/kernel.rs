//! Kernel approximations and Bieberbach-type approximations to the
//! normalized conformal map, from the first `count` orthonormal members.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::orthonormal::OrthonormalSystem;

fn check_count(system: &OrthonormalSystem, count: usize) -> Result<()> {
    if count == 0 || count > system.len() {
        return Err(Error::Config(format!(
            "member count {count} outside 1..={}",
            system.len()
        )));
    }
    Ok(())
}

/// `K_n(z, z0) = sum_j conj(P_j(z0)) P_j(z)`.
pub fn kernel_eval(system: &OrthonormalSystem, count: usize, z: Complex64) -> Result<Complex64> {
    check_count(system, count)?;
    let values = system.evaluate_all(z, count)?;
    Ok(values
        .iter()
        .zip(system.values_at_z0())
        .map(|(p, d)| d.conj() * p)
        .sum())
}

/// `K_n(z0, z0) = sum_j |P_j(z0)|^2`.
pub fn kernel_at_z0(system: &OrthonormalSystem, count: usize) -> Result<f64> {
    check_count(system, count)?;
    Ok(system.values_at_z0()[..count]
        .iter()
        .map(|v| v.norm_sqr())
        .sum())
}

/// The approximation `pi_n(z) = (1/K_n(z0,z0)) \int_{z0}^{z} K_n(t, z0) dt`.
#[derive(Debug, Clone)]
pub struct BieberbachApprox<'a> {
    system: &'a OrthonormalSystem,
    coefficients: Vec<Complex64>,
}

impl<'a> BieberbachApprox<'a> {
    pub fn new(system: &'a OrthonormalSystem, count: usize) -> Result<Self> {
        let k = kernel_at_z0(system, count)?;
        if !(k > 0.0) {
            return Err(Error::Config("kernel vanishes at z0".into()));
        }
        let coefficients = system.values_at_z0()[..count]
            .iter()
            .map(|d| d.conj() / k)
            .collect();
        Ok(Self {
            system,
            coefficients,
        })
    }

    pub fn count(&self) -> usize {
        self.coefficients.len()
    }

    /// `c_j = conj(P_j(z0)) / K_n(z0, z0)`.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let anti = self.system.antiderivatives_all(z, self.count())?;
        Ok(anti
            .iter()
            .zip(&self.coefficients)
            .map(|(m, c)| c * m)
            .sum())
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let values = self.system.evaluate_all(z, self.count())?;
        Ok(values
            .iter()
            .zip(&self.coefficients)
            .map(|(m, c)| c * m)
            .sum())
    }
}

pub fn bieberbach_eval(
    system: &OrthonormalSystem,
    count: usize,
    z: Complex64,
) -> Result<Complex64> {
    BieberbachApprox::new(system, count)?.eval(z)
}

/// `r0 = 1 / sqrt(pi K_n(z0, z0))`.
pub fn conformal_radius(system: &OrthonormalSystem, count: usize) -> Result<f64> {
    Ok(1.0 / (PI * kernel_at_z0(system, count)?).sqrt())
}
