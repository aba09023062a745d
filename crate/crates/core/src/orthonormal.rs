//! Orthonormalization of the augmented system with the Arnoldi variant of
//! Gram–Schmidt, working entirely on boundary-node samples.
//!
//! The polynomial stage produces orthonormal polynomials `Q_0, Q_1, ...` from
//! the candidates `z Q_k`, recording the Hessenberg recurrence. The members
//! `P_j` are then the Gram–Schmidt orthonormalization of a generator sequence
//! made of the `Q_k` and the raw singular functions, in the order fixed by
//! [`SingularPlacement`]. With singular functions placed after the polynomials
//! the polynomial members coincide with the `Q_k`.

use num_complex::Complex64;

use crate::basis::BasisFunction;
use crate::error::{Error, Result};
use crate::quadrature::{BoundarySamples, GaussLegendre, NodeSet};

const BREAKDOWN_RATIO: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SingularPlacement {
    /// Singular functions first, so that every prefix of the system holds all
    /// of them. Used for sweeps over the monomial count.
    BeforePolynomials,
    #[default]
    AfterPolynomials,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// Orthonormal polynomial `Q_k` of degree `k`.
    Polynomial(usize),
    /// Raw singular function, by index into [`OrthonormalSystem::singular`].
    Singular(usize),
}

#[derive(Debug, Clone)]
pub struct OrthonormalSystem {
    z0: Complex64,
    placement: SingularPlacement,
    singular: Vec<BasisFunction>,
    /// `Q_0 = q0` (constant).
    q0: f64,
    /// Column `k` holds `h_{0..=k+1, k}` with `z Q_k = sum_j h_{j,k} Q_j`.
    hessenberg: Vec<Vec<Complex64>>,
    generators: Vec<Generator>,
    /// `P_j = (g_j - sum_{i<j} c_{j,i} P_i) / b_j`.
    projections: Vec<Vec<Complex64>>,
    norms: Vec<f64>,
    samples: Vec<BoundarySamples>,
    at_z0: Vec<Complex64>,
    path_rule: GaussLegendre,
}

/// Builds the orthonormal system with singular functions after the polynomials.
pub fn orthonormalize(
    basis: &[BasisFunction],
    nodes: &NodeSet,
    z0: Complex64,
) -> Result<OrthonormalSystem> {
    orthonormalize_with(basis, nodes, z0, SingularPlacement::AfterPolynomials)
}

pub fn orthonormalize_with(
    basis: &[BasisFunction],
    nodes: &NodeSet,
    z0: Complex64,
    placement: SingularPlacement,
) -> Result<OrthonormalSystem> {
    let n_poly = basis.iter().filter(|f| f.is_monomial()).count();
    if n_poly == 0 {
        return Err(Error::Basis(
            "the basis must contain at least one monomial".into(),
        ));
    }
    let singular: Vec<BasisFunction> = basis.iter().filter(|f| !f.is_monomial()).copied().collect();
    let len = nodes.len();
    let zero = Complex64::new(0.0, 0.0);

    // polynomial stage
    let area = nodes
        .green(
            &vec![Complex64::new(1.0, 0.0); len],
            &shifted(nodes.points(), z0),
        )
        .re;
    if !(area > 0.0) {
        return Err(Error::Breakdown {
            index: 0,
            ratio: 0.0,
        });
    }
    let q0 = 1.0 / area.sqrt();
    let mut system = OrthonormalSystem {
        z0,
        placement,
        singular,
        q0,
        hessenberg: Vec::with_capacity(n_poly),
        generators: Vec::new(),
        projections: Vec::new(),
        norms: Vec::new(),
        samples: Vec::new(),
        at_z0: Vec::new(),
        path_rule: GaussLegendre::new(n_poly / 2 + 2),
    };
    let mut q: Vec<BoundarySamples> = Vec::with_capacity(n_poly);
    let mut first = BoundarySamples::new(
        vec![Complex64::new(1.0, 0.0); len],
        shifted(nodes.points(), z0),
    );
    first.scale(q0);
    q.push(first);
    for k in 0..n_poly - 1 {
        let values: Vec<Complex64> = nodes
            .points()
            .iter()
            .zip(&q[k].values)
            .map(|(z, v)| z * v)
            .collect();
        let mut v = BoundarySamples::from_values(nodes, values);
        let before = nodes.green(&v.values, &v.antiderivative).re.max(0.0).sqrt();
        let mut column = vec![zero; k + 2];
        for _pass in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let h = nodes.green(&v.values, &qi.antiderivative);
                v.axpy(-h, qi);
                column[i] += h;
            }
        }
        let after_sq = nodes.green(&v.values, &v.antiderivative).re;
        let after = after_sq.max(0.0).sqrt();
        if !(after > BREAKDOWN_RATIO * before) {
            return Err(Error::Breakdown {
                index: k + 1,
                ratio: if before > 0.0 { after / before } else { 0.0 },
            });
        }
        column[k + 1] = Complex64::new(after, 0.0);
        v.scale(1.0 / after);
        system.hessenberg.push(column);
        q.push(v);
    }
    // pin the polynomial antiderivatives to vanish at z0
    let anchor = nodes.points()[0];
    let pinned = system.polynomial_antiderivatives(anchor, n_poly);
    for (qk, exact) in q.iter_mut().zip(pinned) {
        let shift = exact - qk.antiderivative[0];
        qk.shift_antiderivative(shift);
    }

    // member stage
    let poly_gens = (0..n_poly).map(Generator::Polynomial);
    let sing_gens = (0..system.singular.len()).map(Generator::Singular);
    system.generators = match placement {
        SingularPlacement::AfterPolynomials => poly_gens.chain(sing_gens).collect(),
        SingularPlacement::BeforePolynomials => sing_gens.chain(poly_gens).collect(),
    };
    let mut q_slots: Vec<Option<BoundarySamples>> = q.into_iter().map(Some).collect();
    for (j, generator) in system.generators.clone().into_iter().enumerate() {
        let mut v = match generator {
            Generator::Polynomial(k) => q_slots[k].take().expect("each polynomial is used once"),
            Generator::Singular(s) => {
                let f = &system.singular[s];
                let mut values = Vec::with_capacity(len);
                let mut anti = Vec::with_capacity(len);
                for &z in nodes.points() {
                    values.push(f.eta(z)?);
                    anti.push(f.mu(z)?);
                }
                BoundarySamples::new(values, anti)
            }
        };
        let before = nodes.green(&v.values, &v.antiderivative).re.max(0.0).sqrt();
        let mut coeffs = vec![zero; j];
        for _pass in 0..2 {
            for (i, p) in system.samples.iter().enumerate() {
                let c = nodes.green(&v.values, &p.antiderivative);
                v.axpy(-c, p);
                coeffs[i] += c;
            }
        }
        let after = nodes.green(&v.values, &v.antiderivative).re.max(0.0).sqrt();
        if !(after > BREAKDOWN_RATIO * before) {
            return Err(Error::Breakdown {
                index: j,
                ratio: if before > 0.0 { after / before } else { 0.0 },
            });
        }
        v.scale(1.0 / after);
        system.projections.push(coeffs);
        system.norms.push(after);
        system.samples.push(v);
    }
    system.at_z0 = system.evaluate_all(z0, system.len())?;
    Ok(system)
}

fn shifted(points: &[Complex64], z0: Complex64) -> Vec<Complex64> {
    points.iter().map(|z| z - z0).collect()
}

impl OrthonormalSystem {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn z0(&self) -> Complex64 {
        self.z0
    }

    pub fn placement(&self) -> SingularPlacement {
        self.placement
    }

    pub fn singular(&self) -> &[BasisFunction] {
        &self.singular
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn polynomial_count(&self) -> usize {
        self.hessenberg.len() + 1
    }

    /// Hessenberg column `k`: `h_{0..=k+1, k}`.
    pub fn hessenberg_column(&self, k: usize) -> &[Complex64] {
        &self.hessenberg[k]
    }

    /// Projection coefficients `c_{j,i}`, `i < j`, of member `j`.
    pub fn projection(&self, j: usize) -> &[Complex64] {
        &self.projections[j]
    }

    /// Normalization constant `b_j > 0` of member `j`.
    pub fn norm(&self, j: usize) -> f64 {
        self.norms[j]
    }

    pub fn samples(&self) -> &[BoundarySamples] {
        &self.samples
    }

    /// `P_j(z0)` for every member.
    pub fn values_at_z0(&self) -> &[Complex64] {
        &self.at_z0
    }

    /// Index of the member generated by `Q_degree`.
    pub fn polynomial_member(&self, degree: usize) -> Option<usize> {
        self.generators
            .iter()
            .position(|g| *g == Generator::Polynomial(degree))
    }

    /// Number of leading members needed to include `monomials` polynomials and
    /// every singular function. Requires [`SingularPlacement::BeforePolynomials`]
    /// unless `monomials` is the full polynomial count.
    pub fn prefix_for(&self, monomials: usize) -> Option<usize> {
        if monomials == 0 || monomials > self.polynomial_count() {
            return None;
        }
        match self.placement {
            SingularPlacement::BeforePolynomials => Some(self.singular.len() + monomials),
            SingularPlacement::AfterPolynomials => {
                if self.singular.is_empty() || monomials == self.polynomial_count() {
                    Some(if self.singular.is_empty() {
                        monomials
                    } else {
                        self.len()
                    })
                } else {
                    None
                }
            }
        }
    }

    fn polynomial_values(&self, z: Complex64, count: usize, out: &mut Vec<Complex64>) {
        out.clear();
        if count == 0 {
            return;
        }
        out.push(Complex64::new(self.q0, 0.0));
        for k in 0..count - 1 {
            let column = &self.hessenberg[k];
            let mut v = z * out[k];
            for (i, h) in column[..=k].iter().enumerate() {
                v -= h * out[i];
            }
            out.push(v / column[k + 1].re);
        }
    }

    /// `\int_{z0}^{z} Q_k` for `k < count`, exact for polynomials.
    fn polynomial_antiderivatives(&self, z: Complex64, count: usize) -> Vec<Complex64> {
        let mut acc = vec![Complex64::new(0.0, 0.0); count];
        let mut values = Vec::with_capacity(count);
        let half = 0.5 * (z - self.z0);
        let mid = 0.5 * (z + self.z0);
        for (x, w) in self.path_rule.nodes.iter().zip(&self.path_rule.weights) {
            self.polynomial_values(mid + half * *x, count, &mut values);
            for (a, v) in acc.iter_mut().zip(&values) {
                *a += v * (half * *w);
            }
        }
        acc
    }

    fn combine(
        &self,
        generator_values: impl Fn(Generator) -> Result<Complex64>,
        count: usize,
    ) -> Result<Vec<Complex64>> {
        let mut out: Vec<Complex64> = Vec::with_capacity(count);
        for j in 0..count {
            let mut v = generator_values(self.generators[j])?;
            for (c, p) in self.projections[j].iter().zip(&out) {
                v -= c * p;
            }
            out.push(v / self.norms[j]);
        }
        Ok(out)
    }

    fn needed_polynomials(&self, count: usize) -> usize {
        self.generators[..count]
            .iter()
            .filter_map(|g| match g {
                Generator::Polynomial(k) => Some(k + 1),
                Generator::Singular(_) => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// `P_0(z), ..., P_{count-1}(z)`.
    pub fn evaluate_all(&self, z: Complex64, count: usize) -> Result<Vec<Complex64>> {
        let count = count.min(self.len());
        let mut q = Vec::new();
        self.polynomial_values(z, self.needed_polynomials(count), &mut q);
        self.combine(
            |g| match g {
                Generator::Polynomial(k) => Ok(q[k]),
                Generator::Singular(s) => self.singular[s].eta(z),
            },
            count,
        )
    }

    /// `\int_{z0}^{z} P_j` for `j < count`.
    pub fn antiderivatives_all(&self, z: Complex64, count: usize) -> Result<Vec<Complex64>> {
        let count = count.min(self.len());
        let q = self.polynomial_antiderivatives(z, self.needed_polynomials(count));
        self.combine(
            |g| match g {
                Generator::Polynomial(k) => Ok(q[k]),
                Generator::Singular(s) => self.singular[s].mu(z),
            },
            count,
        )
    }
}

/// `P_j(z)`.
pub fn evaluate_member(system: &OrthonormalSystem, j: usize, z: Complex64) -> Result<Complex64> {
    Ok(system.evaluate_all(z, j + 1)?[j])
}

/// `\int_{z0}^{z} P_j`.
pub fn evaluate_member_antiderivative(
    system: &OrthonormalSystem,
    j: usize,
    z: Complex64,
) -> Result<Complex64> {
    Ok(system.antiderivatives_all(z, j + 1)?[j])
}

/// `max |<P_i, P_j> - delta_ij|` recomputed from the node samples.
pub fn gram_residual(system: &OrthonormalSystem, nodes: &NodeSet) -> f64 {
    let s = system.samples();
    let mut worst = 0.0f64;
    for (i, a) in s.iter().enumerate() {
        for (j, b) in s.iter().enumerate() {
            let g = nodes.green(&a.values, &b.antiderivative);
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    worst
}
