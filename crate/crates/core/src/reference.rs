//! Benchmark geometries with known normalized conformal maps, exact kernel
//! values at `z0`, exterior maps and singularity catalogs.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use num_rational::Ratio;

use crate::basis::Singularity;
use crate::error::{Error, Result};
use crate::geometry::{build_disk, build_lens, build_sector, JordanBoundary};

const CAUCHY_POINTS: usize = 32;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `x^e` with `arg x` taken in `(lo, lo + 2 pi]`.
fn branch_pow(x: Complex64, e: f64, lo: f64) -> Complex64 {
    if x.norm() == 0.0 {
        return c(0.0, 0.0);
    }
    let mut arg = x.arg();
    while arg <= lo {
        arg += TAU;
    }
    while arg > lo + TAU {
        arg -= TAU;
    }
    Complex64::from_polar(x.norm().powf(e), e * arg)
}

/// A map formula correct up to a multiplicative constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RawMap {
    Identity,
    /// Lens with `a + b = k pi / m`: `r0 (u - A)/(u - B)`, `u = ((z-i)/(z+i))^(m/k)`.
    Lens {
        a: f64,
        k: u32,
        m: u32,
    },
    /// Sector of opening `alpha pi` and radius `radius`, with `z0 = radius/2`.
    Sector {
        alpha: f64,
        radius: f64,
    },
}

impl RawMap {
    fn lens_constants(a: f64, k: u32, m: u32) -> (f64, Complex64, Complex64) {
        let p = m as f64 / k as f64;
        let r0 = (k as f64 / m as f64) * (m as f64 * a / k as f64).sin();
        let minus_one_p = Complex64::from_polar(1.0, PI * p);
        (
            r0,
            minus_one_p,
            minus_one_p * Complex64::from_polar(1.0, -2.0 * a * p),
        )
    }

    fn sector_chain(alpha: f64, radius: f64, z: Complex64) -> (Complex64, Complex64) {
        // the radius-2 formulas rescaled: f(z) = (R/2) g(2z/R)
        let w = z * (2.0 / radius);
        let inv = 1.0 / alpha;
        let cc = 2f64.powf(inv);
        let i = Complex64::i();
        let s = branch_pow(w, inv, -PI);
        let d = ((i + cc) / (i - cc)).powu(2);
        let u = (i * s + cc) / (i * s - cc);
        let t = u * u;
        let scale = 2.0 * alpha * (4f64.powf(inv) - 1.0) / (4f64.powf(inv) + 1.0);
        let value = scale * (t - d) / (t * d - 1.0);
        let dt_du = 2.0 * u;
        let du_ds = -2.0 * i * cc / ((i * s - cc) * (i * s - cc));
        let ds_dw = if w.norm() == 0.0 {
            c(f64::INFINITY, 0.0)
        } else {
            inv * s / w
        };
        let deriv = scale * (d * d - 1.0) / ((t * d - 1.0) * (t * d - 1.0)) * dt_du * du_ds * ds_dw;
        (value * (radius / 2.0), deriv)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match *self {
            RawMap::Identity => z,
            RawMap::Lens { a, k, m } => {
                let (r0, num, den) = Self::lens_constants(a, k, m);
                let u = branch_pow(
                    (z - Complex64::i()) / (z + Complex64::i()),
                    m as f64 / k as f64,
                    0.0,
                );
                r0 * (u - num) / (u - den)
            }
            RawMap::Sector { alpha, radius } => Self::sector_chain(alpha, radius, z).0,
        }
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        match *self {
            RawMap::Identity => c(1.0, 0.0),
            RawMap::Lens { a, k, m } => {
                let (r0, num, den) = Self::lens_constants(a, k, m);
                let p = m as f64 / k as f64;
                let i = Complex64::i();
                let zeta = (z - i) / (z + i);
                let u = branch_pow(zeta, p, 0.0);
                let du = p * u / zeta * (2.0 * i / ((z + i) * (z + i)));
                r0 * (num - den) / ((u - den) * (u - den)) * du
            }
            RawMap::Sector { alpha, radius } => Self::sector_chain(alpha, radius, z).1,
        }
    }
}

/// `g / g'(z0)`, where `g'(z0)` comes from Cauchy's integral on a small circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedMap {
    raw: RawMap,
    z0: Complex64,
    /// `1 / g'(z0)`.
    constant: Complex64,
}

impl NormalizedMap {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.constant * self.raw.eval(z)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.constant * self.raw.derivative(z)
    }

    /// The constant the raw formula was multiplied by.
    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    pub fn z0(&self) -> Complex64 {
        self.z0
    }
}

/// Normalizes `raw` so that `f(z0) = 0`, `f'(z0) = 1`. `radius` is the
/// differentiation circle radius and must keep the circle inside the domain.
pub fn normalize_map(raw: RawMap, z0: Complex64, radius: f64) -> Result<NormalizedMap> {
    let g0 = raw.eval(z0);
    let mut sum = c(0.0, 0.0);
    for k in 0..CAUCHY_POINTS {
        let e = Complex64::from_polar(1.0, TAU * k as f64 / CAUCHY_POINTS as f64);
        sum += (raw.eval(z0 + radius * e) - g0) / e;
    }
    let derivative = sum / (CAUCHY_POINTS as f64 * radius);
    let scale = raw.eval(z0 + radius).norm().max(1e-300) / radius;
    if derivative.norm() < 1e-13 * scale.max(1.0) {
        return Err(Error::Normalization(format!(
            "derivative {derivative} at z0 = {z0} is too small"
        )));
    }
    if g0.norm() > 1e-12 * scale.max(1.0) {
        return Err(Error::Normalization(format!(
            "raw map does not vanish at z0 (value {g0})"
        )));
    }
    Ok(NormalizedMap {
        raw,
        z0,
        constant: 1.0 / derivative,
    })
}

/// Composition chain for `|Phi|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExteriorMap {
    Disk { radius: f64 },
    Lens { a: f64, k: u32, m: u32 },
    Sector { alpha: f64, radius: f64 },
}

impl ExteriorMap {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match *self {
            ExteriorMap::Disk { radius } => z / radius,
            ExteriorMap::Lens { a, k, m } => {
                let (k, m) = (k as f64, m as f64);
                let i = Complex64::i();
                let xi = Complex64::from_polar(1.0, (m - k) * PI / m + a) * (z - i) / (z + i);
                let t = branch_pow(xi, m / (2.0 * m - k), -k * PI / m);
                let lambda = Complex64::from_polar(1.0, ((m - k) * PI + m * a) / (2.0 * m - k));
                (1.0 - lambda * t) / (t - lambda)
            }
            ExteriorMap::Sector { alpha, radius } => {
                let w = z * (2.0 / radius);
                let i = Complex64::i();
                let s = branch_pow(w, 1.0 / alpha, -PI);
                let cc = 2f64.powf(1.0 - 1.0 / alpha);
                let xi = i * (cc * s - 2.0 * i) / (cc * s + 2.0 * i);
                let t = branch_pow(xi, 2.0 / 3.0, -PI / 2.0);
                let e = Complex64::from_polar(1.0, PI / 3.0);
                (1.0 - e * t) / (t - e)
            }
        }
    }
}

/// One catalog entry: the singularity with its level computed from the
/// exterior map, and the level quoted for it in the literature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatalogEntry {
    pub singularity: Singularity,
    pub quoted_level: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ReferenceCase {
    pub name: String,
    pub boundary: JordanBoundary,
    pub z0: Complex64,
    pub map: NormalizedMap,
    pub r0: f64,
    /// `K(z0, z0) = 1 / (pi r0^2)`.
    pub kernel_z0: f64,
    pub exterior: ExteriorMap,
    /// Sorted by nondecreasing level.
    pub catalog: Vec<CatalogEntry>,
}

impl ReferenceCase {
    pub fn singularities(&self) -> Vec<Singularity> {
        self.catalog.iter().map(|e| e.singularity).collect()
    }

    /// `|Phi(z)|` for `z` outside the domain.
    pub fn exterior_level(&self, z: Complex64) -> Result<f64> {
        exterior_level(self, z)
    }
}

pub const CASE_NAMES: [&str; 9] = [
    "lens-i",
    "lens-ii",
    "lens-iii",
    "halfdisk",
    "sector-3/2",
    "sector-2/5",
    "sector-3/4",
    "sector-4/5",
    "disk",
];

pub fn exterior_level(case: &ReferenceCase, z: Complex64) -> Result<f64> {
    if case.boundary.contains(z) {
        return Err(Error::InsideDomain(z));
    }
    Ok(case.exterior.eval(z).norm())
}

fn parse_fraction(s: &str) -> Option<Ratio<i64>> {
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse().ok()?, q.trim().parse().ok()?),
        None => (s.trim().parse().ok()?, 1),
    };
    if q == 0 {
        return None;
    }
    Some(Ratio::new(p, q))
}

fn finish(
    name: &str,
    boundary: JordanBoundary,
    raw: RawMap,
    r0: f64,
    exterior: ExteriorMap,
    poles: Vec<(Complex64, Option<f64>)>,
) -> Result<ReferenceCase> {
    let z0 = boundary.z0();
    let map = normalize_map(raw, z0, 0.25 * boundary.distance_to(z0))?;
    let mut catalog = Vec::with_capacity(poles.len());
    for (location, quoted_level) in poles {
        if boundary.contains_closure(location) {
            continue;
        }
        let level = exterior.eval(location).norm();
        catalog.push(CatalogEntry {
            singularity: Singularity {
                location,
                k: 1,
                m: 1,
                level,
            },
            quoted_level,
        });
    }
    catalog.sort_by(|a, b| {
        a.singularity
            .level
            .total_cmp(&b.singularity.level)
            .then(
                a.singularity
                    .location
                    .re
                    .total_cmp(&b.singularity.location.re),
            )
            .then(
                a.singularity
                    .location
                    .im
                    .total_cmp(&b.singularity.location.im),
            )
    });
    Ok(ReferenceCase {
        name: name.to_string(),
        boundary,
        z0,
        map,
        r0,
        kernel_z0: 1.0 / (PI * r0 * r0),
        exterior,
        catalog,
    })
}

/// Lens with `a = b`-style parameters `a`, `b` and `a + b = k pi / m`.
fn lens_case(name: &str, a: f64, k: u32, m: u32, quoted: &[(f64, f64)]) -> Result<ReferenceCase> {
    let b = k as f64 * PI / m as f64 - a;
    let boundary = build_lens(a, b)?;
    let p = m as f64 / k as f64;
    let r0 = (k as f64 / m as f64) * (p * a).sin();
    // poles: u = (-1)^p e^{-2iap} on the branch arg zeta in (0, 2 pi)
    let mut poles = Vec::new();
    let mut j = -((2.0 * p).ceil() as i64) - 2;
    while (j as f64) < 2.0 * p + 2.0 {
        let theta = PI - 2.0 * a + TAU * j as f64 / p;
        j += 1;
        if theta <= 1e-12 || theta >= TAU - 1e-12 {
            continue;
        }
        let z = -1.0 / (0.5 * theta).tan();
        let location = c(z, 0.0);
        let quoted_level = quoted
            .iter()
            .find(|(x, _)| (x - z).abs() < 1e-9 * (1.0 + z.abs()))
            .map(|&(_, l)| l);
        poles.push((location, quoted_level));
    }
    finish(
        name,
        boundary,
        RawMap::Lens { a, k, m },
        r0,
        ExteriorMap::Lens { a, k, m },
        poles,
    )
}

fn sector_case(
    name: &str,
    alpha: Ratio<i64>,
    quoted: &[(Complex64, f64)],
) -> Result<ReferenceCase> {
    let a = *alpha.numer() as f64 / *alpha.denom() as f64;
    if !(a > 0.0 && a < 2.0) {
        return Err(Error::UnknownCase(name.to_string()));
    }
    let radius = 2.0;
    let boundary = build_sector(a, radius)?;
    let inv = 1.0 / a;
    let r0 = 2.0 * a * (4f64.powf(inv) - 1.0) / (4f64.powf(inv) + 1.0);
    let mut candidates = vec![c(4.0, 0.0)];
    if a == 1.0 {
        candidates.push(c(-1.0, 0.0));
    } else if a < 1.0 {
        candidates.push(Complex64::from_polar(1.0, PI * a));
        candidates.push(Complex64::from_polar(1.0, -PI * a));
    }
    let poles = candidates
        .into_iter()
        .map(|z| {
            let q = quoted
                .iter()
                .find(|(x, _)| (x - z).norm() < 1e-9)
                .map(|&(_, l)| l);
            (z, q)
        })
        .collect();
    finish(
        name,
        boundary,
        RawMap::Sector { alpha: a, radius },
        r0,
        ExteriorMap::Sector { alpha: a, radius },
        poles,
    )
}

/// Looks up a benchmark case by name. Besides [`CASE_NAMES`], any
/// `sector-p/q` with `0 < p/q < 2` is accepted.
pub fn reference_case(name: &str) -> Result<ReferenceCase> {
    let s3 = 3f64.sqrt();
    match name {
        "disk" => {
            let boundary = build_disk(1.0)?;
            finish(
                name,
                boundary,
                RawMap::Identity,
                1.0,
                ExteriorMap::Disk { radius: 1.0 },
                vec![],
            )
        }
        "lens-i" => lens_case(name, PI / 6.0, 1, 2, &[(-s3 / 3.0, 1.347), (s3, 2.532)]),
        "lens-ii" => lens_case(name, PI / 4.0, 1, 2, &[(-1.0, s3), (1.0, s3)]),
        "lens-iii" => {
            let t = (PI / 13.0).tan();
            lens_case(name, PI / 13.0, 2, 13, &[(t, 1.119), (-t, 1.119)])
        }
        "halfdisk" => sector_case(
            name,
            Ratio::from_integer(1),
            &[(c(-1.0, 0.0), 1.452), (c(4.0, 0.0), 2.212)],
        ),
        "sector-3/2" => sector_case(name, Ratio::new(3, 2), &[(c(4.0, 0.0), 2.04)]),
        "sector-2/5" => {
            let z = Complex64::from_polar(1.0, 2.0 * PI / 5.0);
            sector_case(name, Ratio::new(2, 5), &[(z, 1.145), (z.conj(), 1.145)])
        }
        "sector-3/4" => {
            let z = Complex64::from_polar(1.0, 3.0 * PI / 4.0);
            sector_case(name, Ratio::new(3, 4), &[(z, 1.349), (z.conj(), 1.349)])
        }
        "sector-4/5" => {
            let z = Complex64::from_polar(1.0, 4.0 * PI / 5.0);
            sector_case(name, Ratio::new(4, 5), &[(z, 1.372), (z.conj(), 1.372)])
        }
        other => match other.strip_prefix("sector-").and_then(parse_fraction) {
            Some(alpha) => sector_case(other, alpha, &[]),
            None => Err(Error::UnknownCase(other.to_string())),
        },
    }
}
