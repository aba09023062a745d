//! The augmented basis: derivatives of pole functions, corner (Lehman)
//! singular functions and monomials, each paired with its closed-form
//! antiderivative pinned to vanish at `z0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geometry::{CornerKind, JordanBoundary};

const INTEGER_TOL: f64 = 1e-12;

/// A pole or rational-pole singularity `(z - location)^(-k/m)` outside the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleSpec {
    pub location: Complex64,
    pub k: u32,
    pub m: u32,
    /// Direction (angle) of the branch-cut ray from `location`, used when `m > 1`.
    /// Defaults to `arg(location - z0)`.
    pub cut_angle: Option<f64>,
}

impl PoleSpec {
    pub fn simple(location: Complex64) -> Self {
        Self {
            location,
            k: 1,
            m: 1,
            cut_angle: None,
        }
    }
}

/// Request for `count` singular functions at corner `corner` (index into
/// [`JordanBoundary::corners`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CornerSpec {
    pub corner: usize,
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BasisSpec {
    pub poles: Vec<PoleSpec>,
    pub corners: Vec<CornerSpec>,
    pub monomials: usize,
}

impl BasisSpec {
    pub fn monomials(n: usize) -> Self {
        Self {
            monomials: n,
            ..Self::default()
        }
    }

    pub fn singular_count(&self) -> usize {
        self.poles.len() + self.corners.iter().map(|c| c.count).sum::<usize>()
    }

    pub fn size(&self) -> usize {
        self.singular_count() + self.monomials
    }
}

/// Which arrangement of the Lehman powers `p + q/alpha` applies at a corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LehmanKind {
    /// Two straight segments: the powers are `j/alpha`.
    StraightStraight,
    /// Irrational angle or a circular arc involved: all `p + q/alpha`, `p >= 0`, `q >= 1`.
    General,
}

impl From<CornerKind> for LehmanKind {
    fn from(kind: CornerKind) -> Self {
        match kind {
            CornerKind::StraightStraight => LehmanKind::StraightStraight,
            CornerKind::InvolvingCircular => LehmanKind::General,
        }
    }
}

/// First `count` exponents of the increasing arrangement of Lehman powers.
pub fn lehman_exponents(kind: LehmanKind, alpha: f64, count: usize) -> Vec<f64> {
    assert!(
        alpha > 0.0 && alpha < 2.0,
        "corner angle fraction must lie in (0, 2)"
    );
    let inv = 1.0 / alpha;
    match kind {
        LehmanKind::StraightStraight => (1..=count).map(|j| j as f64 * inv).collect(),
        LehmanKind::General => {
            if count == 0 {
                return Vec::new();
            }
            // the count-th value cannot exceed either count/alpha or 1/alpha + count - 1
            let bound = (count as f64 * inv).min(inv + count as f64 - 1.0) + 1e-9;
            let mut values = Vec::new();
            let mut q = 1usize;
            while q as f64 * inv <= bound {
                let mut p = 0usize;
                while p as f64 + q as f64 * inv <= bound {
                    values.push(p as f64 + q as f64 * inv);
                    p += 1;
                }
                q += 1;
            }
            values.sort_by(f64::total_cmp);
            values.dedup_by(|a, b| (*a - *b).abs() <= INTEGER_TOL * b.abs().max(1.0));
            values.truncate(count);
            values
        }
    }
}

/// Exact-rational counterpart of [`lehman_exponents`].
pub fn lehman_exponents_exact(
    kind: LehmanKind,
    alpha: Ratio<i64>,
    count: usize,
) -> Vec<Ratio<i64>> {
    let inv = alpha.recip();
    match kind {
        LehmanKind::StraightStraight => (1..=count as i64).map(|j| inv * j).collect(),
        LehmanKind::General => {
            if count == 0 {
                return Vec::new();
            }
            let n = count as i64;
            let bound = (inv * n).min(inv + Ratio::from_integer(n - 1));
            let mut values = Vec::new();
            let mut q = 1i64;
            while inv * q <= bound {
                let mut p = 0i64;
                while Ratio::from_integer(p) + inv * q <= bound {
                    values.push(Ratio::from_integer(p) + inv * q);
                    p += 1;
                }
                q += 1;
            }
            values.sort();
            values.dedup();
            values.truncate(count);
            values
        }
    }
}

fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() <= INTEGER_TOL * x.abs().max(1.0)
}

/// First `count` non-integer exponents of a corner's stream, and the stream
/// index (1-based) of the last one taken.
fn non_integer_exponents(kind: LehmanKind, alpha: f64, count: usize) -> Option<(Vec<f64>, usize)> {
    if count == 0 {
        return Some((Vec::new(), 0));
    }
    let mut len = 2 * count + 4;
    while len <= 1 << 16 {
        let stream = lehman_exponents(kind, alpha, len);
        let mut taken = Vec::with_capacity(count);
        for (index, &g) in stream.iter().enumerate() {
            if !is_integer(g) {
                taken.push(g);
                if taken.len() == count {
                    return Some((taken, index + 1));
                }
            }
        }
        len *= 2;
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisKind {
    /// `(z^degree)'`
    Monomial { degree: u32 },
    /// `[(z - location)^(-k/m)]'`, cut along the ray from `location` in direction `cut`.
    Pole {
        location: Complex64,
        k: u32,
        m: u32,
        cut: Complex64,
    },
    /// `[(z - vertex)^gamma]'`, cut along the exterior bisector `cut`.
    Corner {
        vertex: Complex64,
        gamma: f64,
        corner: usize,
        cut: Complex64,
    },
}

/// One member of the augmented system with its antiderivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisFunction {
    kind: BasisKind,
    z0: Complex64,
    /// Unpinned antiderivative evaluated at `z0`.
    offset: Complex64,
}

/// `w^exponent` with the branch cut along the ray `t * cut`, `t > 0`.
fn cut_pow(w: Complex64, exponent: f64, cut: Complex64) -> Result<Complex64> {
    if w.norm() == 0.0 {
        if exponent > 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(Error::Domain {
            z: w,
            reason: "singular vertex",
        });
    }
    let rel = w / (-cut);
    if rel.im == 0.0 && rel.re < 0.0 {
        return Err(Error::Domain {
            z: w,
            reason: "point on branch cut",
        });
    }
    let arg = rel.arg() + (-cut).arg();
    Ok(Complex64::from_polar(
        w.norm().powf(exponent),
        exponent * arg,
    ))
}

impl BasisFunction {
    pub fn new(kind: BasisKind, z0: Complex64) -> Result<Self> {
        let mut f = Self {
            kind,
            z0,
            offset: Complex64::new(0.0, 0.0),
        };
        f.offset = f.raw_antiderivative(z0)?;
        Ok(f)
    }

    pub fn kind(&self) -> &BasisKind {
        &self.kind
    }

    pub fn z0(&self) -> Complex64 {
        self.z0
    }

    pub fn is_monomial(&self) -> bool {
        matches!(self.kind, BasisKind::Monomial { .. })
    }

    /// `eta(z)`.
    pub fn eta(&self, z: Complex64) -> Result<Complex64> {
        match self.kind {
            BasisKind::Monomial { degree } => {
                if degree == 0 {
                    Ok(Complex64::new(0.0, 0.0))
                } else {
                    Ok(z.powu(degree - 1) * degree as f64)
                }
            }
            BasisKind::Pole {
                location,
                k,
                m,
                cut,
            } => {
                let w = z - location;
                if w.norm() == 0.0 {
                    return Err(Error::Domain { z, reason: "pole" });
                }
                let e = k as f64 / m as f64;
                if m == 1 {
                    Ok(-e * w.powi(-(k as i32) - 1))
                } else {
                    Ok(-e
                        * cut_pow(w, -e - 1.0, cut).map_err(|_| Error::Domain {
                            z,
                            reason: "point on branch cut",
                        })?)
                }
            }
            BasisKind::Corner {
                vertex, gamma, cut, ..
            } => Ok(gamma
                * cut_pow(z - vertex, gamma - 1.0, cut).map_err(|e| match e {
                    Error::Domain { reason, .. } => Error::Domain { z, reason },
                    other => other,
                })?),
        }
    }

    fn raw_antiderivative(&self, z: Complex64) -> Result<Complex64> {
        match self.kind {
            BasisKind::Monomial { degree } => Ok(z.powu(degree)),
            BasisKind::Pole {
                location,
                k,
                m,
                cut,
            } => {
                let w = z - location;
                if w.norm() == 0.0 {
                    return Err(Error::Domain { z, reason: "pole" });
                }
                if m == 1 {
                    Ok(w.powi(-(k as i32)))
                } else {
                    cut_pow(w, -(k as f64) / m as f64, cut).map_err(|_| Error::Domain {
                        z,
                        reason: "point on branch cut",
                    })
                }
            }
            BasisKind::Corner {
                vertex, gamma, cut, ..
            } => cut_pow(z - vertex, gamma, cut).map_err(|e| match e {
                Error::Domain { reason, .. } => Error::Domain { z, reason },
                other => other,
            }),
        }
    }

    /// `mu(z) = \int_{z0}^{z} eta`, which vanishes at `z0`.
    pub fn mu(&self, z: Complex64) -> Result<Complex64> {
        if z == self.z0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self.raw_antiderivative(z)? - self.offset)
    }

    pub fn label(&self) -> String {
        match self.kind {
            BasisKind::Monomial { degree } => format!("(z^{degree})'"),
            BasisKind::Pole { location, k, m, .. } => {
                format!("[(z - ({location}))^(-{k}/{m})]'")
            }
            BasisKind::Corner { vertex, gamma, .. } => format!("[(z - ({vertex}))^{gamma:.6}]'"),
        }
    }
}

/// `eta_j(z)`.
pub fn eval_eta(f: &BasisFunction, z: Complex64) -> Result<Complex64> {
    f.eta(z)
}

/// `mu_j(z) = \int_{z0}^z eta_j` for the normalization point `z0`.
pub fn eval_mu(f: &BasisFunction, z: Complex64, z0: Complex64) -> Result<Complex64> {
    if z0 == f.z0 {
        f.mu(z)
    } else {
        Ok(f.raw_antiderivative(z)? - f.raw_antiderivative(z0)?)
    }
}

fn ray_hits_closure(
    boundary: &JordanBoundary,
    origin: Complex64,
    dir: Complex64,
    skip_origin: bool,
) -> bool {
    let reach = 4.0 * (boundary.diameter() + (origin - boundary.z0()).norm());
    let samples = 400;
    (0..=samples).any(|k| {
        let s = reach * (k as f64 / samples as f64).powi(2);
        if skip_origin && s < 1e-6 * reach {
            return false;
        }
        boundary.contains_closure(origin + dir * s)
    })
}

/// Assembles poles, then corner functions (increasing exponent per corner,
/// integer exponents skipped), then monomial derivatives `(z^j)'`, `j = 1..=n`.
pub fn assemble_basis(spec: &BasisSpec, boundary: &JordanBoundary) -> Result<Vec<BasisFunction>> {
    let z0 = boundary.z0();
    let mut out = Vec::with_capacity(spec.size());
    for pole in &spec.poles {
        if pole.k == 0 || pole.m == 0 {
            return Err(Error::Basis(format!(
                "pole orders must be positive: {pole:?}"
            )));
        }
        if boundary.contains_closure(pole.location) || boundary.distance_to(pole.location) == 0.0 {
            return Err(Error::Basis(format!(
                "pole at {} is not exterior to the domain",
                pole.location
            )));
        }
        let angle = pole.cut_angle.unwrap_or_else(|| (pole.location - z0).arg());
        let cut = Complex64::from_polar(1.0, angle);
        if pole.m > 1 && ray_hits_closure(boundary, pole.location, cut, false) {
            return Err(Error::Basis(format!(
                "branch cut from {} at angle {angle:.6} meets the closed domain",
                pole.location
            )));
        }
        out.push(BasisFunction::new(
            BasisKind::Pole {
                location: pole.location,
                k: pole.k,
                m: pole.m,
                cut,
            },
            z0,
        )?);
    }
    for cs in &spec.corners {
        let corner = boundary
            .corners()
            .get(cs.corner)
            .ok_or_else(|| Error::Basis(format!("corner index {} out of range", cs.corner)))?;
        if cs.count == 0 {
            continue;
        }
        if corner.special {
            return Err(Error::Basis(format!(
                "corner {} at {} is special (alpha = {}); it takes no singular functions",
                cs.corner, corner.vertex, corner.alpha
            )));
        }
        if ray_hits_closure(boundary, corner.vertex, corner.exterior_bisector, true) {
            return Err(Error::Basis(format!(
                "exterior bisector cut at corner {} meets the closed domain",
                cs.corner
            )));
        }
        let (gammas, _) = non_integer_exponents(corner.kind.into(), corner.alpha, cs.count)
            .ok_or_else(|| {
                Error::Basis(format!("corner {} has no non-integer exponents", cs.corner))
            })?;
        for gamma in gammas {
            debug_assert!(gamma > 0.5);
            out.push(BasisFunction::new(
                BasisKind::Corner {
                    vertex: corner.vertex,
                    gamma,
                    corner: cs.corner,
                    cut: corner.exterior_bisector,
                },
                z0,
            )?);
        }
    }
    for j in 1..=spec.monomials {
        out.push(BasisFunction::new(
            BasisKind::Monomial { degree: j as u32 },
            z0,
        )?);
    }
    Ok(out)
}

/// A singularity of the conformal map outside the domain, with its
/// exterior-map level `|Phi(location)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singularity {
    pub location: Complex64,
    pub k: u32,
    pub m: u32,
    pub level: f64,
}

/// A theoretical exponent; `exact` is populated when every angle involved is rational.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rate {
    pub value: f64,
    pub exact: Option<Ratio<i64>>,
}

impl Rate {
    fn from_exact(r: Ratio<i64>) -> Self {
        Self {
            value: r.to_f64().unwrap_or(f64::NAN),
            exact: Some(r),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PredictedRates {
    /// `min (2 - alpha_k)/alpha_k` over non-special corners.
    pub s: Option<Rate>,
    /// `min (2 - alpha_k) gamma_{nu_k}` with `nu_k` the first non-integer
    /// exponent beyond those already in the basis.
    pub s_star: Option<Rate>,
    /// Decay exponent of `|P_n(z0)|` for the plain basis: `s + 1/2`.
    pub sigma_plain: Option<Rate>,
    /// Decay exponent with corner functions in the basis: `s* + 1/2`.
    pub sigma_aug: Option<Rate>,
    /// `|Phi|` at the nearest catalog singularity not removed by a basis pole.
    pub rho: Option<f64>,
}

/// Theoretical rates for a basis on a boundary with a singularity catalog.
pub fn predicted_rates(
    boundary: &JordanBoundary,
    spec: &BasisSpec,
    catalog: &[Singularity],
) -> PredictedRates {
    let corners: Vec<(usize, &crate::geometry::Corner)> = boundary
        .corners()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.special)
        .collect();
    let requested = |index: usize| -> usize {
        spec.corners
            .iter()
            .filter(|c| c.corner == index)
            .map(|c| c.count)
            .sum()
    };

    let mut out = PredictedRates::default();
    if !corners.is_empty() {
        let all_exact: Option<Vec<Ratio<i64>>> =
            corners.iter().map(|(_, c)| c.alpha_exact).collect();
        let two = Ratio::from_integer(2);
        match all_exact {
            Some(alphas) => {
                let s = alphas.iter().map(|&a| (two - a) / a).min().unwrap();
                let mut s_star: Option<Ratio<i64>> = None;
                for ((index, corner), &alpha) in corners.iter().zip(&alphas) {
                    if let Some(gamma) =
                        next_exponent_exact(corner.kind.into(), alpha, requested(*index))
                    {
                        let v = (two - alpha) * gamma;
                        s_star = Some(s_star.map_or(v, |cur| cur.min(v)));
                    }
                }
                let half = Ratio::new(1, 2);
                out.s = Some(Rate::from_exact(s));
                out.sigma_plain = Some(Rate::from_exact(s + half));
                if let Some(v) = s_star {
                    out.s_star = Some(Rate::from_exact(v));
                    if spec.corners.iter().any(|c| c.count > 0) {
                        out.sigma_aug = Some(Rate::from_exact(v + half));
                    }
                }
            }
            None => {
                let s = corners
                    .iter()
                    .map(|(_, c)| (2.0 - c.alpha) / c.alpha)
                    .fold(f64::INFINITY, f64::min);
                let s_star = corners
                    .iter()
                    .filter_map(|(index, c)| {
                        next_exponent(c.kind.into(), c.alpha, requested(*index))
                            .map(|g| (2.0 - c.alpha) * g)
                    })
                    .fold(f64::INFINITY, f64::min);
                out.s = Some(Rate {
                    value: s,
                    exact: None,
                });
                out.sigma_plain = Some(Rate {
                    value: s + 0.5,
                    exact: None,
                });
                if s_star.is_finite() {
                    out.s_star = Some(Rate {
                        value: s_star,
                        exact: None,
                    });
                    if spec.corners.iter().any(|c| c.count > 0) {
                        out.sigma_aug = Some(Rate {
                            value: s_star + 0.5,
                            exact: None,
                        });
                    }
                }
            }
        }
    }

    let mut sorted = catalog.to_vec();
    sorted.sort_by(|a, b| a.level.total_cmp(&b.level));
    out.rho = sorted
        .iter()
        .find(|s| {
            !spec
                .poles
                .iter()
                .any(|p| (p.location - s.location).norm() <= 1e-9 * (1.0 + s.location.norm()))
        })
        .map(|s| s.level);
    out
}

/// Exponent following the first `taken` non-integer ones.
fn next_exponent(kind: LehmanKind, alpha: f64, taken: usize) -> Option<f64> {
    non_integer_exponents(kind, alpha, taken + 1).map(|(g, _)| g[taken])
}

fn next_exponent_exact(kind: LehmanKind, alpha: Ratio<i64>, taken: usize) -> Option<Ratio<i64>> {
    let mut len = 2 * taken + 4;
    while len <= 1 << 14 {
        let stream = lehman_exponents_exact(kind, alpha, len);
        let found = stream.iter().filter(|g| !g.is_integer()).nth(taken);
        if let Some(g) = found {
            return Some(*g);
        }
        len *= 2;
    }
    None
}

/// `true` when `gamma` would be skipped as an integer exponent.
pub fn is_integer_exponent(gamma: f64) -> bool {
    is_integer(gamma)
}

#[allow(dead_code)]
fn _assert_zero_is_integer() -> bool {
    Ratio::<i64>::zero().is_integer() && PI > 0.0
}
