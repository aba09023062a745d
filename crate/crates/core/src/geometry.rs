//! Bounded Jordan domains whose boundaries are closed chains of line
//! segments and circular arcs.
//!
//! A [`JordanBoundary`] is always positively oriented. Corners are detected
//! at arc junctions from the one-sided tangents, and each carries its
//! interior angle as a fraction `alpha` of `pi`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{Error, Result};

const JOIN_TOL: f64 = 1e-13;
const SPECIAL_TOL: f64 = 1e-12;
const MAX_SPECIAL_DENOM: i64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArcKind {
    Segment {
        a: Complex64,
        b: Complex64,
    },
    /// `z(t) = center + radius * exp(i (start + t * sweep))`, `t` in `[0, 1]`.
    /// The sign of `sweep` is the orientation.
    Circular {
        center: Complex64,
        radius: f64,
        start: f64,
        sweep: f64,
    },
}

/// One analytic piece of the boundary, parametrized over `t in [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryArc {
    kind: ArcKind,
}

impl BoundaryArc {
    pub fn segment(a: Complex64, b: Complex64) -> Result<Self> {
        if (b - a).norm() == 0.0 || !(a.is_finite() && b.is_finite()) {
            return Err(Error::Geometry(format!("degenerate segment [{a}, {b}]")));
        }
        Ok(Self {
            kind: ArcKind::Segment { a, b },
        })
    }

    pub fn circular(center: Complex64, radius: f64, start: f64, sweep: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Geometry(format!("circular arc radius {radius}")));
        }
        if sweep == 0.0 || sweep.abs() > TAU + 1e-15 || !start.is_finite() {
            return Err(Error::Geometry(format!("circular arc sweep {sweep}")));
        }
        Ok(Self {
            kind: ArcKind::Circular {
                center,
                radius,
                start,
                sweep,
            },
        })
    }

    pub fn kind(&self) -> &ArcKind {
        &self.kind
    }

    pub fn is_segment(&self) -> bool {
        matches!(self.kind, ArcKind::Segment { .. })
    }

    pub fn point(&self, t: f64) -> Complex64 {
        match self.kind {
            ArcKind::Segment { a, b } => a + (b - a) * t,
            ArcKind::Circular {
                center,
                radius,
                start,
                sweep,
            } => center + Complex64::from_polar(radius, start + t * sweep),
        }
    }

    /// `dz/dt`.
    pub fn derivative(&self, t: f64) -> Complex64 {
        match self.kind {
            ArcKind::Segment { a, b } => b - a,
            ArcKind::Circular {
                radius,
                start,
                sweep,
                ..
            } => Complex64::i() * Complex64::from_polar(radius * sweep, start + t * sweep),
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }

    pub fn length(&self) -> f64 {
        match self.kind {
            ArcKind::Segment { a, b } => (b - a).norm(),
            ArcKind::Circular { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// Unit tangent in the direction of travel.
    pub fn unit_tangent(&self, t: f64) -> Complex64 {
        let d = self.derivative(t);
        d / d.norm()
    }

    pub fn reversed(&self) -> Self {
        let kind = match self.kind {
            ArcKind::Segment { a, b } => ArcKind::Segment { a: b, b: a },
            ArcKind::Circular {
                center,
                radius,
                start,
                sweep,
            } => ArcKind::Circular {
                center,
                radius,
                start: start + sweep,
                sweep: -sweep,
            },
        };
        Self { kind }
    }

    /// Closed form of `\int dz` along the arc.
    pub fn integral_dz(&self) -> Complex64 {
        self.end() - self.start()
    }

    /// Closed form of `\int conj(z) dz` along the arc.
    pub fn integral_conj_z_dz(&self) -> Complex64 {
        match self.kind {
            ArcKind::Segment { a, b } => a.conj() * (b - a) + 0.5 * (b - a).norm_sqr(),
            ArcKind::Circular {
                center,
                radius,
                sweep,
                ..
            } => {
                center.conj() * (self.end() - self.start())
                    + Complex64::i() * radius * radius * sweep
            }
        }
    }

    /// Angle through which the arc turns as seen from `p` (not on the arc).
    fn sweep_from(&self, p: Complex64) -> f64 {
        match self.kind {
            ArcKind::Segment { a, b } => ((b - p) / (a - p)).arg(),
            ArcKind::Circular {
                center,
                radius,
                start,
                sweep,
            } => {
                let pieces = (sweep.abs() / (0.25 * PI)).ceil().max(3.0) as usize;
                let step = sweep / pieces as f64;
                let inside_circle = (p - center).norm() < radius;
                let mut total = 0.0;
                for k in 0..pieces {
                    let a = center + Complex64::from_polar(radius, start + k as f64 * step);
                    let b = center + Complex64::from_polar(radius, start + (k + 1) as f64 * step);
                    total += ((b - p) / (a - p)).arg();
                    if inside_circle {
                        let side = |q: Complex64| ((b - a).conj() * (q - a)).im;
                        if side(p) * side(center) < 0.0 {
                            total += TAU * step.signum();
                        }
                    }
                }
                total
            }
        }
    }

    pub fn distance_to(&self, p: Complex64) -> f64 {
        match self.kind {
            ArcKind::Segment { a, b } => {
                let d = b - a;
                let t = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
                (a + d * t - p).norm()
            }
            ArcKind::Circular {
                center,
                radius,
                start,
                sweep,
            } => {
                let v = p - center;
                if v.norm() > 0.0 {
                    let offset = ((v.arg() - start) * sweep.signum()).rem_euclid(TAU);
                    if offset <= sweep.abs() {
                        return (v.norm() - radius).abs();
                    }
                }
                (self.start() - p).norm().min((self.end() - p).norm())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CornerKind {
    StraightStraight,
    InvolvingCircular,
}

/// A corner where two arcs meet at interior angle `alpha * pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Corner {
    pub vertex: Complex64,
    pub alpha: f64,
    /// `alpha` recovered as a rational with denominator at most 1000, when it is one.
    pub alpha_exact: Option<Ratio<i64>>,
    pub kind: CornerKind,
    /// `alpha == 1/m` for a positive integer `m`.
    pub special: bool,
    /// Index of the arc ending at the vertex.
    pub incoming: usize,
    /// Index of the arc starting at the vertex.
    pub outgoing: usize,
    /// Unit direction bisecting the exterior angle, pointing away from the domain.
    pub exterior_bisector: Complex64,
}

/// Continued-fraction recovery of `x` as `p/q` with `q <= max_denom`.
pub fn rational_approx(x: f64, max_denom: i64, tol: f64) -> Option<Ratio<i64>> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_denom {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() < tol {
            return Some(Ratio::new(h1, k1));
        }
        let frac = r - a as f64;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

pub fn is_special_angle(alpha: f64) -> bool {
    if alpha <= 0.0 {
        return false;
    }
    let m = (1.0 / alpha).round();
    m >= 1.0 && m <= MAX_SPECIAL_DENOM as f64 && (alpha - 1.0 / m).abs() < SPECIAL_TOL
}

/// Positively oriented closed boundary with its corners and the
/// normalization point `z0`. Every junction between two distinct arcs is
/// recorded as a corner, including straight ones (`alpha == 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct JordanBoundary {
    arcs: Vec<BoundaryArc>,
    corners: Vec<Corner>,
    z0: Complex64,
}

impl JordanBoundary {
    /// Validates closure, orients the chain counterclockwise, detects corners
    /// and checks that `z0` is interior.
    pub fn new(arcs: Vec<BoundaryArc>, z0: Complex64) -> Result<Self> {
        if arcs.is_empty() {
            return Err(Error::Geometry("no arcs".into()));
        }
        let scale = arcs
            .iter()
            .map(|a| a.start().norm().max(a.length()))
            .fold(1.0_f64, f64::max);
        let n = arcs.len();
        for i in 0..n {
            let next = &arcs[(i + 1) % n];
            let gap = (arcs[i].end() - next.start()).norm();
            if gap > JOIN_TOL * scale {
                return Err(Error::Geometry(format!(
                    "arc {i} ends at {} but arc {} starts at {} (gap {gap:.3e})",
                    arcs[i].end(),
                    (i + 1) % n,
                    next.start()
                )));
            }
        }
        let signed_area: f64 = arcs.iter().map(|a| a.integral_conj_z_dz().im).sum::<f64>() * 0.5;
        let arcs = if signed_area < 0.0 {
            arcs.iter().rev().map(BoundaryArc::reversed).collect()
        } else {
            arcs
        };
        let corners = detect_corners(&arcs);
        let boundary = Self { arcs, corners, z0 };
        if boundary.distance_to(z0) <= 0.0 || boundary.winding_number(z0) != 1 {
            return Err(Error::Geometry(format!("z0 = {z0} is not interior")));
        }
        Ok(boundary)
    }

    pub fn arcs(&self) -> &[BoundaryArc] {
        &self.arcs
    }

    pub fn corners(&self) -> &[Corner] {
        &self.corners
    }

    pub fn z0(&self) -> Complex64 {
        self.z0
    }

    /// Same boundary with a different interior normalization point.
    pub fn with_z0(&self, z0: Complex64) -> Result<Self> {
        Self::new(self.arcs.clone(), z0)
    }

    pub fn perimeter(&self) -> f64 {
        self.arcs.iter().map(BoundaryArc::length).sum()
    }

    /// `(1/2i) \oint conj(z) dz`, in closed form.
    pub fn area(&self) -> f64 {
        let s: Complex64 = self.arcs.iter().map(BoundaryArc::integral_conj_z_dz).sum();
        (s / Complex64::new(0.0, 2.0)).re
    }

    /// `\oint dz`, in closed form; zero for a closed curve.
    pub fn contour_integral_dz(&self) -> Complex64 {
        self.arcs.iter().map(BoundaryArc::integral_dz).sum()
    }

    pub fn diameter(&self) -> f64 {
        let pts: Vec<Complex64> = self
            .arcs
            .iter()
            .flat_map(|a| (0..=64).map(move |k| a.point(k as f64 / 64.0)))
            .collect();
        let mut d: f64 = 0.0;
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                d = d.max((p - q).norm());
            }
        }
        d
    }

    pub fn distance_to(&self, p: Complex64) -> f64 {
        self.arcs
            .iter()
            .map(|a| a.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Winding number of the boundary around `p`; meaningless for `p` on the boundary.
    pub fn winding_number(&self, p: Complex64) -> i64 {
        let total: f64 = self.arcs.iter().map(|a| a.sweep_from(p)).sum();
        (total / TAU).round() as i64
    }

    /// Open-domain membership test.
    pub fn contains(&self, p: Complex64) -> bool {
        self.distance_to(p) > 1e-14 * self.perimeter() && self.winding_number(p) == 1
    }

    /// Membership in the closure.
    pub fn contains_closure(&self, p: Complex64) -> bool {
        self.distance_to(p) <= 1e-14 * self.perimeter() || self.winding_number(p) == 1
    }
}

fn detect_corners(arcs: &[BoundaryArc]) -> Vec<Corner> {
    let n = arcs.len();
    let mut corners = Vec::new();
    for incoming in 0..n {
        let outgoing = (incoming + 1) % n;
        if incoming == outgoing {
            continue;
        }
        let (alpha, exterior_bisector) = junction_angle(&arcs[incoming], &arcs[outgoing]);
        let kind = if arcs[incoming].is_segment() && arcs[outgoing].is_segment() {
            CornerKind::StraightStraight
        } else {
            CornerKind::InvolvingCircular
        };
        corners.push(Corner {
            vertex: arcs[outgoing].start(),
            alpha,
            alpha_exact: rational_approx(alpha, MAX_SPECIAL_DENOM, SPECIAL_TOL),
            kind,
            special: is_special_angle(alpha),
            incoming,
            outgoing,
            exterior_bisector,
        });
    }
    corners
}

/// Interior angle fraction at the junction `incoming -> outgoing` and the
/// outward exterior bisector.
pub fn junction_angle(incoming: &BoundaryArc, outgoing: &BoundaryArc) -> (f64, Complex64) {
    let back = -incoming.unit_tangent(1.0);
    let forward = outgoing.unit_tangent(0.0);
    let angle = (back / forward).arg().rem_euclid(TAU);
    let inner = forward * Complex64::from_polar(1.0, 0.5 * angle);
    (angle / PI, -inner)
}

/// Lens bounded by two circular arcs through `i` and `-i` making angles `a`
/// (left arc) and `b` (right arc) with the segment `[-i, i]`; `z0 = 0`.
pub fn build_lens(a: f64, b: f64) -> Result<JordanBoundary> {
    if !(a > 0.0 && a < PI && b > 0.0 && b < PI) {
        return Err(Error::Geometry(format!(
            "lens angles must lie in (0, pi), got a = {a}, b = {b}"
        )));
    }
    let i = Complex64::i();
    let right = BoundaryArc::circular(
        Complex64::new(-1.0 / b.tan(), 0.0),
        1.0 / b.sin(),
        -b,
        2.0 * b,
    )?;
    let left = BoundaryArc::circular(
        Complex64::new(1.0 / a.tan(), 0.0),
        1.0 / a.sin(),
        PI - a,
        2.0 * a,
    )?;
    let boundary = JordanBoundary::new(vec![right, left], Complex64::new(0.0, 0.0))?;
    let expected = (a + b) / PI;
    for c in boundary.corners() {
        if (c.vertex - i).norm() > 1e-12 && (c.vertex + i).norm() > 1e-12 {
            return Err(Error::Geometry(format!("lens corner at {}", c.vertex)));
        }
        if (c.alpha - expected).abs() > 1e-10 {
            return Err(Error::Geometry(format!(
                "lens corner angle {} differs from (a+b)/pi = {expected}",
                c.alpha
            )));
        }
    }
    Ok(boundary)
}

/// Symmetric sector `{|z| < radius, |arg z| < alpha pi / 2}` with `z0 = radius / 2`.
pub fn build_sector(alpha: f64, radius: f64) -> Result<JordanBoundary> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Geometry(format!(
            "sector alpha must lie in (0, 2), got {alpha}"
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Geometry(format!("sector radius {radius}")));
    }
    let half = 0.5 * alpha * PI;
    let origin = Complex64::new(0.0, 0.0);
    let lower = Complex64::from_polar(radius, -half);
    let upper = Complex64::from_polar(radius, half);
    let arcs = vec![
        BoundaryArc::segment(origin, lower)?,
        BoundaryArc::circular(origin, radius, -half, alpha * PI)?,
        BoundaryArc::segment(upper, origin)?,
    ];
    JordanBoundary::new(arcs, Complex64::new(0.5 * radius, 0.0))
}

/// Disk of the given radius centred at the origin, `z0 = 0`.
pub fn build_disk(radius: f64) -> Result<JordanBoundary> {
    let arc = BoundaryArc::circular(Complex64::new(0.0, 0.0), radius, 0.0, TAU)?;
    JordanBoundary::new(vec![arc], Complex64::new(0.0, 0.0))
}
