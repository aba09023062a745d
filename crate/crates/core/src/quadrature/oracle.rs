//! Brute-force two-dimensional quadrature of `\int_G f conj(g) dA` in polar
//! coordinates about `z0`. Independent of the boundary-integral route; used
//! to check it.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::GaussLegendre;
use crate::error::{Error, Result};
use crate::geometry::{ArcKind, JordanBoundary};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Relative agreement required between successive refinements.
    pub tolerance: f64,
    pub max_refinements: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_refinements: 7,
        }
    }
}

/// `(gauss order, grading levels, base panels per angular interval)` per refinement.
fn schedule(level: usize) -> (usize, usize, usize) {
    (8 + 4 * level, 10 + 6 * level, 2 + level)
}

/// `\int_G f conj(g) dA`. The domain must be star-shaped with respect to `z0`.
pub fn area_oracle<F, G>(
    f: F,
    g: G,
    boundary: &JordanBoundary,
    opts: &OracleOptions,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
    G: Fn(Complex64) -> Complex64,
{
    let funcs: [&dyn Fn(Complex64) -> Complex64; 2] = [&f, &g];
    let gram = area_gram_oracle(&funcs, boundary, opts)?;
    Ok(gram[0][1])
}

/// Matrix of `\int_G f_i conj(f_j) dA` over all pairs, refined until every
/// entry settles to the requested relative tolerance (measured against the
/// largest diagonal entry of the pair).
pub fn area_gram_oracle(
    funcs: &[&dyn Fn(Complex64) -> Complex64],
    boundary: &JordanBoundary,
    opts: &OracleOptions,
) -> Result<Vec<Vec<Complex64>>> {
    let mut previous: Option<Vec<Vec<Complex64>>> = None;
    let mut change = f64::INFINITY;
    for level in 0..opts.max_refinements {
        let current = polar_gram(funcs, boundary, schedule(level))?;
        if let Some(prev) = &previous {
            change = 0.0;
            let n = funcs.len();
            for i in 0..n {
                for j in 0..n {
                    let scale = (current[i][i].norm() * current[j][j].norm())
                        .sqrt()
                        .max(1e-300);
                    let rel = (current[i][j] - prev[i][j]).norm() / scale.max(current[i][j].norm());
                    change = change.max(rel);
                }
            }
            if change <= opts.tolerance {
                return Ok(current);
            }
        }
        previous = Some(current);
    }
    Err(Error::NonConvergence {
        refinements: opts.max_refinements,
        change,
    })
}

fn polar_gram(
    funcs: &[&dyn Fn(Complex64) -> Complex64],
    boundary: &JordanBoundary,
    (order, levels, base): (usize, usize, usize),
) -> Result<Vec<Vec<Complex64>>> {
    let center = boundary.z0();
    let rule = GaussLegendre::new(order);
    let n = funcs.len();
    let mut gram = vec![vec![Complex64::new(0.0, 0.0); n]; n];

    let mut breaks: Vec<f64> = boundary
        .arcs()
        .iter()
        .map(|a| (a.start() - center).arg().rem_euclid(TAU))
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let mut intervals: Vec<(f64, f64)> = breaks.windows(2).map(|w| (w[0], w[1])).collect();
    intervals.push((*breaks.last().unwrap(), breaks[0] + TAU));

    let radial = graded_toward_end(1.0, levels);
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for (a, b) in intervals {
        let width = b - a;
        let mut angular = Vec::new();
        let h = width / base as f64;
        for k in 0..base {
            let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            if k == 0 {
                angular.extend(
                    graded_toward_end(hi - lo, levels)
                        .iter()
                        .map(|(x, y)| (hi - y, hi - x)),
                );
            } else if k + 1 == base {
                angular.extend(
                    graded_toward_end(hi - lo, levels)
                        .iter()
                        .map(|(x, y)| (lo + x, lo + y)),
                );
            } else {
                angular.push((lo, hi));
            }
        }
        if base == 1 {
            angular = vec![(a, b)];
        }
        for (t0, t1) in angular {
            let (tm, th) = (0.5 * (t0 + t1), 0.5 * (t1 - t0));
            for (xt, wt) in rule.nodes.iter().zip(&rule.weights) {
                let theta = tm + th * xt;
                let dir = Complex64::from_polar(1.0, theta);
                let big_r = ray_exit(boundary, center, dir)?;
                for &(r0, r1) in &radial {
                    let (rm, rh) = (0.5 * (r0 + r1) * big_r, 0.5 * (r1 - r0) * big_r);
                    for (xr, wr) in rule.nodes.iter().zip(&rule.weights) {
                        let r = rm + rh * xr;
                        let z = center + dir * r;
                        let weight = wt * th * wr * rh * r;
                        for (v, f) in values.iter_mut().zip(funcs) {
                            *v = f(z);
                        }
                        for i in 0..n {
                            let fi = values[i] * weight;
                            for j in 0..n {
                                gram[i][j] += fi * values[j].conj();
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(gram)
}

/// Panels of `[0, len]` graded geometrically toward `len`.
fn graded_toward_end(len: f64, levels: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(levels + 2);
    let mut lo = 0.0;
    let mut gap = len;
    for _ in 0..=levels {
        gap *= 0.5;
        out.push((lo, len - gap));
        lo = len - gap;
    }
    out.push((lo, len));
    out
}

/// Distance from `center` along the unit direction `dir` to the boundary.
fn ray_exit(boundary: &JordanBoundary, center: Complex64, dir: Complex64) -> Result<f64> {
    let cross = |u: Complex64, v: Complex64| (u.conj() * v).im;
    let mut best = f64::INFINITY;
    for arc in boundary.arcs() {
        match *arc.kind() {
            ArcKind::Segment { a, b } => {
                let e = b - a;
                let w = a - center;
                let den = cross(dir, e);
                if den.abs() < 1e-300 {
                    continue;
                }
                let r = cross(w, e) / den;
                let s = cross(w, dir) / den;
                if r > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&s) {
                    best = best.min(r);
                }
            }
            ArcKind::Circular {
                center: c,
                radius,
                start,
                sweep,
            } => {
                let d = center - c;
                let half_b = (dir.conj() * d).re;
                let cc = d.norm_sqr() - radius * radius;
                let disc = half_b * half_b - cc;
                if disc < 0.0 {
                    continue;
                }
                let sq = disc.sqrt();
                for r in [-half_b - sq, -half_b + sq] {
                    if r <= 0.0 {
                        continue;
                    }
                    let p = center + dir * r - c;
                    let offset = ((p.arg() - start) * sweep.signum()).rem_euclid(TAU);
                    let tol = 1e-12;
                    if offset <= sweep.abs() + tol || offset >= TAU - tol {
                        best = best.min(r);
                    }
                }
            }
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::Geometry(format!(
            "ray from {center} in direction {dir} does not meet the boundary"
        )))
    }
}
