//! Boundary discretization and Green's-formula inner products.
//!
//! For `f`, `g` analytic in `G` and `G' = g`,
//! `\int_G f conj(g) dA = (1/2i) \oint f conj(G) dz`, so every area inner
//! product reduces to a line integral over the boundary. The line integrals
//! are evaluated with composite Gauss–Legendre panels that are graded
//! geometrically toward each corner.

mod gauss;
mod oracle;

pub use gauss::GaussLegendre;
pub use oracle::{area_gram_oracle, area_oracle, OracleOptions};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{ArcKind, BoundaryArc, JordanBoundary};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureParams {
    /// Gauss–Legendre points per panel.
    pub order: usize,
    /// Uniform panels per arc before grading.
    pub base_panels: usize,
    /// Length ratio between consecutive graded panels.
    pub grading_ratio: f64,
    /// Grading stops once the innermost panel is shorter than this fraction
    /// of the arc length, or once offsets from the vertex are no longer
    /// resolvable in binary64.
    pub min_panel_fraction: f64,
}

impl Default for QuadratureParams {
    fn default() -> Self {
        Self {
            order: 24,
            base_panels: 8,
            grading_ratio: 0.5,
            min_panel_fraction: 1e-30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub arc: usize,
    /// Parameter range; measured from the end of the arc (`s = 1 - t`) when
    /// `from_end` is set, so that panels next to the end vertex stay resolvable.
    pub t0: f64,
    pub t1: f64,
    pub from_end: bool,
    /// Index of the panel's first node.
    pub first: usize,
}

impl Panel {
    /// Panel endpoints in the direction of travel.
    pub fn endpoints(&self, arc: &BoundaryArc) -> (Complex64, Complex64) {
        if self.from_end {
            let rev = arc.reversed();
            (rev.point(self.t1), rev.point(self.t0))
        } else {
            (arc.point(self.t0), arc.point(self.t1))
        }
    }
}

/// Quadrature nodes on the boundary; `weights[k]` already includes `dz/dt`,
/// so `\oint f dz ~ \sum f(points[k]) weights[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    points: Vec<Complex64>,
    weights: Vec<Complex64>,
    arclength: Vec<f64>,
    panels: Vec<Panel>,
    rule: GaussLegendre,
    perimeter: f64,
}

impl NodeSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn arclength(&self) -> &[f64] {
        &self.arclength
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn order(&self) -> usize {
        self.rule.order()
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    /// `\oint f dz` for samples `f` at the nodes.
    pub fn contour_sum(&self, values: &[Complex64]) -> Complex64 {
        values.iter().zip(&self.weights).map(|(f, w)| f * w).sum()
    }

    /// Panel-wise cumulative integral of `f dz` along the boundary, starting
    /// from zero at the start of the first arc.
    pub fn cumulative(&self, values: &[Complex64]) -> Vec<Complex64> {
        let q = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
        let mut start = Complex64::new(0.0, 0.0);
        for panel in &self.panels {
            let range = panel.first..panel.first + q;
            let fw: Vec<Complex64> = values[range.clone()]
                .iter()
                .zip(&self.weights[range])
                .map(|(f, w)| f * w)
                .collect();
            for i in 0..q {
                let row = &self.rule.integration[i];
                let partial: Complex64 = row.iter().zip(&fw).map(|(a, v)| v * *a).sum();
                out[panel.first + i] = start + partial;
            }
            start += fw.iter().sum::<Complex64>();
        }
        out
    }

    /// `(1/2i) \sum f conj(G) w`.
    pub fn green(&self, f: &[Complex64], g_antiderivative: &[Complex64]) -> Complex64 {
        let s: Complex64 = f
            .iter()
            .zip(g_antiderivative)
            .zip(&self.weights)
            .map(|((f, g), w)| f * g.conj() * w)
            .sum();
        s * Complex64::new(0.0, -0.5)
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::NodeMismatch {
                got: len,
                expected: self.len(),
            });
        }
        Ok(())
    }
}

/// Builds Gauss–Legendre panels over every arc, graded toward each corner.
pub fn build_nodes(boundary: &JordanBoundary, params: &QuadratureParams) -> NodeSet {
    let rule = GaussLegendre::new(params.order.max(1));
    let arcs = boundary.arcs();
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut arclength = Vec::new();
    let mut panels = Vec::new();
    let mut s_offset = 0.0;
    for (index, arc) in arcs.iter().enumerate() {
        let graded_start = boundary.corners().iter().any(|c| c.outgoing == index);
        let graded_end = boundary.corners().iter().any(|c| c.incoming == index);
        let length = arc.length();
        let floor = |vertex: Complex64| {
            params
                .min_panel_fraction
                .max(1e4 * f64::EPSILON * resolution(arc, vertex) / length)
        };
        let start_floor = graded_start.then(|| floor(arc.start()));
        let end_floor = graded_end.then(|| floor(arc.end()));
        let rev = arc.reversed();
        for (t0, t1, from_end) in panel_intervals(start_floor, end_floor, params) {
            panels.push(Panel {
                arc: index,
                t0,
                t1,
                from_end,
                first: points.len(),
            });
            let half = 0.5 * (t1 - t0);
            let mid = 0.5 * (t0 + t1);
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                if from_end {
                    // nodes stay in increasing t order
                    let s = mid - half * x;
                    points.push(rev.point(s));
                    weights.push(-rev.derivative(s) * (w * half));
                    arclength.push(s_offset + (1.0 - s) * length);
                } else {
                    let t = mid + half * x;
                    points.push(arc.point(t));
                    weights.push(arc.derivative(t) * (w * half));
                    arclength.push(s_offset + t * length);
                }
            }
        }
        s_offset += length;
    }
    NodeSet {
        points,
        weights,
        arclength,
        panels,
        rule,
        perimeter: s_offset,
    }
}

/// Scale of the absolute rounding error in node positions next to `vertex`.
fn resolution(arc: &BoundaryArc, vertex: Complex64) -> f64 {
    match *arc.kind() {
        ArcKind::Segment { .. } => vertex.norm(),
        ArcKind::Circular { center, radius, .. } => center.norm() + radius,
    }
}

/// Panels in increasing `t` order as `(t0, t1, from_end)`; graded ends get
/// geometric splits down to the given floor (fraction of the arc length).
fn panel_intervals(
    start_floor: Option<f64>,
    end_floor: Option<f64>,
    params: &QuadratureParams,
) -> Vec<(f64, f64, bool)> {
    let mut base = params.base_panels.max(1);
    if start_floor.is_some() && end_floor.is_some() {
        base = base.max(2);
    }
    let h = 1.0 / base as f64;
    let ratio = params.grading_ratio.clamp(1e-3, 0.999);

    // geometric splits of [0, h] toward 0, innermost first
    let graded = |h: f64, floor: f64| -> Vec<(f64, f64)> {
        let mut cuts = vec![h];
        let mut len = h;
        while len > floor.max(1e-300) {
            len *= ratio;
            cuts.push(len);
        }
        cuts.push(0.0);
        cuts.reverse();
        cuts.windows(2).map(|w| (w[0], w[1])).collect()
    };

    let mut out = Vec::new();
    for k in 0..base {
        let (a, b) = (
            k as f64 * h,
            if k + 1 == base {
                1.0
            } else {
                (k + 1) as f64 * h
            },
        );
        if let (0, Some(floor)) = (k, start_floor) {
            out.extend(
                graded(b - a, floor)
                    .into_iter()
                    .map(|(x, y)| (a + x, a + y, false)),
            );
        } else if let (true, Some(floor)) = (k + 1 == base, end_floor) {
            out.extend(
                graded(b - a, floor)
                    .into_iter()
                    .rev()
                    .map(|(x, y)| (x, y, true)),
            );
        } else {
            out.push((a, b, false));
        }
    }
    out
}

/// Values of an analytic function at the nodes together with one
/// antiderivative (determined up to an additive constant).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySamples {
    pub values: Vec<Complex64>,
    pub antiderivative: Vec<Complex64>,
}

impl BoundarySamples {
    pub fn new(values: Vec<Complex64>, antiderivative: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), antiderivative.len());
        Self {
            values,
            antiderivative,
        }
    }

    pub fn zeros(len: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); len];
        Self::new(z.clone(), z)
    }

    /// Samples `f` and a known antiderivative `big_f` at the nodes.
    pub fn from_fns<F, A>(nodes: &NodeSet, mut f: F, mut big_f: A) -> Self
    where
        F: FnMut(Complex64) -> Complex64,
        A: FnMut(Complex64) -> Complex64,
    {
        Self::new(
            nodes.points().iter().map(|&z| f(z)).collect(),
            nodes.points().iter().map(|&z| big_f(z)).collect(),
        )
    }

    /// Samples `f` and integrates it along the boundary for the antiderivative.
    pub fn from_values(nodes: &NodeSet, values: Vec<Complex64>) -> Self {
        let antiderivative = nodes.cumulative(&values);
        Self::new(values, antiderivative)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `self += a * other`, componentwise on both value and antiderivative.
    pub fn axpy(&mut self, a: Complex64, other: &BoundarySamples) {
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x += a * y;
        }
        for (x, y) in self.antiderivative.iter_mut().zip(&other.antiderivative) {
            *x += a * y;
        }
    }

    pub fn scale(&mut self, a: f64) {
        self.values.iter_mut().for_each(|x| *x *= a);
        self.antiderivative.iter_mut().for_each(|x| *x *= a);
    }

    pub fn shift_antiderivative(&mut self, c: Complex64) {
        self.antiderivative.iter_mut().for_each(|x| *x += c);
    }
}

/// Green's-formula approximation of `<f, g> = \int_G f conj(g) dA`, using the
/// antiderivative carried by `g`.
pub fn green_inner_product(
    f: &BoundarySamples,
    g: &BoundarySamples,
    nodes: &NodeSet,
) -> Result<Complex64> {
    nodes.check(f.len())?;
    nodes.check(g.len())?;
    Ok(nodes.green(&f.values, &g.antiderivative))
}

/// Cumulative integral of `f dz` along the boundary at every node.
pub fn cumulative_antiderivative(values: &[Complex64], nodes: &NodeSet) -> Result<Vec<Complex64>> {
    nodes.check(values.len())?;
    Ok(nodes.cumulative(values))
}
