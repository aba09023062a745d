//! Error measures, convergence-rate estimators and table output.

use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::JordanBoundary;
use crate::kernel::BieberbachApprox;
use crate::orthonormal::{OrthonormalSystem, SingularPlacement};
use crate::quadrature::NodeSet;
use crate::reference::ReferenceCase;

/// `sqrt(max(0, K(z0,z0) - K_n(z0,z0)))`, the L2 kernel error by Parseval.
pub fn error_l2(exact_kernel_z0: f64, approx_kernel_z0: f64) -> f64 {
    (exact_kernel_z0 - approx_kernel_z0).max(0.0).sqrt()
}

/// `||K(., z0) - K_n(., z0)||` computed directly by Green's formula on the
/// nodes, with `K(z, z0) = f0'(z) / (pi r0^2)`. Unlike [`error_l2`] it keeps
/// full relative accuracy when the error is far below `sqrt(eps K(z0,z0))`.
pub fn error_l2_direct(
    case: &ReferenceCase,
    system: &OrthonormalSystem,
    count: usize,
    nodes: &NodeSet,
) -> f64 {
    let weight = case.kernel_z0;
    let mut values: Vec<Complex64> = nodes
        .points()
        .iter()
        .map(|&z| weight * case.map.derivative(z))
        .collect();
    let mut anti: Vec<Complex64> = nodes
        .points()
        .iter()
        .map(|&z| weight * case.map.eval(z))
        .collect();
    for (d, member) in system.values_at_z0()[..count].iter().zip(system.samples()) {
        let d = d.conj();
        for (v, m) in values.iter_mut().zip(&member.values) {
            *v -= d * m;
        }
        for (v, m) in anti.iter_mut().zip(&member.antiderivative) {
            *v -= d * m;
        }
    }
    nodes.green(&values, &anti).re.max(0.0).sqrt()
}

/// Boundary sample points: `samples_per_arc` points per arc at parameters
/// `(j + 1/2) / samples_per_arc`, so arc endpoints are never sampled.
pub fn boundary_samples(boundary: &JordanBoundary, samples_per_arc: usize) -> Vec<Complex64> {
    boundary
        .arcs()
        .iter()
        .flat_map(|arc| {
            (0..samples_per_arc).map(move |j| arc.point((j as f64 + 0.5) / samples_per_arc as f64))
        })
        .collect()
}

/// `max |f0 - pi_n|` over boundary samples.
pub fn error_sup<F>(
    f0: F,
    approx: &BieberbachApprox<'_>,
    boundary: &JordanBoundary,
    samples_per_arc: usize,
) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64,
{
    let mut worst = 0.0f64;
    for z in boundary_samples(boundary, samples_per_arc) {
        worst = worst.max((f0(z) - approx.eval(z)?).norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RateVariant {
    /// `((n/(n-m)) E_{n-m}/E_n)^(1/m)`
    Rho,
    /// `((n/(n-m)) sqrt(log n / log(n-m)) E_{n-m}/E_n)^(1/m)`
    RhoLog,
    /// `(E_{n-m}/E_n)^(1/m)`
    RhoStar,
    /// `log(E_{n-m}/E_n) / log(n/(n-m))`
    Sigma,
    /// `(log(E_{n-m}/E_n) - log(log(n-m)/log n)/2) / log(n/(n-m))`
    SigmaLog,
}

impl RateVariant {
    pub fn name(&self) -> &'static str {
        match self {
            RateVariant::Rho => "rho",
            RateVariant::RhoLog => "rho-log",
            RateVariant::RhoStar => "rho-star",
            RateVariant::Sigma => "sigma",
            RateVariant::SigmaLog => "sigma-log",
        }
    }

    fn apply(&self, n: f64, m: f64, prev: f64, cur: f64) -> f64 {
        let ratio = prev / cur;
        match self {
            RateVariant::Rho => (n / (n - m) * ratio).powf(1.0 / m),
            RateVariant::RhoLog => {
                (n / (n - m) * (n.ln() / (n - m).ln()).sqrt() * ratio).powf(1.0 / m)
            }
            RateVariant::RhoStar => ratio.powf(1.0 / m),
            RateVariant::Sigma => ratio.ln() / (n / (n - m)).ln(),
            RateVariant::SigmaLog => {
                (ratio.ln() - 0.5 * ((n - m).ln() / n.ln()).ln()) / (n / (n - m)).ln()
            }
        }
    }
}

impl FromStr for RateVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rho" => Ok(RateVariant::Rho),
            "rho-log" => Ok(RateVariant::RhoLog),
            "rho-star" => Ok(RateVariant::RhoStar),
            "sigma" => Ok(RateVariant::Sigma),
            "sigma-log" => Ok(RateVariant::SigmaLog),
            other => Err(Error::Config(format!("unknown rate estimator `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimate {
    pub variant: RateVariant,
    pub lag: usize,
    /// One entry per input index; `None` where `n - lag` is absent or a value is not positive.
    pub values: Vec<Option<f64>>,
}

/// Applies `variant` with lag `m` to `values[i]` indexed by `ns[i]`.
pub fn rate_estimate(
    ns: &[usize],
    values: &[f64],
    variant: RateVariant,
    lag: usize,
) -> RateEstimate {
    assert_eq!(ns.len(), values.len());
    let estimates = ns
        .iter()
        .zip(values)
        .map(|(&n, &cur)| {
            if lag == 0 || n <= lag {
                return None;
            }
            let prev_index = ns.iter().position(|&k| k == n - lag)?;
            let prev = values[prev_index];
            if !(prev > 0.0 && cur > 0.0) {
                return None;
            }
            if matches!(variant, RateVariant::RhoLog | RateVariant::SigmaLog) && n - lag < 2 {
                return None;
            }
            let r = variant.apply(n as f64, lag as f64, prev, cur);
            r.is_finite().then_some(r)
        })
        .collect();
    RateEstimate {
        variant,
        lag,
        values: estimates,
    }
}

/// `|P_j(z0)|` for the first `count` members.
pub fn decay_sequence(system: &OrthonormalSystem, count: usize) -> Vec<f64> {
    system
        .values_at_z0()
        .iter()
        .take(count)
        .map(|v| v.norm())
        .collect()
}

/// Members behind the table row `n`: the first `n` members, singular
/// functions included. For an augmented system this needs the singular
/// functions placed first and at least one polynomial in the prefix.
pub fn row_members(system: &OrthonormalSystem, n: usize) -> Option<usize> {
    let singular = system.singular().len();
    if n <= singular || n > system.len() {
        return None;
    }
    (singular == 0 || system.placement() == SingularPlacement::BeforePolynomials).then_some(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Error,
    Rate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    pub values: Vec<Option<f64>>,
}

/// Rows indexed by `n` with error and rate columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub title: String,
    pub ns: Vec<usize>,
    pub columns: Vec<Column>,
}

impl ErrorTable {
    pub fn new(title: impl Into<String>, ns: Vec<usize>) -> Self {
        assert!(
            ns.windows(2).all(|w| w[0] < w[1]),
            "n must be strictly increasing"
        );
        Self {
            title: title.into(),
            ns,
            columns: Vec::new(),
        }
    }

    pub fn push_errors(&mut self, name: impl Into<String>, values: &[f64]) {
        assert_eq!(values.len(), self.ns.len());
        self.columns.push(Column {
            name: name.into(),
            kind: ColumnKind::Error,
            values: values.iter().map(|&v| Some(v)).collect(),
        });
    }

    pub fn push_rate(&mut self, name: impl Into<String>, rate: &RateEstimate) {
        assert_eq!(rate.values.len(), self.ns.len());
        self.columns.push(Column {
            name: name.into(),
            kind: ColumnKind::Rate,
            values: rate.values.clone(),
        });
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn value(&self, name: &str, n: usize) -> Option<f64> {
        let row = self.ns.iter().position(|&k| k == n)?;
        self.column(name)?.values[row]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n");
        for c in &self.columns {
            out.push(',');
            out.push_str(&c.name);
        }
        out.push('\n');
        for (row, n) in self.ns.iter().enumerate() {
            let _ = write!(out, "{n}");
            for c in &self.columns {
                out.push(',');
                if let Some(v) = c.values[row] {
                    let _ = write!(out, "{v:.6e}");
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .ns
            .iter()
            .enumerate()
            .map(|(row, n)| {
                std::iter::once(n.to_string())
                    .chain(self.columns.iter().map(|c| match (c.values[row], c.kind) {
                        (None, _) => "-".to_string(),
                        (Some(v), ColumnKind::Error) => format!("{v:.1e}"),
                        (Some(v), ColumnKind::Rate) => format!("{v:.3}"),
                    }))
                    .collect()
            })
            .collect();
        let header: Vec<String> = std::iter::once("n".to_string())
            .chain(self.columns.iter().map(|c| c.name.clone()))
            .collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|i| {
                cells
                    .iter()
                    .map(|r| r[i].len())
                    .chain([header[i].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |row: &[String]| -> String {
            row.iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let mut out = format!("{}\n", self.title);
        out.push_str(&line(&header));
        out.push('\n');
        out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
        out.push('\n');
        for r in &cells {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}
