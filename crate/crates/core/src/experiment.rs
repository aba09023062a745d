//! Experiment configuration, the built-in presets, and the sweep runner.
//!
//! Config files are flat `key = value` lines; `#` starts a comment.
//!
//! ```text
//! name = halfdisk-demo
//! case = halfdisk
//! n = 5:50:5
//! variant = plain
//! variant = ab; pole = -1,0
//! quantities = l2, sup
//! l2-rates = rho
//! sup-rates = rho-star, rho-log
//! lag = 5
//! ```
//!
//! A variant line is `LABEL` followed by `; pole = re,im[,k,m[,cut_angle]]`
//! and `; corner = index,count` items. Quantities are `l2`, `sup` and `decay`.

use std::path::Path;

use num_complex::Complex64;

use crate::analysis::{
    decay_sequence, error_l2_direct, error_sup, rate_estimate, row_members, ErrorTable, RateVariant,
};
use crate::basis::{assemble_basis, BasisSpec, CornerSpec, PoleSpec};
use crate::error::{Error, Result};
use crate::kernel::BieberbachApprox;
use crate::orthonormal::{orthonormalize_with, OrthonormalSystem, SingularPlacement};
use crate::quadrature::{build_nodes, NodeSet, QuadratureParams};
use crate::reference::{reference_case, ReferenceCase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    /// `E_{n,2}`, the L2 norm of `K - K_{n-1}` on the boundary nodes.
    L2,
    /// `E_{n,inf}`, `max |f0 - pi_n|` over boundary samples.
    Sup,
    /// `|P(z0)|` for the `n`-th member counted from one, singular functions first.
    Decay,
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::L2 => "l2",
            Quantity::Sup => "sup",
            Quantity::Decay => "decay",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "l2" => Ok(Quantity::L2),
            "sup" => Ok(Quantity::Sup),
            "decay" => Ok(Quantity::Decay),
            other => Err(Error::Config(format!("unknown quantity `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub label: String,
    pub poles: Vec<PoleSpec>,
    pub corners: Vec<CornerSpec>,
}

impl Variant {
    pub fn plain(label: &str) -> Self {
        Self {
            label: label.to_string(),
            poles: Vec::new(),
            corners: Vec::new(),
        }
    }

    pub fn spec(&self, monomials: usize) -> BasisSpec {
        BasisSpec {
            poles: self.poles.clone(),
            corners: self.corners.clone(),
            monomials,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub case: String,
    pub variants: Vec<Variant>,
    pub n_min: usize,
    pub n_max: usize,
    pub n_step: usize,
    pub quantities: Vec<Quantity>,
    pub rates: Vec<(Quantity, RateVariant)>,
    pub lag: usize,
    pub samples_per_arc: usize,
    pub quadrature: QuadratureParams,
}

impl ExperimentConfig {
    pub fn ns(&self) -> Vec<usize> {
        (self.n_min..=self.n_max)
            .step_by(self.n_step.max(1))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_step == 0 || self.n_min > self.n_max {
            return Err(Error::Config(format!(
                "empty range {}:{}:{}",
                self.n_min, self.n_max, self.n_step
            )));
        }
        if self.variants.is_empty() {
            return Err(Error::Config("no variants".into()));
        }
        if self.quantities.is_empty() {
            return Err(Error::Config("no quantities".into()));
        }
        if self.lag == 0 {
            return Err(Error::Config("lag must be positive".into()));
        }
        if self.n_min == 0 {
            return Err(Error::Config("rows start at n = 1".into()));
        }
        for (i, v) in self.variants.iter().enumerate() {
            if self.variants[..i].iter().any(|w| w.label == v.label) {
                return Err(Error::Config(format!(
                    "duplicate variant label `{}`",
                    v.label
                )));
            }
            let singular = v.spec(0).singular_count();
            if self.n_min <= singular {
                return Err(Error::Config(format!(
                    "variant `{}` has {singular} singular functions, so rows start at n = {}",
                    v.label,
                    singular + 1
                )));
            }
        }
        Ok(())
    }

    /// Parses the flat key-value format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self {
            name: "experiment".into(),
            case: String::new(),
            variants: Vec::new(),
            n_min: 0,
            n_max: 0,
            n_step: 0,
            quantities: Vec::new(),
            rates: Vec::new(),
            lag: 5,
            samples_per_arc: 100,
            quadrature: QuadratureParams::default(),
        };
        let mut saw_range = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Config(format!("line {}: {msg}", lineno + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let int = |v: &str| -> Result<usize> {
                v.trim()
                    .parse()
                    .map_err(|_| err(format!("`{key}` expects an integer, got `{v}`")))
            };
            match key {
                "name" => cfg.name = value.to_string(),
                "case" => cfg.case = value.to_string(),
                "n" => {
                    let parts: Vec<&str> = value.split(':').collect();
                    let (lo, hi, step) = match parts.as_slice() {
                        [lo, hi, step] => (int(lo)?, int(hi)?, int(step)?),
                        [lo, hi] => (int(lo)?, int(hi)?, 1),
                        [single] => (int(single)?, int(single)?, 1),
                        _ => return Err(err(format!("bad range `{value}`"))),
                    };
                    cfg.n_min = lo;
                    cfg.n_max = hi;
                    cfg.n_step = step;
                    saw_range = true;
                }
                "variant" => cfg
                    .variants
                    .push(parse_variant(value).map_err(|e| err(e.to_string()))?),
                "quantities" => {
                    cfg.quantities = value
                        .split(',')
                        .map(Quantity::parse)
                        .collect::<Result<_>>()?;
                }
                "l2-rates" | "sup-rates" | "decay-rates" => {
                    let q = Quantity::parse(key.trim_end_matches("-rates"))?;
                    cfg.rates.retain(|(k, _)| *k != q);
                    for r in value.split(',').filter(|s| !s.trim().is_empty()) {
                        cfg.rates.push((q, r.parse()?));
                    }
                }
                "lag" => cfg.lag = int(value)?,
                "samples-per-arc" => cfg.samples_per_arc = int(value)?,
                "panel-order" => cfg.quadrature.order = int(value)?,
                "base-panels" => cfg.quadrature.base_panels = int(value)?,
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        if cfg.case.is_empty() {
            return Err(Error::Config("missing `case`".into()));
        }
        if !saw_range {
            return Err(Error::Config("missing `n` range".into()));
        }
        if cfg.variants.is_empty() {
            cfg.variants.push(Variant::plain("plain"));
        }
        if cfg.quantities.is_empty() {
            cfg.quantities = vec![Quantity::L2];
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_variant(text: &str) -> Result<Variant> {
    let mut items = text.split(';');
    let label = items.next().unwrap_or("").trim();
    if label.is_empty() || label.contains(|c: char| c == ',' || c.is_whitespace()) {
        return Err(Error::Config(format!("bad variant label `{label}`")));
    }
    let mut variant = Variant::plain(label);
    for item in items {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("bad variant item `{}`", item.trim())))?;
        let nums: Vec<f64> = value
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Config(format!("bad numbers in `{}`", value.trim())))?;
        match (key.trim(), nums.as_slice()) {
            ("pole", [re, im]) => variant
                .poles
                .push(PoleSpec::simple(Complex64::new(*re, *im))),
            ("pole", [re, im, k, m, rest @ ..]) if rest.len() <= 1 => {
                let positive_int = |x: f64| x >= 1.0 && x.fract() == 0.0;
                if !positive_int(*k) || !positive_int(*m) {
                    return Err(Error::Config(format!(
                        "pole orders must be positive integers in `{}`",
                        value.trim()
                    )));
                }
                variant.poles.push(PoleSpec {
                    location: Complex64::new(*re, *im),
                    k: *k as u32,
                    m: *m as u32,
                    cut_angle: rest.first().copied(),
                });
            }
            ("corner", [index, count])
                if index.fract() == 0.0
                    && count.fract() == 0.0
                    && *index >= 0.0
                    && *count >= 0.0 =>
            {
                variant.corners.push(CornerSpec {
                    corner: *index as usize,
                    count: *count as usize,
                });
            }
            (k, _) => {
                return Err(Error::Config(format!(
                    "bad variant item `{k} = {}`",
                    value.trim()
                )))
            }
        }
    }
    Ok(variant)
}

pub const PRESET_NAMES: [&str; 14] = [
    "table-5.1",
    "table-5.2",
    "table-5.3",
    "table-5.4",
    "table-5.5",
    "table-5.6",
    "table-5.7",
    "table-5.8",
    "table-5.9",
    "table-5.11",
    "table-5.13",
    "table-5.15",
    "disk-smoke",
    "halfdisk-smoke",
];

/// Built-in experiment by name.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    use std::f64::consts::PI;
    use Quantity::{Decay, Sup, L2};
    use RateVariant::{Rho, RhoLog, RhoStar, Sigma, SigmaLog};

    let c = |re: f64, im: f64| Complex64::new(re, im);
    let with_poles = |label: &str, poles: &[Complex64]| Variant {
        label: label.to_string(),
        poles: poles.iter().map(|&z| PoleSpec::simple(z)).collect(),
        corners: Vec::new(),
    };
    let base = |case: &str, range: (usize, usize, usize), lag: usize, variants: Vec<Variant>| {
        ExperimentConfig {
            name: name.to_string(),
            case: case.to_string(),
            variants,
            n_min: range.0,
            n_max: range.1,
            n_step: range.2,
            quantities: Vec::new(),
            rates: Vec::new(),
            lag,
            samples_per_arc: 100,
            quadrature: QuadratureParams::default(),
        }
    };
    let lens_i = || {
        vec![
            Variant::plain("bkm"),
            with_poles("ab", &[c(-(3f64.sqrt()) / 3.0, 0.0)]),
        ]
    };
    let lens_ii = || {
        vec![
            Variant::plain("bkm"),
            with_poles("ab", &[c(-1.0, 0.0), c(1.0, 0.0)]),
        ]
    };
    let half = || vec![Variant::plain("bkm"), with_poles("ab", &[c(-1.0, 0.0)])];
    let lens_iii = || {
        let t = (PI / 13.0).tan();
        vec![
            Variant::plain("bkm"),
            with_poles("ab", &[c(-t, 0.0), c(t, 0.0)]),
        ]
    };
    let corner = |count: usize| Variant {
        label: "ab".into(),
        poles: Vec::new(),
        corners: vec![CornerSpec { corner: 2, count }],
    };

    let mut cfg = match name {
        "table-5.1" => base("lens-i", (5, 35, 5), 5, lens_i()),
        "table-5.2" => base("lens-i", (5, 35, 5), 5, lens_i()),
        "table-5.3" => base("lens-ii", (4, 36, 4), 4, lens_ii()),
        "table-5.4" => base("lens-ii", (4, 36, 4), 4, lens_ii()),
        "table-5.5" => base("halfdisk", (5, 50, 5), 5, half()),
        "table-5.6" => base("halfdisk", (5, 50, 5), 5, half()),
        "table-5.7" => base("lens-iii", (4, 32, 4), 4, lens_iii()),
        "table-5.8" => base("lens-iii", (4, 32, 4), 4, lens_iii()),
        "table-5.9" => base("sector-2/5", (10, 100, 10), 10, vec![Variant::plain("bkm")]),
        "table-5.11" => base("sector-3/4", (10, 100, 10), 10, vec![corner(1)]),
        "table-5.13" => base("sector-4/5", (10, 100, 10), 10, vec![corner(1)]),
        "table-5.15" => base("sector-3/2", (20, 80, 5), 5, vec![corner(15)]),
        "disk-smoke" => base("disk", (1, 10, 1), 1, vec![Variant::plain("bkm")]),
        "halfdisk-smoke" => base("halfdisk", (5, 15, 5), 5, half()),
        other => return Err(Error::Config(format!("unknown preset `{other}`"))),
    };
    let (quantities, rates): (Vec<Quantity>, Vec<(Quantity, RateVariant)>) = match name {
        "table-5.1" | "table-5.3" | "table-5.5" => (vec![L2], vec![(L2, Rho)]),
        "table-5.2" | "table-5.4" | "table-5.6" => (vec![Sup], vec![(Sup, RhoStar), (Sup, RhoLog)]),
        "table-5.7" => (vec![L2], vec![(L2, RhoStar)]),
        "table-5.8" => (vec![Sup], vec![(Sup, RhoStar)]),
        "table-5.9" => (vec![Decay], vec![(Decay, Sigma), (Decay, RhoStar)]),
        "table-5.11" | "table-5.13" => (vec![Decay], vec![(Decay, Sigma)]),
        "table-5.15" => (
            vec![L2, Sup],
            vec![(L2, Sigma), (L2, RhoStar), (Sup, SigmaLog), (Sup, RhoStar)],
        ),
        _ => (vec![L2, Sup], vec![(L2, RhoStar), (Sup, RhoStar)]),
    };
    cfg.quantities = quantities;
    cfg.rates = rates;
    if matches!(name, "table-5.9" | "table-5.11" | "table-5.13") {
        cfg.quadrature.base_panels = 16;
    }
    Ok(cfg)
}

/// Loads a preset by name, or a config file by path.
pub fn load_config(spec: &str) -> Result<ExperimentConfig> {
    if PRESET_NAMES.contains(&spec) {
        return preset(spec);
    }
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        return ExperimentConfig::parse(&text);
    }
    Err(Error::Config(format!(
        "`{spec}` is neither a preset nor a readable config file"
    )))
}

/// Everything built for one variant at the largest size of a sweep.
#[derive(Debug, Clone)]
pub struct VariantRun {
    pub variant: Variant,
    pub system: OrthonormalSystem,
    pub nodes: NodeSet,
}

/// Builds the orthonormal system for a variant with `monomials` polynomials,
/// singular functions first so every prefix holds all of them.
pub fn build_system(
    case: &ReferenceCase,
    variant: &Variant,
    monomials: usize,
    quadrature: &QuadratureParams,
) -> Result<(OrthonormalSystem, NodeSet)> {
    let basis = assemble_basis(&variant.spec(monomials), &case.boundary)?;
    let nodes = build_nodes(&case.boundary, quadrature);
    let system = orthonormalize_with(
        &basis,
        &nodes,
        case.z0,
        SingularPlacement::BeforePolynomials,
    )?;
    Ok((system, nodes))
}

/// Errors for one system at each row `n`, truncating the system to the
/// members given by [`row_members`].
pub fn sweep_errors(
    case: &ReferenceCase,
    system: &OrthonormalSystem,
    nodes: &NodeSet,
    ns: &[usize],
    quantity: Quantity,
    samples_per_arc: usize,
) -> Result<Vec<f64>> {
    match quantity {
        Quantity::L2 => ns
            .iter()
            .map(|&n| Ok(error_l2_direct(case, system, prefix(system, n)?, nodes)))
            .collect(),
        Quantity::Sup => ns
            .iter()
            .map(|&n| {
                let count = prefix(system, n)?;
                let approx = BieberbachApprox::new(system, count)?;
                error_sup(
                    |z| case.map.eval(z),
                    &approx,
                    &case.boundary,
                    samples_per_arc,
                )
            })
            .collect(),
        Quantity::Decay => {
            let seq = decay_sequence(system, system.len());
            ns.iter()
                .map(|&n| {
                    n.checked_sub(1)
                        .and_then(|j| seq.get(j).copied())
                        .ok_or_else(|| Error::Config(format!("member {n} outside the system")))
                })
                .collect()
        }
    }
}

fn prefix(system: &OrthonormalSystem, n: usize) -> Result<usize> {
    row_members(system, n)
        .ok_or_else(|| Error::Config(format!("no prefix of the system matches row {n}")))
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub table: ErrorTable,
    pub runs: Vec<VariantRun>,
}

/// Runs a full sweep: one orthonormalization per variant at the largest size.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let case = reference_case(&cfg.case)?;
    let ns = cfg.ns();
    let max_n = *ns.last().expect("validated range");
    let mut table = ErrorTable::new(format!("{} ({})", cfg.name, cfg.case), ns.clone());
    let mut runs = Vec::new();
    for variant in &cfg.variants {
        let monomials = max_n - variant.spec(0).singular_count();
        let (system, nodes) = build_system(&case, variant, monomials, &cfg.quadrature)?;
        for &q in &cfg.quantities {
            let values = sweep_errors(&case, &system, &nodes, &ns, q, cfg.samples_per_arc)?;
            let base = format!("{}_{}", variant.label, q.name());
            table.push_errors(base.clone(), &values);
            for &(rq, rv) in &cfg.rates {
                if rq == q {
                    let rate = rate_estimate(&ns, &values, rv, cfg.lag);
                    table.push_rate(format!("{base}_{}", rv.name()), &rate);
                }
            }
        }
        runs.push(VariantRun {
            variant: variant.clone(),
            system,
            nodes,
        });
    }
    Ok(ExperimentOutput { table, runs })
}
