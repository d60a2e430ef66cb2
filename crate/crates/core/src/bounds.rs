//! Closed-form evaluation of the Rademacher generalization bounds and
//! empirical verification of the perturbation inequalities behind them.
//!
//! Everything is driven by a flat [`BoundSpec`]: Lipschitz constants
//! (c_phi, c_rho, c_g), the activation output bound b, norm caps
//! (b_x, b_1, b_2, b_beta), embedding dimension r, branching factor d,
//! depth L, sample count m, margin gamma, confidence delta, and covering
//! radius epsilon. The percolation quantity C = c_rho c_g c_phi b_2
//! controls how perturbations propagate with depth; Cd relative to 1 sets
//! the growth regime.
//!
//! The verification suite evaluates complete d-ary trees under perturbed
//! weights and checks the measured quantities against the closed-form
//! bounds. A "depth L" tree here has L node levels (edge depth L - 1)
//! with childless leaves evaluating phi(W1 x); that is the convention the
//! inequalities are stated for, and with edge depth L the non-recursive
//! embedding-difference bound would not cover the extra bottom level.

use crate::engines::{
    eval_tree, eval_tree_parts, sigmoid, spectral_norm, ActivationSuite, GnnParams, NormCaps,
};
use crate::error::{Error, Result};
use crate::tree::{ComputationTree, TreeChild};
use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// All scalar inputs of the bound formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSpec {
    pub c_phi: f64,
    pub c_rho: f64,
    pub c_g: f64,
    /// Sup-norm output bound of phi.
    pub b: f64,
    pub b_x: f64,
    pub b_1: f64,
    pub b_2: f64,
    pub b_beta: f64,
    pub r: usize,
    /// Branching factor (0 allowed: isolated roots).
    pub d: usize,
    pub depth: usize,
    pub samples: usize,
    pub margin: f64,
    pub confidence: f64,
    pub epsilon: f64,
}

impl BoundSpec {
    /// The frozen reference spec: all constants 1, r = 8, d = 3, L = 3,
    /// m = 1000, gamma = 0.1, delta = 0.05, epsilon = 0.5.
    pub fn reference() -> Self {
        Self {
            c_phi: 1.0,
            c_rho: 1.0,
            c_g: 1.0,
            b: 1.0,
            b_x: 1.0,
            b_1: 1.0,
            b_2: 1.0,
            b_beta: 1.0,
            r: 8,
            d: 3,
            depth: 3,
            samples: 1000,
            margin: 0.1,
            confidence: 0.05,
            epsilon: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("c_phi", self.c_phi),
            ("c_rho", self.c_rho),
            ("c_g", self.c_g),
            ("b", self.b),
            ("b_x", self.b_x),
            ("b_1", self.b_1),
            ("b_2", self.b_2),
            ("b_beta", self.b_beta),
            ("gamma", self.margin),
            ("epsilon", self.epsilon),
        ];
        for (name, value) in positives {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidSpec(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "delta must lie in (0, 1), got {}",
                self.confidence
            )));
        }
        if self.r == 0 || self.depth == 0 || self.samples == 0 {
            return Err(Error::InvalidSpec("r, l, m must be positive integers".into()));
        }
        Ok(())
    }

    /// Parses the flat key = value text format ('#' starts a comment).
    /// Unspecified keys keep the reference values.
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = Self::reference();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim();
            let as_f64 = || -> Result<f64> {
                value
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad number {value}", lineno + 1)))
            };
            let as_usize = || -> Result<usize> {
                value
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("line {}: bad integer {value}", lineno + 1)))
            };
            match key {
                "c_phi" => spec.c_phi = as_f64()?,
                "c_rho" => spec.c_rho = as_f64()?,
                "c_g" => spec.c_g = as_f64()?,
                "b" => spec.b = as_f64()?,
                "b_x" => spec.b_x = as_f64()?,
                "b_1" => spec.b_1 = as_f64()?,
                "b_2" => spec.b_2 = as_f64()?,
                "b_beta" => spec.b_beta = as_f64()?,
                "r" => spec.r = as_usize()?,
                "d" => spec.d = as_usize()?,
                "l" | "L" => spec.depth = as_usize()?,
                "m" => spec.samples = as_usize()?,
                "gamma" => spec.margin = as_f64()?,
                "delta" => spec.confidence = as_f64()?,
                "epsilon" => spec.epsilon = as_f64()?,
                other => {
                    return Err(Error::Parse(format!("line {}: unknown key {other}", lineno + 1)))
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Percolation quantity C = c_rho c_g c_phi b_2.
pub fn percolation(spec: &BoundSpec) -> f64 {
    spec.c_rho * spec.c_g * spec.c_phi * spec.b_2
}

/// Window around Cd = 1 inside which the geometric series switches to its
/// limit value L.
const SERIES_LIMIT_WINDOW: f64 = 1e-12;

/// sum_{l=0}^{L-1} x^l, continuous through x = 1.
fn geometric_series(x: f64, depth: usize) -> f64 {
    if (x - 1.0).abs() < SERIES_LIMIT_WINDOW {
        depth as f64
    } else {
        (x.powi(depth as i32) - 1.0) / (x - 1.0)
    }
}

/// M = c_phi ((Cd)^L - 1)/(Cd - 1), resolved to c_phi L at Cd = 1.
pub fn compute_m(spec: &BoundSpec) -> f64 {
    spec.c_phi * geometric_series(percolation(spec) * spec.d as f64, spec.depth)
}

/// Rbar = c_rho c_g d min{b sqrt(r), c_phi b_1 b_x ((Cd)^L - 1)/(Cd - 1)}.
pub fn compute_rbar(spec: &BoundSpec) -> f64 {
    let series = geometric_series(percolation(spec) * spec.d as f64, spec.depth);
    let squash_branch = spec.b * (spec.r as f64).sqrt();
    let growth_branch = spec.c_phi * spec.b_1 * spec.b_x * series;
    spec.c_rho * spec.c_g * spec.d as f64 * squash_branch.min(growth_branch)
}

/// Z = c_phi b_1 b_x + c_phi b_2 Rbar.
pub fn compute_z(spec: &BoundSpec) -> f64 {
    spec.c_phi * spec.b_1 * spec.b_x + spec.c_phi * spec.b_2 * compute_rbar(spec)
}

/// The inner max{Z, M sqrt(r) max{b_x b_1, Rbar b_2}} shared by Q and the
/// covering bound.
fn inner_scale(spec: &BoundSpec) -> f64 {
    let m = compute_m(spec);
    let rbar = compute_rbar(spec);
    let z = compute_z(spec);
    z.max(m * (spec.r as f64).sqrt() * (spec.b_x * spec.b_1).max(rbar * spec.b_2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QBound {
    pub q: f64,
    /// Bound on the empirical Rademacher complexity of the margin-loss
    /// class: 4/(gamma m) + (24 r b_beta Z)/(gamma sqrt(m)) sqrt(3 ln Q).
    pub rademacher: f64,
    /// Set when Q <= 1, in which case only the 4/(gamma m) term is
    /// reported (the log factor would be meaningless).
    pub degenerate: bool,
}

/// Q = 24 b_beta sqrt(m) max{Z, M sqrt(r) max{b_x b_1, Rbar b_2}} and the
/// complexity bound built on it.
pub fn compute_q_and_bound(spec: &BoundSpec) -> QBound {
    let q = 24.0 * spec.b_beta * (spec.samples as f64).sqrt() * inner_scale(spec);
    let first = 4.0 / (spec.margin * spec.samples as f64);
    if q <= 1.0 {
        return QBound { q, rademacher: first, degenerate: true };
    }
    let z = compute_z(spec);
    let second = 24.0 * spec.r as f64 * spec.b_beta * z
        / (spec.margin * (spec.samples as f64).sqrt())
        * (3.0 * q.ln()).sqrt();
    QBound { q, rademacher: first + second, degenerate: false }
}

/// Population risk bound: empirical margin risk + twice the tree-level
/// complexity bound + the confidence term 3 sqrt(ln(2/delta) / (2m)).
pub fn population_bound(empirical_risk: f64, spec: &BoundSpec) -> f64 {
    let complexity = compute_q_and_bound(spec).rademacher;
    let confidence = 3.0 * ((2.0 / spec.confidence).ln() / (2.0 * spec.samples as f64)).sqrt();
    empirical_risk + 2.0 * complexity + confidence
}

/// log P = 3 r^2 ln(1 + 6 b_beta max{...} / epsilon).
pub fn covering_log_size(spec: &BoundSpec) -> f64 {
    3.0 * (spec.r as f64).powi(2)
        * (1.0 + 6.0 * spec.b_beta * inner_scale(spec) / spec.epsilon).ln()
}

/// One row of the growth-regime comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeRow {
    pub regime: &'static str,
    /// b_2 rescaled so Cd hits the regime's representative value.
    pub c_times_d: f64,
    pub gnn_scaling: &'static str,
    pub rnn_scaling: &'static str,
    pub bound: f64,
}

/// Evaluates the bound in the three regimes Cd = 0.5, 1, 2 (b_2 rescaled,
/// everything else from `base`), with the known GNN and recurrent-model
/// scalings alongside.
pub fn regime_table(base: &BoundSpec) -> Vec<RegimeRow> {
    let rows = [
        ("C < 1/d", 0.5, "O~(r d / (sqrt(m) gamma))", "O~(r / (sqrt(m) gamma))"),
        ("C = 1/d", 1.0, "O~(r d L / (sqrt(m) gamma))", "O~(r L / (sqrt(m) gamma))"),
        ("C > 1/d", 2.0, "O~(r d sqrt(r L) / (sqrt(m) gamma))", "O~(r sqrt(r L) / (sqrt(m) gamma))"),
    ];
    rows.iter()
        .map(|&(regime, cd, gnn, rnn)| {
            let spec = spec_with_cd(base, cd);
            RegimeRow {
                regime,
                c_times_d: cd,
                gnn_scaling: gnn,
                rnn_scaling: rnn,
                bound: compute_q_and_bound(&spec).rademacher,
            }
        })
        .collect()
}

/// Rescales b_2 so that Cd equals `target`.
pub fn spec_with_cd(base: &BoundSpec, target: f64) -> BoundSpec {
    let mut spec = *base;
    spec.b_2 = target / (spec.c_rho * spec.c_g * spec.c_phi * spec.d as f64);
    spec
}

/// The full report a spec evaluates to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub spec: BoundSpec,
    pub percolation: f64,
    pub regime: &'static str,
    pub m_value: f64,
    pub rbar: f64,
    pub z_value: f64,
    pub q_value: f64,
    pub rademacher_bound: f64,
    pub degenerate_q: bool,
    /// Present when an empirical risk was supplied.
    pub population_bound: Option<f64>,
    pub covering_log_size: f64,
    pub regime_rows: Vec<RegimeRow>,
    pub vc_comparison: String,
}

pub fn bound_report(
    spec: &BoundSpec,
    empirical_risk: Option<f64>,
    vc_nodes: Option<usize>,
) -> Result<BoundReport> {
    spec.validate()?;
    let cd = percolation(spec) * spec.d as f64;
    let regime = if (cd - 1.0).abs() < SERIES_LIMIT_WINDOW {
        "Cd = 1"
    } else if cd < 1.0 {
        "Cd < 1"
    } else {
        "Cd > 1"
    };
    let qb = compute_q_and_bound(spec);
    let vc_comparison = match vc_nodes {
        Some(n) => format!(
            "VC-based comparison: O~(r^3 N / sqrt(m)) = O~({:.6e}) at N = {n}",
            (spec.r as f64).powi(3) * n as f64 / (spec.samples as f64).sqrt()
        ),
        None => "VC-based comparison: O~(r^3 N / sqrt(m)) with N the maximum graph size".into(),
    };
    Ok(BoundReport {
        spec: *spec,
        percolation: percolation(spec),
        regime,
        m_value: compute_m(spec),
        rbar: compute_rbar(spec),
        z_value: compute_z(spec),
        q_value: qb.q,
        rademacher_bound: qb.rademacher,
        degenerate_q: qb.degenerate,
        population_bound: empirical_risk.map(|e| population_bound(e, spec)),
        covering_log_size: covering_log_size(spec),
        regime_rows: regime_table(spec),
        vc_comparison,
    })
}

impl std::fmt::Display for BoundReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "percolation C = {}", self.percolation)?;
        writeln!(f, "regime: {}", self.regime)?;
        writeln!(f, "M = {}", self.m_value)?;
        writeln!(f, "Rbar = {}", self.rbar)?;
        writeln!(f, "Z = {}", self.z_value)?;
        writeln!(f, "Q = {}", self.q_value)?;
        if self.degenerate_q {
            writeln!(f, "rademacher bound = {} (Q <= 1, log term dropped)", self.rademacher_bound)?;
        } else {
            writeln!(f, "rademacher bound = {}", self.rademacher_bound)?;
        }
        if let Some(p) = self.population_bound {
            writeln!(f, "population risk bound = {p}")?;
        }
        writeln!(f, "covering log size = {}", self.covering_log_size)?;
        writeln!(f, "regimes:")?;
        for row in &self.regime_rows {
            writeln!(
                f,
                "  {:8}  Cd = {:>3}  bound = {:<24}  gnn {}  rnn {}",
                row.regime, row.c_times_d, row.bound, row.gnn_scaling, row.rnn_scaling
            )?;
        }
        write!(f, "{}", self.vc_comparison)
    }
}

/// Complete d-ary tree with `levels` node levels (edge depth levels - 1),
/// features drawn uniformly and clipped into the b_x ball.
pub fn random_complete_tree(
    rng: &mut impl Rng,
    branch: usize,
    levels: usize,
    dim: usize,
    b_x: f64,
) -> ComputationTree {
    let mut features = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..=1.0));
    let norm = features.norm();
    if norm > b_x {
        features *= b_x / norm;
    }
    let children = if levels > 1 {
        (0..branch)
            .map(|_| TreeChild {
                ports: None,
                tree: random_complete_tree(rng, branch, levels - 1, dim, b_x),
            })
            .collect()
    } else {
        Vec::new()
    };
    ComputationTree { features: features.iter().copied().collect(), children, depth: levels - 1 }
}

/// Result of the perturbation verification run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub trials: usize,
    pub seed: u64,
    pub depth: usize,
    pub branch: usize,
    pub dim: usize,
    pub violations: usize,
    /// max over trials of measured / bound, per quantity; all must stay
    /// at or below 1.
    pub max_delta_ratio: f64,
    pub max_lambda_ratio: f64,
    pub max_aggregate_ratio: f64,
}

impl std::fmt::Display for PerturbationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "trials = {}  seed = {}  depth = {}  branch = {}  dim = {}",
            self.trials, self.seed, self.depth, self.branch, self.dim
        )?;
        writeln!(f, "violations = {}", self.violations)?;
        writeln!(f, "max embedding-shift ratio   = {:.6}", self.max_delta_ratio)?;
        writeln!(f, "max probability-shift ratio = {:.6}", self.max_lambda_ratio)?;
        write!(f, "max aggregate-norm ratio    = {:.6}", self.max_aggregate_ratio)
    }
}

/// Draws random weights plus perturbed copies (all inside unit caps) on
/// random complete d-ary trees and checks three measured quantities
/// against their closed-form bounds: the embedding shift at the root, the
/// probability shift under a classifier change, and the post-aggregation
/// norm. Any violation is an implementation bug, not randomness.
pub fn verify_perturbation_bounds(
    trials: usize,
    seed: u64,
    depth: usize,
    branch: usize,
    dim: usize,
) -> Result<PerturbationReport> {
    if depth == 0 || dim == 0 {
        return Err(Error::InvalidSpec("depth and dim must be positive".into()));
    }
    let spec = BoundSpec {
        r: dim,
        d: branch,
        depth,
        ..BoundSpec::reference()
    };
    let m_value = compute_m(&spec);
    let rbar = compute_rbar(&spec);
    let z_value = compute_z(&spec);
    let caps = NormCaps::default();
    let suite = ActivationSuite::default();

    let mut violations = 0usize;
    let mut max_delta_ratio = 0.0f64;
    let mut max_lambda_ratio = 0.0f64;
    let mut max_aggregate_ratio = 0.0f64;

    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64 + 1);
        let tree = random_complete_tree(&mut rng, branch, depth, dim, spec.b_x);
        let params = GnnParams::random_from(&mut rng, dim, depth, &caps, suite);
        let perturbed = GnnParams::random_from(&mut rng, dim, depth, &caps, suite);

        let (value, aggregate) = eval_tree_parts(&tree, &params)?;
        let value_p = eval_tree(&tree, &perturbed)?;

        let dw1 = spectral_norm(&(params.w1() - perturbed.w1()));
        let dw2 = spectral_norm(&(params.w2() - perturbed.w2()));
        let dbeta = (params.beta() - perturbed.beta()).norm();

        let delta_measured = (&value - &value_p).norm();
        let delta_bound = m_value * spec.b_x * dw1 + m_value * rbar * dw2;
        let lambda_measured =
            (sigmoid(params.beta().dot(&value)) - sigmoid(perturbed.beta().dot(&value_p))).abs();
        let lambda_bound = dbeta * z_value + spec.b_beta * delta_bound;
        let aggregate_measured = aggregate.norm();

        let ratios = [
            (delta_measured, delta_bound, &mut max_delta_ratio),
            (lambda_measured, lambda_bound, &mut max_lambda_ratio),
            (aggregate_measured, rbar, &mut max_aggregate_ratio),
        ];
        for (measured, bound, slot) in ratios {
            if measured > bound * (1.0 + 1e-12) {
                violations += 1;
            }
            if bound > 0.0 {
                *slot = slot.max(measured / bound);
            } else if measured > 0.0 {
                violations += 1;
            }
        }
        let _ = trial;
    }
    Ok(PerturbationReport {
        trials,
        seed,
        depth,
        branch,
        dim,
        violations,
        max_delta_ratio,
        max_lambda_ratio,
        max_aggregate_ratio,
    })
}
