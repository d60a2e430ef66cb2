//! Empirical distinguishability testing: randomized parameter trials plus
//! the refinement baseline.
//!
//! A pair is reported distinguishable when some draw separates the
//! readouts by more than the tolerance (an existential certificate).
//! Indistinguishability of corpus pairs is certified by the refinement
//! verdict; the trials corroborate it, since randomized trials alone
//! cannot prove impossibility.

use crate::engines::{
    classify_table, cpn_forward, dime_forward, dime_ports_forward, hdcpn_forward, lu_forward,
    readout, ActivationSuite, EmbeddingTable, GnnParams, NormCaps, ReadoutMode,
};
use crate::error::Result;
use crate::graph::Graph;
use crate::isomorphism::{are_lu_indistinguishable, are_port_locally_isomorphic};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The analyzed model families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Lu,
    Cpn,
    Dime,
    DimePorts,
    Hdcpn,
}

impl Model {
    pub fn parse(s: &str) -> Option<Model> {
        match s {
            "lu" => Some(Model::Lu),
            "cpn" => Some(Model::Cpn),
            "dime" => Some(Model::Dime),
            "dime_ports" | "dime-ports" => Some(Model::DimePorts),
            "hdcpn" => Some(Model::Hdcpn),
            _ => None,
        }
    }

    pub fn forward(self, g: &Graph, p: &GnnParams) -> Result<EmbeddingTable> {
        match self {
            Model::Lu => lu_forward(g, p),
            Model::Cpn => cpn_forward(g, p),
            Model::Dime => dime_forward(g, p),
            Model::DimePorts => dime_ports_forward(g, p),
            Model::Hdcpn => hdcpn_forward(g, p),
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Model::Lu => "lu",
            Model::Cpn => "cpn",
            Model::Dime => "dime",
            Model::DimePorts => "dime_ports",
            Model::Hdcpn => "hdcpn",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Distinguishable,
    Indistinguishable,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Distinguishable => write!(f, "distinguishable"),
            Verdict::Indistinguishable => write!(f, "indistinguishable"),
        }
    }
}

/// Trial configuration. Defaults: 200 trials, seed 0, r = 8, L = 3,
/// tolerance 1e-6, unit norm caps, tanh suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub trials: usize,
    pub seed: u64,
    pub dim: usize,
    pub layers: usize,
    pub tolerance: f64,
    pub caps: NormCaps,
    pub suite: ActivationSuite,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            trials: 200,
            seed: 0,
            dim: 8,
            layers: 3,
            tolerance: 1e-6,
            caps: NormCaps::default(),
            suite: ActivationSuite::default(),
        }
    }
}

/// Readout gaps of one trial: sup-norm differences per readout mode plus
/// the graph-probability difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialGaps {
    pub sum: f64,
    pub mean: f64,
    pub max: f64,
    pub prob: f64,
}

impl TrialGaps {
    pub fn largest(&self) -> f64 {
        self.sum.max(self.mean).max(self.max).max(self.prob)
    }
}

/// Outcome of a randomized trial run on one pair and model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub model: Model,
    pub trials: usize,
    pub seed: u64,
    pub dim: usize,
    pub layers: usize,
    pub tolerance: f64,
    pub per_trial: Vec<TrialGaps>,
    pub max_gap: f64,
    /// First trial index whose gap exceeds the tolerance, if any.
    pub first_separating_trial: Option<usize>,
    pub verdict: Verdict,
}

impl std::fmt::Display for TrialReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "model = {}  trials = {}  seed = {}  dim = {}  layers = {}  tolerance = {:e}",
            self.model, self.trials, self.seed, self.dim, self.layers, self.tolerance
        )?;
        writeln!(f, "max_gap = {:e}", self.max_gap)?;
        match self.first_separating_trial {
            Some(t) => writeln!(f, "first_separating_trial = {t}")?,
            None => writeln!(f, "first_separating_trial = none")?,
        }
        write!(f, "verdict = {}", self.verdict)
    }
}

/// Runs `cfg.trials` independent parameter draws on both graphs and
/// compares the three readouts plus the graph probability per draw.
/// Deterministic per seed: trial t draws from stream t of the seed.
pub fn run_trials(
    graph_a: &Graph,
    graph_b: &Graph,
    model: Model,
    cfg: &TrialConfig,
) -> Result<TrialReport> {
    let ga = graph_a.with_feature_dim(cfg.dim)?;
    let gb = graph_b.with_feature_dim(cfg.dim)?;
    let mut per_trial = Vec::with_capacity(cfg.trials);
    let mut max_gap = 0.0f64;
    let mut first_separating = None;
    for trial in 0..cfg.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(trial as u64 + 1);
        let params = GnnParams::random_from(&mut rng, cfg.dim, cfg.layers, &cfg.caps, cfg.suite);
        let table_a = model.forward(&ga, &params)?;
        let table_b = model.forward(&gb, &params)?;
        let gap_of = |mode: ReadoutMode| -> Result<f64> {
            let ra = readout(&table_a, mode)?;
            let rb = readout(&table_b, mode)?;
            Ok((ra - rb).amax())
        };
        let gaps = TrialGaps {
            sum: gap_of(ReadoutMode::Sum)?,
            mean: gap_of(ReadoutMode::Mean)?,
            max: gap_of(ReadoutMode::Max)?,
            prob: (classify_table(&table_a, params.beta())?
                - classify_table(&table_b, params.beta())?)
            .abs(),
        };
        let largest = gaps.largest();
        if largest > cfg.tolerance && first_separating.is_none() {
            first_separating = Some(trial);
        }
        max_gap = max_gap.max(largest);
        per_trial.push(gaps);
    }
    let verdict = if max_gap > cfg.tolerance {
        Verdict::Distinguishable
    } else {
        Verdict::Indistinguishable
    };
    Ok(TrialReport {
        model,
        trials: cfg.trials,
        seed: cfg.seed,
        dim: cfg.dim,
        layers: cfg.layers,
        tolerance: cfg.tolerance,
        per_trial,
        max_gap,
        first_separating_trial: first_separating,
        verdict,
    })
}

/// The refinement baseline: port-local isomorphism when `with_ports`,
/// color refinement otherwise. Indistinguishable here is a proof, not an
/// estimate.
pub fn refinement_verdict(graph_a: &Graph, graph_b: &Graph, with_ports: bool) -> Result<Verdict> {
    let indistinguishable = if with_ports {
        are_port_locally_isomorphic(graph_a, graph_b)?.0
    } else {
        are_lu_indistinguishable(graph_a, graph_b)?
    };
    Ok(if indistinguishable {
        Verdict::Indistinguishable
    } else {
        Verdict::Distinguishable
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::error::Error;

    fn quick_cfg() -> TrialConfig {
        TrialConfig { trials: 20, ..TrialConfig::default() }
    }

    #[test]
    fn missing_layer_errors_propagate() {
        let g = Graph::new(vec![vec![0.0; 8]; 2], &[(0, 1)]).unwrap();
        let err = run_trials(&g, &g, Model::Dime, &quick_cfg());
        assert!(matches!(err, Err(Error::MissingPositions)));
        let err = run_trials(&g, &g, Model::Cpn, &quick_cfg());
        assert!(matches!(err, Err(Error::MissingPorts)));
    }

    #[test]
    fn reports_are_seed_stable() {
        let pair = corpus::build("fig1").unwrap();
        let cfg = quick_cfg();
        let a = run_trials(&pair.graph_a, &pair.graph_b, Model::Cpn, &cfg).unwrap();
        let b = run_trials(&pair.graph_a, &pair.graph_b, Model::Cpn, &cfg).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn identical_graphs_never_separate() {
        let pair = corpus::build("fig3_s4s8").unwrap();
        let report =
            run_trials(&pair.graph_b, &pair.graph_b, Model::Cpn, &quick_cfg()).unwrap();
        assert_eq!(report.verdict, Verdict::Indistinguishable);
        assert_eq!(report.max_gap, 0.0);
    }

    #[test]
    fn refinement_verdicts_on_fig1() {
        let pair = corpus::build("fig1").unwrap();
        assert_eq!(
            refinement_verdict(&pair.graph_a, &pair.graph_b, false).unwrap(),
            Verdict::Indistinguishable
        );
        assert_eq!(
            refinement_verdict(&pair.graph_a, &pair.graph_b, true).unwrap(),
            Verdict::Distinguishable
        );
    }

    #[test]
    fn refinement_verdict_on_fig2_is_indistinguishable() {
        let pair = corpus::build("fig2").unwrap();
        assert_eq!(
            refinement_verdict(&pair.graph_a, &pair.graph_b, true).unwrap(),
            Verdict::Indistinguishable
        );
    }
}
