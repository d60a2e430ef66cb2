//! The one-command reproduction runner: every corpus pair under every
//! model it declares a verdict for, with refinement certification and the
//! property-delta table.

use crate::corpus::{self, ConstructionPair};
use crate::distinguish::{refinement_verdict, run_trials, Model, TrialConfig, TrialReport, Verdict};
use crate::error::Result;
use serde::Serialize;

/// Acceptance bar for indistinguishable pairs: the largest observed gap
/// must sit at float-accumulation scale, well under the trial tolerance.
pub const INDISTINGUISHABLE_GAP_BAR: f64 = 1e-7;

#[derive(Debug, Clone, Serialize)]
pub struct VerdictOutcome {
    pub pair: String,
    pub model: Model,
    pub expected: Verdict,
    /// Refinement certificate where one applies (lu, cpn).
    pub refinement: Option<Verdict>,
    pub report: TrialReport,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyOutcome {
    pub pair: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproduceReport {
    pub verdicts: Vec<VerdictOutcome>,
    pub properties: Vec<PropertyOutcome>,
    pub all_pass: bool,
}

impl ReproduceReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            let status = if v.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "{status} {:<28} {:<10} expected {:<17} observed {:<17} max_gap {:.3e}{}\n",
                v.pair,
                v.model.to_string(),
                v.expected.to_string(),
                v.report.verdict.to_string(),
                v.report.max_gap,
                match v.refinement {
                    Some(r) => format!("  refinement {r}"),
                    None => String::new(),
                }
            ));
        }
        for p in &self.properties {
            let status = if p.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status} {:<28} properties {}\n", p.pair, p.detail));
        }
        out.push_str(if self.all_pass { "ALL PASS\n" } else { "FAILURES PRESENT\n" });
        out
    }
}

fn refinement_for(model: Model, pair: &ConstructionPair) -> Result<Option<Verdict>> {
    match model {
        Model::Lu => Ok(Some(refinement_verdict(&pair.graph_a, &pair.graph_b, false)?)),
        Model::Cpn => Ok(Some(refinement_verdict(&pair.graph_a, &pair.graph_b, true)?)),
        _ => Ok(None),
    }
}

/// Runs one pair/model cell of the verdict matrix.
pub fn check_pair_model(
    pair: &ConstructionPair,
    model: Model,
    expected: Verdict,
    cfg: &TrialConfig,
) -> Result<VerdictOutcome> {
    let report = run_trials(&pair.graph_a, &pair.graph_b, model, cfg)?;
    let refinement = refinement_for(model, pair)?;
    let (pass, detail) = match expected {
        Verdict::Indistinguishable => {
            if report.max_gap >= INDISTINGUISHABLE_GAP_BAR {
                (false, format!("gap {:.3e} above the {INDISTINGUISHABLE_GAP_BAR:.0e} bar", report.max_gap))
            } else if matches!(refinement, Some(Verdict::Distinguishable)) {
                (false, "refinement disagrees".into())
            } else {
                (true, "gaps at float scale".into())
            }
        }
        Verdict::Distinguishable => {
            if report.verdict != Verdict::Distinguishable {
                (false, format!("no separating draw above {:.0e}", cfg.tolerance))
            } else if matches!(refinement, Some(Verdict::Indistinguishable)) {
                (false, "refinement disagrees".into())
            } else {
                (
                    true,
                    format!(
                        "separated at trial {}",
                        report.first_separating_trial.expect("verdict implies a witness trial")
                    ),
                )
            }
        }
    };
    Ok(VerdictOutcome {
        pair: pair.name.to_string(),
        model,
        expected,
        refinement,
        report,
        pass,
        detail,
    })
}

/// Reproduces the whole expected-verdict matrix and property table.
pub fn reproduce_all(cfg: &TrialConfig) -> Result<ReproduceReport> {
    let mut verdicts = Vec::new();
    let mut properties = Vec::new();
    for (name, _) in corpus::list() {
        let pair = corpus::build(name)?;
        for (&model, &expected) in &pair.expected {
            verdicts.push(check_pair_model(&pair, model, expected, cfg)?);
        }
        // build() already re-derived the deltas; surface the table
        let detail = pair
            .deltas
            .iter()
            .map(|d| format!("{} = ({}, {})", d.property, d.value_a, d.value_b))
            .collect::<Vec<_>>()
            .join(", ");
        properties.push(PropertyOutcome {
            pair: name.to_string(),
            pass: pair.verify_deltas().is_ok(),
            detail,
        });
    }
    let all_pass = verdicts.iter().all(|v| v.pass) && properties.iter().all(|p| p.pass);
    Ok(ReproduceReport { verdicts, properties, all_pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_single_cell_runs() {
        let pair = corpus::build("fig1").unwrap();
        let cfg = TrialConfig { trials: 10, ..TrialConfig::default() };
        let outcome = check_pair_model(&pair, Model::Lu, Verdict::Indistinguishable, &cfg).unwrap();
        assert!(outcome.pass, "{}", outcome.detail);
    }
}
