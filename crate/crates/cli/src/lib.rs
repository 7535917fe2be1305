//! Batch front end: reads a JSON run configuration, runs one certificate
//! pipeline and produces a JSON report.

pub mod config;

use anyhow::Result;
use cosub_core::certificates::{
    core_density_check, cosubnormality_report, falsification_search, subnormality_report, CoreDensityConfig,
    CoreDensityResult, FalsificationOutcome, FalsificationStatus,
};
use cosub_core::quadrature::{tower_norms, TowerNorms};
use cosub_core::weights::classify_boundedness;
use cosub_core::{
    Boundedness, CertificateReport, CompositionOperatorRep, Error, Side, SymbolSummary, Verdict, WeightKind,
    WeightedMeasure,
};
use serde::Serialize;

pub use config::{Overrides, Resolved, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Report,
    CertifySubnormal,
    CertifyCosubnormal,
    Norm,
    Tower,
    Density,
    Falsify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Report => "report",
            Command::CertifySubnormal => "certify-subnormal",
            Command::CertifyCosubnormal => "certify-cosubnormal",
            Command::Norm => "norm",
            Command::Tower => "tower",
            Command::Density => "density",
            Command::Falsify => "falsify",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TowerEntry {
    pub function: usize,
    #[serde(flatten)]
    pub norms: TowerNorms,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityEntry {
    pub function: usize,
    #[serde(flatten)]
    pub result: CoreDensityResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct FalsifyEntry {
    pub level: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<FalsificationOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub seed: u64,
    pub symbol: SymbolSummary,
    pub weight: String,
    pub side: Side,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Boundedness>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<CertificateReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tower: Vec<TowerEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub density: Vec<DensityEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub falsification: Vec<FalsifyEntry>,
    pub verdict: Verdict,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// 0 for CONSISTENT or INCONCLUSIVE, 2 for VIOLATION.
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Violation => 2,
            Verdict::Consistent | Verdict::Inconclusive => 0,
        }
    }
}

fn worst(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut out = Verdict::Consistent;
    for v in verdicts {
        match v {
            Verdict::Violation => return Verdict::Violation,
            Verdict::Inconclusive => out = Verdict::Inconclusive,
            Verdict::Consistent => {}
        }
    }
    out
}

/// Kronrod nodes a default density grid may use per step.
const DENSITY_NODE_BUDGET: f64 = 4e6;

/// The library default grid, keeping only the steps affordable in `dim`.
/// Above one dimension the cube shrinks to radius 4; the neglected tail
/// still enters the reported errors.
fn default_density(dim: usize) -> Result<CoreDensityConfig> {
    let mut cfg = CoreDensityConfig::default();
    if dim > 1 {
        cfg.radius = 4.0;
    }
    let nodes = |h: f64| (2.0 * cfg.radius / h).round().powi(dim as i32) * 15f64.powi(dim as i32);
    cfg.steps.retain(|&h| nodes(h) <= DENSITY_NODE_BUDGET);
    if cfg.steps.len() < 2 {
        anyhow::bail!("core_density: the default grid is too fine in dimension {dim}; set core_density.radius and core_density.steps");
    }
    Ok(cfg)
}

pub fn run(command: Command, cfg: &Resolved) -> Result<RunReport> {
    let r = &cfg.report;
    let mu = WeightedMeasure::new(cfg.weight.clone(), cfg.side, cfg.inner.clone());
    let mut out = RunReport {
        command: command.name(),
        seed: r.seed,
        symbol: SymbolSummary::new(&cfg.symbol, &cfg.inner, r.normality_tol)?,
        weight: cfg.weight.label(),
        side: cfg.side,
        classification: None,
        certificates: Vec::new(),
        tower: Vec::new(),
        density: Vec::new(),
        falsification: Vec::new(),
        verdict: Verdict::Inconclusive,
    };
    let subnormal = || subnormality_report(&cfg.symbol, &cfg.inner, &cfg.weight, r);
    let cosubnormal = || cosubnormality_report(&cfg.symbol, &cfg.inner, &cfg.weight, r);
    match command {
        Command::Report => {
            out.classification = Some(classify_boundedness(&mu, &cfg.symbol)?);
            out.certificates.push(match cfg.side {
                Side::Direct => subnormal()?,
                Side::Reciprocal => cosubnormal()?,
            });
            out.verdict = out.certificates[0].verdict;
        }
        Command::CertifySubnormal => {
            out.certificates.push(subnormal()?);
            out.verdict = out.certificates[0].verdict;
        }
        Command::CertifyCosubnormal => {
            out.certificates.push(cosubnormal()?);
            out.verdict = out.certificates[0].verdict;
        }
        Command::Norm => {
            out.classification = Some(classify_boundedness(&mu, &cfg.symbol)?);
            out.verdict = Verdict::Consistent;
        }
        Command::Tower => {
            for (i, f) in r.test_functions.iter().enumerate() {
                let norms = tower_norms(f, &cfg.weight, r.tower_kmax, &cfg.inner)?;
                out.tower.push(TowerEntry { function: i, norms });
            }
            // the tower of spaces is nested, so norms must not decrease
            out.verdict = if out.tower.iter().all(|t| t.norms.monotone) {
                Verdict::Consistent
            } else {
                Verdict::Violation
            };
        }
        Command::Density => {
            let c = CompositionOperatorRep::new(cfg.symbol.clone(), mu)?;
            let dcfg = match &r.core_density {
                Some(d) => d.clone(),
                None => default_density(c.dim())?,
            };
            for (i, f) in r.test_functions.iter().enumerate() {
                let result = core_density_check(&c, f, &dcfg)?;
                out.density.push(DensityEntry { function: i, result });
            }
            // sampled evidence: a non-decreasing error sequence is inconclusive
            out.verdict = if out.density.iter().all(|d| d.result.strictly_decreasing) {
                Verdict::Consistent
            } else {
                Verdict::Inconclusive
            };
        }
        Command::Falsify => {
            let budget = r.falsification.unwrap_or_default();
            let dict = if r.dictionary.is_empty() {
                &r.test_functions
            } else {
                &r.dictionary
            };
            let levels: Vec<(String, WeightedMeasure)> = if cfg.weight.kind() == WeightKind::Entire {
                r.truncations
                    .iter()
                    .map(|&k| Ok((format!("gamma_{k}"), mu.with_weight(cfg.weight.truncate(k)?))))
                    .collect::<Result<_>>()?
            } else {
                vec![("gamma".into(), mu.clone())]
            };
            let mut verdicts = Vec::new();
            for (level, space) in levels {
                let c = CompositionOperatorRep::new(cfg.symbol.clone(), space)?;
                match falsification_search(&c, dict, r.maxpow, &budget) {
                    Ok(outcome) => {
                        // a witness contradicts subnormality, which a normal symbol guarantees
                        verdicts.push(match (outcome.status, out.symbol.normal) {
                            (FalsificationStatus::Witness, true) => Verdict::Violation,
                            (FalsificationStatus::Witness, false) => Verdict::Consistent,
                            (FalsificationStatus::Inconclusive, _) => Verdict::Inconclusive,
                        });
                        out.falsification.push(FalsifyEntry {
                            level,
                            outcome: Some(outcome),
                            note: None,
                        });
                    }
                    Err(Error::Unbounded) => {
                        verdicts.push(Verdict::Inconclusive);
                        out.falsification.push(FalsifyEntry {
                            level,
                            outcome: None,
                            note: Some(Error::Unbounded.to_string()),
                        });
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            out.verdict = worst(verdicts);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worst_verdict_order() {
        use Verdict::*;
        assert_eq!(worst([Consistent, Consistent]), Consistent);
        assert_eq!(worst([Consistent, Inconclusive]), Inconclusive);
        assert_eq!(worst([Inconclusive, Violation, Consistent]), Violation);
    }

    #[test]
    fn violation_exits_two() {
        let text = r#"{"dim": 1, "matrix": [2], "weight": [1, 1]}"#;
        let cfg = RunConfig::parse(text).unwrap().resolve(Overrides::default()).unwrap();
        let mut report = run(Command::Norm, &cfg).unwrap();
        assert_eq!(report.exit_code(), 0);
        report.verdict = Verdict::Violation;
        assert_eq!(report.exit_code(), 2);
        report.verdict = Verdict::Inconclusive;
        assert_eq!(report.exit_code(), 0);
    }
}
