//! Numerical certificates for (co)subnormality of composition operators:
//! Hankel/Stieltjes checks, Bram-form positivity, coefficient-system
//! screening, unitary-equivalence residuals, core density and the report
//! pipelines assembling them.

mod csz;
mod density;
mod hankel;
mod reports;

pub use csz::{csz_positivity_check, CoefficientSystem, CszOutcome, CszSampler, Screen};
pub use density::{core_density_check, CoreDensityConfig, CoreDensityResult};
pub use hankel::{stieltjes_check, HankelCheck, DEFAULT_PSD_TOL};
pub use reports::{
    adjoint_moment_crosscheck, cosubnormality_report, equivalence_residual, falsification_search,
    subnormality_report, AdjointCrosscheck, FalsificationBudget, FalsificationOutcome, FalsificationStatus,
    ReportConfig, Witness,
};

use serde::Serialize;

use crate::linalg::SymbolSummary;

/// What the normality criterion predicts for the operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Prediction {
    Subnormal,
    Cosubnormal,
    NotPredicted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Consistent,
    Violation,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    /// Not evaluated, e.g. because an iterate left the domain.
    Skipped,
}

/// Statement a piece of evidence instantiates.
pub mod statements {
    pub const SUBNORMAL: &str = "A normal => C_A subnormal in L2(mu_gamma)";
    pub const COSUBNORMAL: &str = "A normal => C_A cosubnormal in L2(mu_1/gamma)";
    pub const BOUNDED_CONVERSE: &str = "C_A bounded: C_A subnormal iff A normal";
    pub const TOWER: &str = "L2(mu_gamma_k) decreases to L2(mu_gamma)";
    pub const EQUIVALENCE: &str = "C_{A^-1} U = U |det A| C_A*";
    pub const CORE: &str = "simple functions are a core of C_A";
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvidenceRecord {
    pub name: String,
    pub instantiates: &'static str,
    pub min_eig: Option<f64>,
    /// Trace of the tested matrix; the PSD test is `min_eig ≥ −tol·scale`.
    pub scale: Option<f64>,
    pub order: usize,
    /// Whether the prediction requires this evidence to pass.
    pub required: bool,
    /// Evidence from sampling rather than exhaustive verification.
    pub sampled: bool,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl EvidenceRecord {
    pub fn psd(name: impl Into<String>, instantiates: &'static str, min_eig: f64, scale: f64, order: usize, tol: f64, required: bool) -> Self {
        let status = if min_eig >= -tol * scale {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            name: name.into(),
            instantiates,
            min_eig: Some(min_eig),
            scale: Some(scale),
            order,
            required,
            sampled: false,
            status,
            note: None,
        }
    }

    pub fn skipped(name: impl Into<String>, instantiates: &'static str, required: bool, note: String) -> Self {
        Self {
            name: name.into(),
            instantiates,
            min_eig: None,
            scale: None,
            order: 0,
            required,
            sampled: false,
            status: Status::Skipped,
            note: Some(note),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub name: String,
    pub instantiates: &'static str,
    pub value: f64,
    pub bound: f64,
}

impl Residual {
    pub fn within_bound(&self) -> bool {
        self.value <= self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub prediction: Prediction,
    pub symbol: SymbolSummary,
    pub weight: String,
    pub evidence: Vec<EvidenceRecord>,
    pub residuals: Vec<Residual>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub adjoint_crosschecks: Vec<AdjointCrosscheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub falsification: Option<FalsificationOutcome>,
    pub verdict: Verdict,
}

impl CertificateReport {
    /// VIOLATION when a residual exceeds its bound or evidence required by
    /// the prediction fails; CONSISTENT when a prediction is made and all
    /// required evidence passes; INCONCLUSIVE otherwise.
    pub fn decide(prediction: Prediction, evidence: &[EvidenceRecord], residuals: &[Residual]) -> Verdict {
        let residual_breach = residuals.iter().any(|r| !r.within_bound());
        let required_failure = evidence.iter().any(|e| e.required && e.status == Status::Fail);
        if residual_breach || required_failure {
            Verdict::Violation
        } else if prediction == Prediction::NotPredicted {
            Verdict::Inconclusive
        } else {
            Verdict::Consistent
        }
    }
}
