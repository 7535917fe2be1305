//! Composition operators `C_A f = f∘A` on Gaussian-type weighted `L²` spaces
//! over `ℝ^κ`, with numerical certificates for subnormality and
//! cosubnormality.
//!
//! The measures are `μ_γ = γ(|x|²_P) dx` and `μ_{1/γ}`, where `γ` is a
//! polynomial or the exponential with nonnegative coefficients and `P`
//! defines the inner product on `ℝ^κ`.

pub mod certificates;
pub mod error;
pub mod functions;
pub mod linalg;
pub mod operators;
pub mod quadrature;
pub mod weights;

pub use certificates::{CertificateReport, EvidenceRecord, Prediction, ReportConfig, Residual, Status, Verdict};
pub use error::{Error, Result};
pub use functions::{Decay, Evaluable, Polynomial, Region, SimpleFunction, TestFunction};
pub use linalg::{InnerProduct, MatrixSymbol, SymbolSummary};
pub use operators::{CompositionOperatorRep, WeightedCompositionRep};
pub use weights::{Boundedness, BoundednessVerdict, Side, WeightKind, WeightSeries, WeightedMeasure};
