use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::min_eigenvalue;

/// Trace-relative tolerance of the positive semidefiniteness tests.
pub const DEFAULT_PSD_TOL: f64 = 1e-8;

/// Outcome of the two-Hankel test for a Stieltjes moment sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HankelCheck {
    /// Size of `H_0 = [m_{i+j}]`.
    pub order: usize,
    pub h0_min_eig: f64,
    pub h0_trace: f64,
    pub h1_min_eig: f64,
    pub h1_trace: f64,
    pub pass: bool,
}

impl HankelCheck {
    pub fn h0_pass(&self, tol: f64) -> bool {
        self.h0_min_eig >= -tol * self.h0_trace
    }

    pub fn h1_pass(&self, tol: f64) -> bool {
        self.h1_min_eig >= -tol * self.h1_trace
    }
}

fn hankel(m: &[f64], offset: usize, size: usize) -> DMatrix<f64> {
    DMatrix::from_fn(size, size, |i, j| m[i + j + offset])
}

/// Tests `[m_{i+j}]` and `[m_{i+j+1}]` for positive semidefiniteness, each
/// against `−tol·trace`. With `L` entries the matrices have sizes
/// `⌊(L−1)/2⌋ + 1` and `⌊L/2⌋`.
pub fn stieltjes_check(m: &[f64], tol: f64) -> Result<HankelCheck> {
    if m.len() < 3 {
        return Err(Error::SequenceTooShort(m.len()));
    }
    if let Some(v) = m.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidArgument(format!("moment {v} is not a finite nonnegative number")));
    }
    let n0 = (m.len() - 1) / 2 + 1;
    let n1 = m.len() / 2;
    let h0 = hankel(m, 0, n0);
    let h1 = hankel(m, 1, n1);
    let mut out = HankelCheck {
        order: n0,
        h0_min_eig: min_eigenvalue(&h0),
        h0_trace: h0.trace(),
        h1_min_eig: min_eigenvalue(&h1),
        h1_trace: h1.trace(),
        pass: false,
    };
    out.pass = out.h0_pass(tol) && out.h1_pass(tol);
    Ok(out)
}
