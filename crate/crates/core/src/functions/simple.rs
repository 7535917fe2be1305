use crate::error::{Error, Result};
use crate::linalg::InnerProduct;

use super::{Decay, Evaluable};

/// Bounded Borel set carrying an indicator.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    /// Half-open box `[lo, hi)`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Closed P-ball `{x : |x − center|_P ≤ radius}`.
    Ball { center: Vec<f64>, radius: f64 },
}

impl Region {
    fn contains(&self, x: &[f64], inner: &InnerProduct) -> bool {
        match self {
            Region::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| *v >= *l && *v < *h),
            Region::Ball { center, radius } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
                inner.norm_sq(&d) <= radius * radius
            }
        }
    }

    /// Euclidean radius of a ball around the origin containing the region.
    fn extent(&self, inner: &InnerProduct) -> f64 {
        match self {
            Region::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| l.abs().max(h.abs()).powi(2))
                .sum::<f64>()
                .sqrt(),
            Region::Ball { center, radius } => {
                let c = center.iter().map(|v| v * v).sum::<f64>().sqrt();
                c + radius * crate::linalg::spectral_norm(inner.inv_factor())
            }
        }
    }
}

/// `Σ c_i χ_{σ_i}` over boxes and P-balls.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleFunction {
    inner: InnerProduct,
    pieces: Vec<(f64, Region)>,
}

impl SimpleFunction {
    pub fn new(inner: InnerProduct) -> Self {
        Self {
            inner,
            pieces: Vec::new(),
        }
    }

    pub fn push(&mut self, coeff: f64, region: Region) -> Result<()> {
        let n = self.inner.dim();
        if !coeff.is_finite() {
            return Err(Error::InvalidArgument("non-finite indicator coefficient".into()));
        }
        match &region {
            Region::Box { lo, hi } => {
                if lo.len() != n || hi.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: lo.len().max(hi.len()),
                    });
                }
                if lo.iter().chain(hi).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidArgument("unbounded box".into()));
                }
            }
            Region::Ball { center, radius } => {
                if center.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: center.len(),
                    });
                }
                if !(radius.is_finite() && *radius >= 0.0) {
                    return Err(Error::InvalidArgument("ball radius must be finite".into()));
                }
            }
        }
        self.pieces.push((coeff, region));
        Ok(())
    }

    pub fn pieces(&self) -> &[(f64, Region)] {
        &self.pieces
    }
}

impl Evaluable for SimpleFunction {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.pieces
            .iter()
            .filter(|(_, r)| r.contains(x, &self.inner))
            .map(|(c, _)| c)
            .sum()
    }

    fn decay(&self) -> Decay {
        let r = self
            .pieces
            .iter()
            .map(|(_, reg)| reg.extent(&self.inner))
            .fold(0.0, f64::max);
        Decay::compact(self.dim(), r)
    }
}
