//! Radial weights `γ(|x|²_P)` with nonnegative power-series coefficients,
//! the measures they induce, and the Radon–Nikodym density `h_A` of
//! `μ∘A⁻¹` with respect to `μ`.

mod boundedness;

pub use boundedness::{
    classify_boundedness, classify_boundedness_with, Boundedness, BoundednessVerdict,
    MultistartConfig, SupSource, WitnessPoint,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{InnerProduct, MatrixSymbol};

/// Declared evaluation radius of the exponential weight; `exp(t)` stays
/// finite for `t` below it.
pub const EXP_RADIUS: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WeightKind {
    Polynomial,
    Entire,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Poly(Vec<f64>),
    Exp,
}

/// A weight `γ(t) = Σ a_n tⁿ` with `a_n ≥ 0` and `a_k > 0` for some `k ≥ 1`.
///
/// The exponential weight is kept symbolic so that ratios `γ(s)/γ(t)` are
/// evaluated as `exp(s − t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSeries {
    repr: Repr,
}

impl WeightSeries {
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidWeight(
                "coefficients must be finite and nonnegative".into(),
            ));
        }
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        if !coeffs.iter().skip(1).any(|c| *c > 0.0) {
            return Err(Error::InvalidWeight(
                "some coefficient a_k with k >= 1 must be positive".into(),
            ));
        }
        Ok(Self {
            repr: Repr::Poly(coeffs),
        })
    }

    /// `γ(t) = eᵗ`, i.e. `a_n = 1/n!`.
    pub fn exp() -> Self {
        Self { repr: Repr::Exp }
    }

    pub fn kind(&self) -> WeightKind {
        match self.repr {
            Repr::Poly(_) => WeightKind::Polynomial,
            Repr::Exp => WeightKind::Entire,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.kind() == WeightKind::Polynomial
    }

    /// Degree for polynomial weights, `None` for entire ones.
    pub fn degree(&self) -> Option<usize> {
        match &self.repr {
            Repr::Poly(c) => Some(c.len() - 1),
            Repr::Exp => None,
        }
    }

    pub fn coeff(&self, n: usize) -> f64 {
        match &self.repr {
            Repr::Poly(c) => c.get(n).copied().unwrap_or(0.0),
            Repr::Exp => {
                let mut v = 1.0;
                for j in 1..=n {
                    v /= j as f64;
                }
                v
            }
        }
    }

    /// Explicit coefficient list of a polynomial weight.
    pub fn coeffs(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Poly(c) => Some(c),
            Repr::Exp => None,
        }
    }

    /// Smallest index with a positive coefficient.
    pub fn lowest_index(&self) -> usize {
        match &self.repr {
            Repr::Poly(c) => c.iter().position(|v| *v > 0.0).unwrap_or(0),
            Repr::Exp => 0,
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("weight argument {t} must be >= 0")));
        }
        match &self.repr {
            Repr::Poly(c) => Ok(horner(c, t)),
            Repr::Exp => {
                if t > EXP_RADIUS {
                    return Err(Error::OutsideRadius {
                        t,
                        radius: EXP_RADIUS,
                    });
                }
                Ok(t.exp())
            }
        }
    }

    /// `ln γ(t)`; defined for all `t ≥ 0` (no radius restriction).
    pub fn ln_eval(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Poly(c) => horner(c, t).ln(),
            Repr::Exp => t,
        }
    }

    /// `γ'(t)/γ(t)`.
    pub(crate) fn log_derivative(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Poly(c) => {
                let d: Vec<f64> = c
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(n, a)| n as f64 * a)
                    .collect();
                horner(&d, t) / horner(c, t)
            }
            Repr::Exp => 1.0,
        }
    }

    /// `ln(γ(s)/γ(t))`, evaluated without forming either value for the
    /// exponential weight.
    pub fn ln_ratio(&self, s: f64, t: f64) -> f64 {
        match &self.repr {
            Repr::Poly(c) => (horner(c, s) / horner(c, t)).ln(),
            Repr::Exp => s - t,
        }
    }

    /// `γ(s)/γ(t)`.
    pub fn ratio(&self, s: f64, t: f64) -> f64 {
        match &self.repr {
            Repr::Poly(c) => horner(c, s) / horner(c, t),
            Repr::Exp => (s - t).exp(),
        }
    }

    /// The polynomial `γ_k(t) = Σ_{n ≤ k} a_n tⁿ`.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        let coeffs: Vec<f64> = (0..=k).map(|n| self.coeff(n)).collect();
        Self::polynomial(coeffs).map_err(|_| {
            Error::InvalidWeight(format!(
                "truncation at k = {k} leaves no positive coefficient of index >= 1"
            ))
        })
    }

    /// Raw truncated coefficients `(a_0, …, a_k)`, without the class check.
    pub fn truncated_coeffs(&self, k: usize) -> Vec<f64> {
        (0..=k).map(|n| self.coeff(n)).collect()
    }

    pub fn label(&self) -> String {
        match &self.repr {
            Repr::Poly(c) => format!("poly{c:?}"),
            Repr::Exp => "exp".into(),
        }
    }
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * t + a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Side {
    /// density `γ(|x|²_P)`
    Direct,
    /// density `1/γ(|x|²_P)`
    Reciprocal,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Direct => 1.0,
            Side::Reciprocal => -1.0,
        }
    }
}

/// Lebesgue measure on ℝ^κ weighted by `γ(|x|²_P)` or its reciprocal.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMeasure {
    weight: WeightSeries,
    side: Side,
    inner: InnerProduct,
}

impl WeightedMeasure {
    pub fn new(weight: WeightSeries, side: Side, inner: InnerProduct) -> Self {
        Self {
            weight,
            side,
            inner,
        }
    }

    pub fn direct(weight: WeightSeries, inner: InnerProduct) -> Self {
        Self::new(weight, Side::Direct, inner)
    }

    pub fn reciprocal(weight: WeightSeries, inner: InnerProduct) -> Self {
        Self::new(weight, Side::Reciprocal, inner)
    }

    pub fn weight(&self) -> &WeightSeries {
        &self.weight
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn inner(&self) -> &InnerProduct {
        &self.inner
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Same weight and geometry on the other side.
    pub fn flipped(&self) -> Self {
        let side = match self.side {
            Side::Direct => Side::Reciprocal,
            Side::Reciprocal => Side::Direct,
        };
        Self::new(self.weight.clone(), side, self.inner.clone())
    }

    pub fn with_weight(&self, weight: WeightSeries) -> Self {
        Self::new(weight, self.side, self.inner.clone())
    }

    /// `ln ρ(x)`; `-inf` or `+inf` at a zero of `γ`.
    pub fn ln_density(&self, x: &[f64]) -> f64 {
        self.side.sign() * self.weight.ln_eval(self.inner.norm_sq(x))
    }

    /// The density `ρ(x)` of the measure with respect to Lebesgue measure.
    pub fn density(&self, x: &[f64]) -> f64 {
        let t = self.inner.norm_sq(x);
        match (&self.weight.repr, self.side) {
            (Repr::Poly(c), Side::Direct) => horner(c, t),
            (Repr::Poly(c), Side::Reciprocal) => 1.0 / horner(c, t),
            (Repr::Exp, Side::Direct) => t.exp(),
            (Repr::Exp, Side::Reciprocal) => (-t).exp(),
        }
    }

    /// `ρ(y)/ρ(x)`, stable for the exponential weight.
    pub fn density_ratio(&self, y: &[f64], x: &[f64]) -> f64 {
        let s = self.inner.norm_sq(y);
        let t = self.inner.norm_sq(x);
        match self.side {
            Side::Direct => self.weight.ratio(s, t),
            Side::Reciprocal => self.weight.ratio(t, s),
        }
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: n,
            });
        }
        Ok(())
    }
}

/// `ln h_A(x)`.
pub fn ln_density_h(mu: &WeightedMeasure, a: &MatrixSymbol, x: &[f64]) -> Result<f64> {
    mu.check_dim(a.dim())?;
    mu.check_dim(x.len())?;
    let t = mu.inner.norm_sq(x);
    if t == 0.0 && mu.weight.coeff(0) == 0.0 {
        return Err(Error::ZeroDensityPoint);
    }
    let s = mu.inner.norm_sq(&a.apply_inverse(x));
    Ok(mu.side.sign() * mu.weight.ln_ratio(s, t) - a.absdet().ln())
}

/// Radon–Nikodym derivative `h_A = d(μ∘A⁻¹)/dμ` at `x`:
/// `(1/|det A|)·γ(|A⁻¹x|²)/γ(|x|²)` on the direct side and the reciprocal
/// ratio on the other.
pub fn density_h(mu: &WeightedMeasure, a: &MatrixSymbol, x: &[f64]) -> Result<f64> {
    mu.check_dim(a.dim())?;
    mu.check_dim(x.len())?;
    let t = mu.inner.norm_sq(x);
    if t == 0.0 && mu.weight.coeff(0) == 0.0 {
        return Err(Error::ZeroDensityPoint);
    }
    let s = mu.inner.norm_sq(&a.apply_inverse(x));
    let ratio = match mu.side {
        Side::Direct => mu.weight.ratio(s, t),
        Side::Reciprocal => mu.weight.ratio(t, s),
    };
    Ok(ratio / a.absdet())
}

/// Gradient of `ln h_A` at `x` (for `x ≠ 0`).
pub(crate) fn grad_ln_density_h(mu: &WeightedMeasure, a: &MatrixSymbol, x: &[f64]) -> Vec<f64> {
    let p = mu.inner.gram();
    let y = a.apply_inverse(x);
    let s = mu.inner.norm_sq(&y);
    let t = mu.inner.norm_sq(x);
    let ds = mu.weight.log_derivative(s);
    let dt = mu.weight.log_derivative(t);
    let n = x.len();
    // ∇s = 2 A⁻ᵀ P y, ∇t = 2 P x
    let py: Vec<f64> = (0..n).map(|i| (0..n).map(|j| p[(i, j)] * y[j]).sum()).collect();
    let px: Vec<f64> = (0..n).map(|i| (0..n).map(|j| p[(i, j)] * x[j]).sum()).collect();
    let inv = a.inverse();
    let sign = mu.side.sign();
    (0..n)
        .map(|i| {
            let grad_s: f64 = 2.0 * (0..n).map(|j| inv[(j, i)] * py[j]).sum::<f64>();
            sign * (ds * grad_s - dt * 2.0 * px[i])
        })
        .collect()
}
