//! Composition operators `C_A f = f∘A`, weighted compositions
//! `W_{B,w} f = w·(f∘B)` (which include the adjoint `C_A* = W_{A⁻¹,h_A}`),
//! and the unitary `U f = f/γ(|x|²_P)` from `L²(μ_{1/γ})` onto `L²(μ_γ)`.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::{Decay, Evaluable, Polynomial, TestFunction};
use crate::linalg::{InnerProduct, MatrixSymbol};
use crate::quadrature::{inner_product, norm_sq};
use crate::weights::{
    classify_boundedness, density_h, Boundedness, Side, WeightKind, WeightSeries, WeightedMeasure,
};

/// Shared handle to an evaluable function.
pub type SharedEvaluable = Arc<dyn Evaluable + Send + Sync>;

/// `C_A` acting in `L²(μ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionOperatorRep {
    symbol: MatrixSymbol,
    space: WeightedMeasure,
}

impl CompositionOperatorRep {
    pub fn new(symbol: MatrixSymbol, space: WeightedMeasure) -> Result<Self> {
        if symbol.dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: symbol.dim(),
            });
        }
        Ok(Self { symbol, space })
    }

    pub fn symbol(&self) -> &MatrixSymbol {
        &self.symbol
    }

    pub fn space(&self) -> &WeightedMeasure {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.symbol.dim()
    }

    /// `C_A f`. Both `f` and the image must lie in the space.
    pub fn apply(&self, f: &TestFunction) -> Result<TestFunction> {
        f.check_membership(&self.space)?;
        let g = f.compose_linear(&self.symbol)?;
        g.check_membership(&self.space)
            .map_err(|e| Error::NotInSpace(format!("f is not in the domain of C_A: {e}")))?;
        Ok(g)
    }

    /// `C_Aⁿ f`, checking every iterate.
    pub fn apply_power(&self, f: &TestFunction, n: usize) -> Result<TestFunction> {
        let mut g = f.clone();
        for _ in 0..n {
            g = self.apply(&g)?;
        }
        Ok(g)
    }

    /// `h_A(x)`.
    pub fn density(&self, x: &[f64]) -> Result<f64> {
        density_h(&self.space, &self.symbol, x)
    }

    pub fn boundedness(&self) -> Result<Boundedness> {
        classify_boundedness(&self.space, &self.symbol)
    }

    /// `C_A` viewed as `W_{A,1}`.
    pub fn as_weighted(&self) -> WeightedCompositionRep {
        WeightedCompositionRep {
            symbol: self.symbol.clone(),
            multiplier: Multiplier::One,
            space: self.space.clone(),
        }
    }

    /// `(C_Aⁿ)* = W_{A⁻ⁿ, h_{Aⁿ}}`.
    pub fn adjoint_power(&self, n: u32) -> WeightedCompositionRep {
        let an = self.symbol.pow(n as i32);
        WeightedCompositionRep {
            symbol: an.inverted(),
            multiplier: Multiplier::Density(an),
            space: self.space.clone(),
        }
    }

    pub fn adjoint(&self) -> WeightedCompositionRep {
        self.adjoint_power(1)
    }
}

/// Multiplier `w` of a weighted composition operator.
#[derive(Clone)]
pub enum Multiplier {
    One,
    /// `h_B`, the Radon–Nikodym derivative of the space under `B`.
    Density(MatrixSymbol),
    Function(SharedEvaluable),
}

impl std::fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Multiplier::One => write!(f, "One"),
            Multiplier::Density(b) => f.debug_tuple("Density").field(b.entries()).finish(),
            Multiplier::Function(_) => write!(f, "Function(..)"),
        }
    }
}

/// `h_B(x)`, continued to the origin by its limit along the first P-axis
/// when the density of the space vanishes there.
fn density_value(mu: &WeightedMeasure, b: &MatrixSymbol, x: &[f64]) -> f64 {
    match density_h(mu, b, x) {
        Ok(v) => v,
        Err(_) => {
            let m = mu.weight().lowest_index() as i32;
            let mut u = vec![0.0; x.len()];
            u[0] = 1.0 / mu.inner().norm_sq(&u).sqrt();
            let s = mu.inner().norm_sq(&b.apply_inverse(&u));
            let ratio = match mu.side() {
                Side::Direct => s.powi(m),
                Side::Reciprocal => s.powi(-m),
            };
            ratio / b.absdet()
        }
    }
}

fn density_decay_factor(mu: &WeightedMeasure, b: &MatrixSymbol) -> Decay {
    let n = mu.dim();
    let p = mu.inner().gram();
    let quad = match mu.weight().kind() {
        // γ(|B⁻¹x|²)/γ(|x|²) is bounded for polynomial γ
        WeightKind::Polynomial => DMatrix::zeros(n, n),
        WeightKind::Entire => {
            let pulled = b.inverse().transpose() * p * b.inverse();
            match mu.side() {
                Side::Direct => p - pulled,
                Side::Reciprocal => pulled - p,
            }
        }
    };
    Decay {
        quad,
        degree: 0,
        support_radius: None,
    }
}

/// `W_{B,w} f = w·(f∘B)` acting in `L²(μ)`.
#[derive(Debug, Clone)]
pub struct WeightedCompositionRep {
    symbol: MatrixSymbol,
    multiplier: Multiplier,
    space: WeightedMeasure,
}

impl WeightedCompositionRep {
    pub fn new(symbol: MatrixSymbol, multiplier: Multiplier, space: WeightedMeasure) -> Result<Self> {
        if symbol.dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: symbol.dim(),
            });
        }
        if let Multiplier::Density(b) = &multiplier {
            if b.dim() != space.dim() {
                return Err(Error::DimensionMismatch {
                    expected: space.dim(),
                    found: b.dim(),
                });
            }
        }
        Ok(Self {
            symbol,
            multiplier,
            space,
        })
    }

    pub fn symbol(&self) -> &MatrixSymbol {
        &self.symbol
    }

    pub fn multiplier(&self) -> &Multiplier {
        &self.multiplier
    }

    pub fn space(&self) -> &WeightedMeasure {
        &self.space
    }

    /// `w(x)`.
    pub fn weight_value(&self, x: &[f64]) -> f64 {
        match &self.multiplier {
            Multiplier::One => 1.0,
            Multiplier::Density(b) => density_value(&self.space, b, x),
            Multiplier::Function(w) => w.eval(x),
        }
    }

    fn weight_decay(&self) -> Decay {
        let n = self.space.dim();
        match &self.multiplier {
            Multiplier::One => Decay {
                quad: DMatrix::zeros(n, n),
                degree: 0,
                support_radius: None,
            },
            Multiplier::Density(b) => density_decay_factor(&self.space, b),
            Multiplier::Function(w) => w.decay(),
        }
    }

    /// `J(x) = |w(B⁻¹x)|²·h_B(x)`; the graph norm of `W_{B,w}` is the
    /// `L²((1 + J)dμ)` norm.
    pub fn j_value(&self, x: &[f64]) -> f64 {
        let y = self.symbol.apply_inverse(x);
        let w = self.weight_value(&y);
        w * w * density_value(&self.space, &self.symbol, x)
    }

    /// Checks `J < ∞` at the given points.
    pub fn check_dense_definiteness(&self, points: &[Vec<f64>]) -> Result<()> {
        for x in points {
            let j = self.j_value(x);
            if !j.is_finite() {
                return Err(Error::NotInSpace(format!(
                    "J = (|w|^2 o B^-1) h_B is not finite at {x:?}; the operator is not densely defined"
                )));
            }
        }
        Ok(())
    }

    /// `W_{B,w} f` as an evaluable function.
    pub fn apply(&self, f: SharedEvaluable) -> Result<WeightedImage> {
        if f.dim() != self.space.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                found: f.dim(),
            });
        }
        Ok(WeightedImage { op: self.clone(), f })
    }
}

/// `x ↦ w(x)·f(Bx)`.
#[derive(Clone)]
pub struct WeightedImage {
    op: WeightedCompositionRep,
    f: SharedEvaluable,
}

impl Evaluable for WeightedImage {
    fn dim(&self) -> usize {
        self.op.space.dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let fx = self.f.eval(&self.op.symbol.apply(x));
        if fx == 0.0 {
            return 0.0;
        }
        self.op.weight_value(x) * fx
    }

    fn decay(&self) -> Decay {
        self.f
            .decay()
            .compose(self.op.symbol.entries())
            .times(&self.op.weight_decay())
    }
}

/// One step of the adjoint: `C_A* f = h_A·(f∘A⁻¹)`.
pub fn adjoint_apply(c: &CompositionOperatorRep, f: SharedEvaluable) -> Result<WeightedImage> {
    c.adjoint().apply(f)
}

/// `(C_A*)ⁿ f = |det A|^{−n}·ρ(A^{−n}x)/ρ(x)·f(A^{−n}x)` in closed form.
pub fn adjoint_apply_power(c: &CompositionOperatorRep, f: &TestFunction, n: u32) -> Result<WeightedImage> {
    c.adjoint_power(n).apply(Arc::new(f.clone()))
}

/// `x ↦ f(x)/γ(|x|²_P)`.
#[derive(Clone)]
pub struct UnitaryImage {
    f: SharedEvaluable,
    weight: WeightSeries,
    inner: InnerProduct,
}

impl Evaluable for UnitaryImage {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let fx = self.f.eval(x);
        if fx == 0.0 {
            return 0.0;
        }
        let t = self.inner.norm_sq(x);
        match self.weight.kind() {
            WeightKind::Entire => fx * (-t).exp(),
            WeightKind::Polynomial => fx / self.weight.eval(t).unwrap_or(f64::INFINITY),
        }
    }

    fn decay(&self) -> Decay {
        let n = self.inner.dim();
        let quad = match self.weight.kind() {
            WeightKind::Entire => self.inner.gram().clone(),
            WeightKind::Polynomial => DMatrix::zeros(n, n),
        };
        self.f.decay().times(&Decay {
            quad,
            degree: 0,
            support_radius: None,
        })
    }
}

/// `U f = f/γ(|x|²_P)`, an isometry from `L²(μ_{1/γ})` onto `L²(μ_γ)`.
pub fn unitary_map(f: SharedEvaluable, weight: &WeightSeries, inner: &InnerProduct) -> Result<UnitaryImage> {
    if f.dim() != inner.dim() {
        return Err(Error::DimensionMismatch {
            expected: inner.dim(),
            found: f.dim(),
        });
    }
    Ok(UnitaryImage {
        f,
        weight: weight.clone(),
        inner: inner.clone(),
    })
}

/// `U f` as a test function, available for the exponential weight.
pub fn unitary_map_exact(f: &TestFunction, weight: &WeightSeries, inner: &InnerProduct) -> Result<TestFunction> {
    match weight.kind() {
        WeightKind::Entire => f.mul_gaussian(inner.gram()),
        WeightKind::Polynomial => Err(Error::InvalidArgument(
            "f/γ is rational for polynomial γ; use unitary_map".into(),
        )),
    }
}

/// `U⁻¹ g = γ(|x|²_P)·g`, available for polynomial weights.
pub fn unitary_inverse_exact(g: &TestFunction, weight: &WeightSeries, inner: &InnerProduct) -> Result<TestFunction> {
    match weight.coeffs() {
        Some(c) => g.mul_polynomial(&Polynomial::radial(c, inner.gram())),
        None => Err(Error::InvalidArgument(
            "γ·g is not a finite Gaussian sum for the exponential weight".into(),
        )),
    }
}

/// `m_n = ‖Cⁿf‖²` for `n = 0..=N`, cut short at the first iterate leaving
/// the domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSequence {
    pub moments: Vec<f64>,
    /// First `n` whose iterate failed, with the reason.
    pub truncated_at: Option<(usize, String)>,
}

impl MomentSequence {
    pub fn is_complete(&self) -> bool {
        self.truncated_at.is_none()
    }
}

pub fn moment_sequence(c: &CompositionOperatorRep, f: &TestFunction, n: usize) -> Result<MomentSequence> {
    f.check_membership(c.space())?;
    let mut moments = vec![norm_sq(f, c.space())?];
    let mut g = f.clone();
    for k in 1..=n {
        let next = c.apply(&g).and_then(|h| norm_sq(&h, c.space()).map(|v| (h, v)));
        match next {
            Ok((h, v)) => {
                moments.push(v);
                g = h;
            }
            Err(e) => {
                return Ok(MomentSequence {
                    moments,
                    truncated_at: Some((k, e.to_string())),
                })
            }
        }
    }
    Ok(MomentSequence {
        moments,
        truncated_at: None,
    })
}

/// `K[(i,e),(j,d)] = ⟨Cⁱφ_d, Cʲφ_e⟩` with rows and columns ordered by
/// power, then dictionary index.
pub fn gram_block_matrix(c: &CompositionOperatorRep, dictionary: &[TestFunction], maxpow: usize) -> Result<DMatrix<f64>> {
    let d = dictionary.len();
    let mut iterates: Vec<Vec<TestFunction>> = Vec::with_capacity(maxpow + 1);
    iterates.push(dictionary.to_vec());
    for i in 1..=maxpow {
        let row = iterates[i - 1]
            .iter()
            .map(|g| c.apply(g))
            .collect::<Result<Vec<_>>>()?;
        iterates.push(row);
    }
    let size = d * (maxpow + 1);
    let mut k = DMatrix::zeros(size, size);
    for a in 0..size {
        for b in a..size {
            let (i, e) = (a / d, a % d);
            let (j, dd) = (b / d, b % d);
            let v = inner_product(&iterates[i][dd], &iterates[j][e], c.space())?;
            k[(a, b)] = v;
            k[(b, a)] = v;
        }
    }
    Ok(k)
}
