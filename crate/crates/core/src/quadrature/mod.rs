//! Inner products and norms in `L²(μ)`.
//!
//! Polynomial×Gaussian integrands go through tensorized Gauss–Hermite
//! quadrature after whitening the combined Gaussian, which is exact up to
//! rounding. Integrands carrying `1/γ` or other non-polynomial factors go
//! through adaptive cubature.

pub mod adaptive;
mod hermite;

pub use adaptive::{integrate_adaptive, integrate_box, AdaptiveOptions, AdaptiveResult};
pub use hermite::{gauss_hermite_integrate, hermite_rule, order_for_degree, HermiteRule};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::{Decay, Evaluable, GaussianTerm, TestFunction};
use crate::linalg::InnerProduct;
use crate::weights::{Side, WeightKind, WeightSeries, WeightedMeasure};

use hermite::{for_each_node, Accumulator};

/// Whether an inner product in `μ` between test functions is computed by the
/// exact Gauss–Hermite path.
pub fn has_exact_path(mu: &WeightedMeasure) -> bool {
    !(mu.side() == Side::Reciprocal && mu.weight().is_polynomial())
}

/// `∫ f g ρ dx`.
pub fn inner_product(f: &TestFunction, g: &TestFunction, mu: &WeightedMeasure) -> Result<f64> {
    inner_product_with_order(f, g, mu, 1)
}

/// `‖f‖²_{L²(μ)}`.
pub fn norm_sq(f: &TestFunction, mu: &WeightedMeasure) -> Result<f64> {
    inner_product(f, f, mu)
}

/// Same as [`inner_product`], with the Gauss–Hermite order multiplied by
/// `order_factor`.
pub fn inner_product_with_order(
    f: &TestFunction,
    g: &TestFunction,
    mu: &WeightedMeasure,
    order_factor: usize,
) -> Result<f64> {
    f.check_membership(mu)?;
    g.check_membership(mu)?;
    if !has_exact_path(mu) {
        return adaptive_inner(f, g, mu, &AdaptiveOptions::default());
    }
    let mut acc = Accumulator::default();
    for a in f.terms() {
        for b in g.terms() {
            acc.add(exact_term_pair(a, b, mu, order_factor.max(1))?);
        }
    }
    Ok(acc.value())
}

fn exact_term_pair(a: &GaussianTerm, b: &GaussianTerm, mu: &WeightedMeasure, order_factor: usize) -> Result<f64> {
    let p = mu.inner().gram();
    let base = a.shape() + b.shape();
    let poly_degree = a.poly().degree() + b.poly().degree();
    match (mu.weight().kind(), mu.side()) {
        (WeightKind::Polynomial, Side::Direct) => {
            let w = mu.weight();
            let d = w.degree().unwrap_or(0);
            let degree = poly_degree + 2 * d;
            let n = order_for_degree(degree) * order_factor;
            let mut acc = Accumulator::default();
            for_each_node(&base, n, |x, wt| {
                let t = mu.inner().norm_sq(x);
                let gamma = w.eval(t).unwrap_or(f64::NAN);
                acc.add(wt * a.poly().eval(x) * b.poly().eval(x) * gamma);
            })?;
            Ok(acc.value())
        }
        (WeightKind::Entire, side) => {
            let m = match side {
                Side::Direct => &base - p,
                Side::Reciprocal => &base + p,
            };
            let n = order_for_degree(poly_degree) * order_factor;
            let mut acc = Accumulator::default();
            for_each_node(&m, n, |x, wt| acc.add(wt * a.poly().eval(x) * b.poly().eval(x)))?;
            Ok(acc.value())
        }
        (WeightKind::Polynomial, Side::Reciprocal) => unreachable!("rational integrand"),
    }
}

/// Envelope of the density `ρ` of `μ`.
pub fn density_decay(mu: &WeightedMeasure) -> Decay {
    let n = mu.dim();
    let p = mu.inner().gram();
    match (mu.weight().kind(), mu.side()) {
        (WeightKind::Polynomial, Side::Direct) => Decay {
            quad: DMatrix::zeros(n, n),
            degree: 2 * mu.weight().degree().unwrap_or(0),
            support_radius: None,
        },
        (WeightKind::Polynomial, Side::Reciprocal) => Decay {
            quad: DMatrix::zeros(n, n),
            degree: 0,
            support_radius: None,
        },
        (WeightKind::Entire, Side::Direct) => Decay {
            quad: -p,
            degree: 0,
            support_radius: None,
        },
        (WeightKind::Entire, Side::Reciprocal) => Decay {
            quad: p.clone(),
            degree: 0,
            support_radius: None,
        },
    }
}

fn adaptive_inner(f: &dyn Evaluable, g: &dyn Evaluable, mu: &WeightedMeasure, opts: &AdaptiveOptions) -> Result<f64> {
    let decay = f.decay().times(&g.decay()).times(&density_decay(mu));
    let integrand = |x: &[f64]| {
        let fx = f.eval(x);
        if fx == 0.0 {
            return 0.0;
        }
        let gx = g.eval(x);
        if gx == 0.0 {
            return 0.0;
        }
        fx * gx * mu.density(x)
    };
    Ok(integrate_adaptive(mu.dim(), &integrand, &decay, opts)?.value)
}

/// `∫ f g ρ dx` for arbitrary evaluable functions, by adaptive cubature.
pub fn evaluable_inner_product(
    f: &dyn Evaluable,
    g: &dyn Evaluable,
    mu: &WeightedMeasure,
    opts: &AdaptiveOptions,
) -> Result<f64> {
    for d in [f.dim(), g.dim()] {
        if d != mu.dim() {
            return Err(Error::DimensionMismatch {
                expected: mu.dim(),
                found: d,
            });
        }
    }
    adaptive_inner(f, g, mu, opts)
}

/// `‖f‖²_{L²(μ)}` for an arbitrary evaluable function.
pub fn evaluable_norm_sq(f: &dyn Evaluable, mu: &WeightedMeasure, opts: &AdaptiveOptions) -> Result<f64> {
    evaluable_inner_product(f, f, mu, opts)
}

/// Squared norms of `f` in the tower `L²(μ_{γ_k})`, `k = 0..=kmax`, and in
/// the limit space `L²(μ_γ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TowerNorms {
    pub squared: Vec<f64>,
    pub norms: Vec<f64>,
    pub limit_squared: f64,
    pub monotone: bool,
}

impl TowerNorms {
    /// `|‖f‖_{H_kmax} − ‖f‖_H|`.
    pub fn limit_gap(&self) -> f64 {
        (self.norms.last().copied().unwrap_or(0.0) - self.limit_squared.sqrt()).abs()
    }
}

/// `‖f‖_{L²(μ_{γ_k})}` for `k = 0..=kmax`, where `γ_k` is the degree-`k`
/// truncation of `γ`. Every level is computed on the exact path from the
/// moments `∫ f² |x|_P^{2n} dx`.
pub fn tower_norms(f: &TestFunction, gamma: &WeightSeries, kmax: usize, inner: &InnerProduct) -> Result<TowerNorms> {
    let mu = WeightedMeasure::direct(gamma.clone(), inner.clone());
    f.check_membership(&mu)?;
    let mut moments = vec![Accumulator::default(); kmax + 1];
    for a in f.terms() {
        for b in f.terms() {
            let m = a.shape() + b.shape();
            let degree = a.poly().degree() + b.poly().degree() + 2 * kmax;
            for_each_node(&m, order_for_degree(degree), |x, w| {
                let base = w * a.poly().eval(x) * b.poly().eval(x);
                let t = inner.norm_sq(x);
                let mut tp = 1.0;
                for acc in moments.iter_mut() {
                    acc.add(base * tp);
                    tp *= t;
                }
            })?;
        }
    }
    let mut squared = Vec::with_capacity(kmax + 1);
    let mut running = Accumulator::default();
    for (n, m) in moments.iter().enumerate() {
        running.add(gamma.coeff(n) * m.value());
        squared.push(running.value());
    }
    let limit_squared = norm_sq(f, &mu)?;
    let monotone = squared.windows(2).all(|w| w[1] >= w[0]);
    Ok(TowerNorms {
        norms: squared.iter().map(|v| v.max(0.0).sqrt()).collect(),
        squared,
        limit_squared,
        monotone,
    })
}
