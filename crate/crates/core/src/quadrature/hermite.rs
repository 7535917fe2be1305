use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::sym_eigen;

/// Gauss–Hermite rule for the weight `exp(−y²)` on ℝ; exact for polynomials
/// of degree `2n − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Orthonormal Hermite values `p̃_0(y), …, p̃_n(y)`.
fn orthonormal_values(n: usize, y: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(std::f64::consts::PI.powf(-0.25));
    if n >= 1 {
        p.push(std::f64::consts::SQRT_2 * y * p[0]);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = y * (2.0 / (kf + 1.0)).sqrt() * p[k] - (kf / (kf + 1.0)).sqrt() * p[k - 1];
        p.push(next);
    }
    p
}

fn build_rule(n: usize) -> HermiteRule {
    // Golub–Welsch for the starting nodes, then Newton on p̃_n.
    let mut jacobi = DMatrix::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k, k - 1)] = b;
        jacobi[(k - 1, k)] = b;
    }
    let (mut nodes, _) = sym_eigen(&jacobi);
    for y in nodes.iter_mut() {
        for _ in 0..8 {
            let p = orthonormal_values(n, *y);
            let deriv = (2.0 * n as f64).sqrt() * p[n - 1];
            let step = p[n] / deriv;
            *y -= step;
            if step.abs() <= 1e-16 * y.abs().max(1.0) {
                break;
            }
        }
    }
    // exact symmetry
    for i in 0..n / 2 {
        let v = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -v;
        nodes[n - 1 - i] = v;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let weights = nodes
        .iter()
        .map(|&y| {
            let p = orthonormal_values(n - 1, y);
            1.0 / p.iter().map(|v| v * v).sum::<f64>()
        })
        .collect();
    HermiteRule { nodes, weights }
}

/// Cached rule with `n` nodes.
pub fn hermite_rule(n: usize) -> Arc<HermiteRule> {
    static CACHE: OnceLock<Mutex<BTreeMap<usize, Arc<HermiteRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n.max(1))
        .or_insert_with(|| Arc::new(build_rule(n.max(1))))
        .clone()
}

/// Number of nodes per axis making the rule exact for total degree `degree`.
pub fn order_for_degree(degree: usize) -> usize {
    degree / 2 + 1
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Whitening map for `exp(−xᵀMx)`: returns `L` with `x = L y` turning the
/// exponent into `−|y|²`, and the Jacobian `det L`.
pub(crate) fn whitening(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let (values, vectors) = sym_eigen(&crate::linalg::symmetrize(m));
    if !(values[0] > 0.0) {
        return Err(Error::NonIntegrable(format!(
            "combined Gaussian matrix has smallest eigenvalue {:e}",
            values[0]
        )));
    }
    let scale = DVector::from_iterator(values.len(), values.iter().map(|v| 1.0 / v.sqrt()));
    let jac = scale.iter().product();
    Ok((vectors * DMatrix::from_diagonal(&scale), jac))
}

/// Visits every node `x = L y` of the tensor rule with `n` nodes per axis,
/// passing the product weight (including the Jacobian).
pub(crate) fn for_each_node<F>(m: &DMatrix<f64>, n: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&[f64], f64),
{
    let (l, jac) = whitening(m)?;
    let rule = hermite_rule(n);
    let dim = m.nrows();
    let mut idx = vec![0usize; dim];
    let mut y = vec![0.0; dim];
    let mut x = vec![0.0; dim];
    loop {
        let mut w = jac;
        for d in 0..dim {
            y[d] = rule.nodes[idx[d]];
            w *= rule.weights[idx[d]];
        }
        for i in 0..dim {
            x[i] = (0..dim).map(|j| l[(i, j)] * y[j]).sum();
        }
        visit(&x, w);
        // odometer
        let mut d = 0;
        loop {
            if d == dim {
                return Ok(());
            }
            idx[d] += 1;
            if idx[d] < n {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// `∫ F(x) exp(−xᵀMx) dx` for a polynomial `F` of total degree ≤ `degree`.
pub fn gauss_hermite_integrate<F>(m: &DMatrix<f64>, degree: usize, mut f: F) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut acc = Accumulator::default();
    for_each_node(m, order_for_degree(degree), |x, w| acc.add(w * f(x)))?;
    Ok(acc.value())
}
