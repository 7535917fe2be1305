use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Exponent tuple of a monomial.
pub type Exponents = Vec<u8>;

/// Real multivariate polynomial stored as a sparse coefficient map.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Exponents, f64>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self::zero(dim);
        p.push(vec![0; dim], c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn variable(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        let mut p = Self::zero(dim);
        p.push(e, 1.0);
        p
    }

    pub fn monomial(exponents: &[u8], c: f64) -> Self {
        let mut p = Self::zero(exponents.len());
        p.push(exponents.to_vec(), c);
        p
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, f64)>,
    {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            if e.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.len(),
                });
            }
            if !c.is_finite() {
                return Err(Error::InvalidArgument("non-finite polynomial coefficient".into()));
            }
            p.push(e, c);
        }
        Ok(p)
    }

    fn push(&mut self, e: Exponents, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&e);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, f64)> {
        self.terms.iter().map(|(e, c)| (e, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(total).max().unwrap_or(0)
    }

    /// Lowest total degree among nonzero terms.
    pub fn lowest_degree(&self) -> Option<usize> {
        self.terms.keys().map(total).min()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let deg = self.degree();
        let powers: Vec<Vec<f64>> = x
            .iter()
            .map(|&xi| {
                let mut row = Vec::with_capacity(deg + 1);
                let mut v = 1.0;
                for _ in 0..=deg {
                    row.push(v);
                    v *= xi;
                }
                row
            })
            .collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .enumerate()
                    .fold(*c, |acc, (i, &k)| acc * powers[i][k as usize])
            })
            .sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, v) in &self.terms {
            out.push(e.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, v) in &other.terms {
            out.push(e.clone(), *v);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (ea, va) in &self.terms {
            for (eb, vb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.push(e, va * vb);
            }
        }
        out
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut out = Self::constant(self.dim, 1.0);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// `x ↦ q(Mx)`.
    pub fn compose_linear(&self, m: &DMatrix<f64>) -> Self {
        let n = self.dim;
        let deg = self.degree();
        // powers[i][k] = (Σ_j M_ij x_j)^k
        let powers: Vec<Vec<Polynomial>> = (0..n)
            .map(|i| {
                let mut form = Self::zero(n);
                for j in 0..n {
                    let mut e = vec![0; n];
                    e[j] = 1;
                    form.push(e, m[(i, j)]);
                }
                let mut row = vec![Self::constant(n, 1.0)];
                for k in 1..=deg {
                    let next = row[k - 1].mul(&form);
                    row.push(next);
                }
                row
            })
            .collect();
        let mut out = Self::zero(n);
        for (e, c) in &self.terms {
            let mut term = Self::constant(n, *c);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&powers[i][k as usize]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// `Σ_n c_n (xᵀ P x)ⁿ`.
    pub fn radial(coeffs: &[f64], p: &DMatrix<f64>) -> Self {
        let n = p.nrows();
        let mut quad = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut e = vec![0; n];
                e[i] += 1;
                e[j] += 1;
                quad.push(e, p[(i, j)]);
            }
        }
        let mut out = Self::zero(n);
        let mut power = Self::constant(n, 1.0);
        for (k, c) in coeffs.iter().enumerate() {
            if k > 0 {
                power = power.mul(&quad);
            }
            out = out.add(&power.scale(*c));
        }
        out
    }
}

fn total(e: &Exponents) -> usize {
    e.iter().map(|&k| k as usize).sum()
}
