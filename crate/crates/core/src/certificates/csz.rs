use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::TestFunction;
use crate::operators::CompositionOperatorRep;
use crate::quadrature::inner_product;

/// Coefficients `a_{p,q}^{i,j}` for `p, q ≤ maxpow` and `i, j < count`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSystem {
    count: usize,
    maxpow: usize,
    data: Vec<Complex64>,
}

impl CoefficientSystem {
    pub fn zeros(count: usize, maxpow: usize) -> Self {
        let n = (maxpow + 1) * count;
        Self {
            count,
            maxpow,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    /// `a_{p,q}^{i,j} = b_p^i·conj(b_q^j)`, indexed `b[p][i]`.
    pub fn square_generated(b: &[Vec<Complex64>]) -> Result<Self> {
        let count = b.first().map_or(0, Vec::len);
        if b.is_empty() || b.iter().any(|row| row.len() != count) {
            return Err(Error::InvalidArgument("b must be a rectangular (maxpow+1) x count array".into()));
        }
        let mut a = Self::zeros(count, b.len() - 1);
        for p in 0..b.len() {
            for q in 0..b.len() {
                for i in 0..count {
                    for j in 0..count {
                        a.set(p, q, i, j, b[p][i] * b[q][j].conj());
                    }
                }
            }
        }
        Ok(a)
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn maxpow(&self) -> usize {
        self.maxpow
    }

    fn index(&self, p: usize, q: usize, i: usize, j: usize) -> usize {
        let n = (self.maxpow + 1) * self.count;
        (p * self.count + i) * n + q * self.count + j
    }

    pub fn get(&self, p: usize, q: usize, i: usize, j: usize) -> Complex64 {
        self.data[self.index(p, q, i, j)]
    }

    pub fn set(&mut self, p: usize, q: usize, i: usize, j: usize, v: Complex64) {
        let k = self.index(p, q, i, j);
        self.data[k] = v;
    }

    /// Requires `a_{p,q}^{i,j} = conj(a_{q,p}^{j,i})` up to `tol·max|a|`.
    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let scale = self.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for p in 0..=self.maxpow {
            for q in 0..=self.maxpow {
                for i in 0..self.count {
                    for j in 0..self.count {
                        let d = self.get(p, q, i, j) - self.get(q, p, j, i).conj();
                        if d.norm() > tol * scale {
                            return Err(Error::NotHermitian(format!("(p, q, i, j) = ({p}, {q}, {i}, {j})")));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Random screening of the scalar inequality
/// `Σ a_{p,q}^{i,j} λ^p conj(λ)^q z_i conj(z_j) ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CszSampler {
    pub samples: usize,
    /// `λ` is drawn uniformly from the disk of this radius.
    pub lambda_radius: f64,
    pub seed: u64,
    pub tol: f64,
}

impl Default for CszSampler {
    fn default() -> Self {
        Self {
            samples: 10_000,
            lambda_radius: 2.0,
            seed: 0,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Screen {
    Accepted,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CszOutcome {
    pub screen: Screen,
    /// Smallest sampled value of the scalar form, relative to its majorant.
    pub min_relative_sample: f64,
    /// `Σ a_{p,q}^{i,j} ⟨Cᵖf_i, C^q f_j⟩`, evaluated only when accepted.
    pub value: Option<f64>,
    /// `Σ |a_{p,q}^{i,j}|·|⟨Cᵖf_i, C^q f_j⟩|`.
    pub scale: Option<f64>,
}

fn scalar_form(a: &CoefficientSystem, lambda: Complex64, z: &[Complex64]) -> (f64, f64) {
    let powers: Vec<Complex64> = (0..=a.maxpow).map(|p| lambda.powu(p as u32)).collect();
    let mut value = Complex64::new(0.0, 0.0);
    let mut majorant = 0.0;
    for p in 0..=a.maxpow {
        for q in 0..=a.maxpow {
            let lp = powers[p] * powers[q].conj();
            for i in 0..a.count {
                for j in 0..a.count {
                    let c = a.get(p, q, i, j);
                    value += c * lp * z[i] * z[j].conj();
                    majorant += c.norm() * lp.norm() * z[i].norm() * z[j].norm();
                }
            }
        }
    }
    (value.re, majorant)
}

/// Screens the coefficient system by sampling and, if no sample is
/// negative, evaluates it on the iterates of `C`.
pub fn csz_positivity_check(
    c: &CompositionOperatorRep,
    functions: &[TestFunction],
    a: &CoefficientSystem,
    sampler: &CszSampler,
) -> Result<CszOutcome> {
    if functions.len() != a.count {
        return Err(Error::DimensionMismatch {
            expected: a.count,
            found: functions.len(),
        });
    }
    a.check_hermitian(1e-12)?;
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    let mut min_relative: f64 = f64::INFINITY;
    for _ in 0..sampler.samples {
        let r = sampler.lambda_radius * rng.gen::<f64>().sqrt();
        let theta = std::f64::consts::TAU * rng.gen::<f64>();
        let lambda = Complex64::from_polar(r, theta);
        let mut z: Vec<Complex64> = (0..a.count)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        z.iter_mut().for_each(|v| *v /= norm);
        let (value, majorant) = scalar_form(a, lambda, &z);
        if majorant > 0.0 {
            min_relative = min_relative.min(value / majorant);
        }
    }
    if min_relative == f64::INFINITY {
        min_relative = 0.0;
    }
    if min_relative < -sampler.tol {
        return Ok(CszOutcome {
            screen: Screen::Rejected,
            min_relative_sample: min_relative,
            value: None,
            scale: None,
        });
    }
    let mut iterates: Vec<Vec<TestFunction>> = vec![functions.to_vec()];
    for p in 1..=a.maxpow {
        let next = iterates[p - 1].iter().map(|f| c.apply(f)).collect::<Result<Vec<_>>>()?;
        iterates.push(next);
    }
    let mut value = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for p in 0..=a.maxpow {
        for q in 0..=a.maxpow {
            for i in 0..a.count {
                for j in 0..a.count {
                    let coeff = a.get(p, q, i, j);
                    if coeff == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let g = inner_product(&iterates[p][i], &iterates[q][j], c.space())?;
                    value += coeff * g;
                    scale += coeff.norm() * g.abs();
                }
            }
        }
    }
    Ok(CszOutcome {
        screen: Screen::Accepted,
        min_relative_sample: min_relative,
        value: Some(value.re),
        scale: Some(scale),
    })
}
