//! Test functions `Σ_t q_t(x)·exp(−xᵀS_t x)` closed under composition with
//! linear maps, products and linear combination, plus indicator simple
//! functions over boxes and P-balls.

mod polynomial;
mod simple;

pub use polynomial::{Exponents, Polynomial};
pub use simple::{Region, SimpleFunction};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{checked_symmetric, min_eigenvalue, MatrixSymbol};
use crate::weights::{Side, WeightKind, WeightedMeasure};

/// Maximal total degree of a test-function polynomial factor.
pub const MAX_DEGREE: usize = 12;

/// Growth envelope of an evaluable function:
/// `|f(x)| ≲ (1 + |x|)^degree · exp(−xᵀ quad x)` outside a compact set, or
/// compact support inside the Euclidean ball of `support_radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decay {
    pub quad: DMatrix<f64>,
    pub degree: usize,
    pub support_radius: Option<f64>,
}

impl Decay {
    pub fn compact(dim: usize, radius: f64) -> Self {
        Self {
            quad: DMatrix::zeros(dim, dim),
            degree: 0,
            support_radius: Some(radius),
        }
    }

    /// Envelope of a pointwise product.
    pub fn times(&self, other: &Decay) -> Decay {
        let support_radius = match (self.support_radius, other.support_radius) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Decay {
            quad: &self.quad + &other.quad,
            degree: self.degree + other.degree,
            support_radius,
        }
    }

    /// Envelope after substituting `x ↦ Mx`.
    pub fn compose(&self, m: &DMatrix<f64>) -> Decay {
        Decay {
            quad: m.transpose() * &self.quad * m,
            degree: self.degree,
            support_radius: self.support_radius.map(|r| r * crate::linalg::spectral_norm(&inverse_or_identity(m))),
        }
    }
}

fn inverse_or_identity(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone()
        .try_inverse()
        .unwrap_or_else(|| DMatrix::identity(m.nrows(), m.ncols()))
}

/// Anything that can be evaluated pointwise on ℝ^κ.
pub trait Evaluable {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> f64;
    fn decay(&self) -> Decay;
}

/// `q(x)·exp(−xᵀSx)` with `S` symmetric positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTerm {
    poly: Polynomial,
    shape: DMatrix<f64>,
}

impl GaussianTerm {
    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let n = x.len();
        let mut q = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.shape[(i, j)] * x[j];
            }
            q += x[i] * row;
        }
        self.poly.eval(x) * (-q).exp()
    }
}

/// A finite sum of Gaussian terms.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    dim: usize,
    terms: Vec<GaussianTerm>,
}

impl TestFunction {
    pub fn gaussian(poly: Polynomial, shape: DMatrix<f64>) -> Result<Self> {
        let dim = shape.nrows();
        crate::linalg::check_dim(dim)?;
        if poly.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: poly.dim(),
            });
        }
        let shape = checked_symmetric(&shape, "Gaussian shape")?;
        let lmin = min_eigenvalue(&shape);
        if !(lmin > 0.0) {
            return Err(Error::NotPositiveDefinite(format!(
                "Gaussian shape has smallest eigenvalue {lmin:e}"
            )));
        }
        check_degree(poly.degree())?;
        let mut out = Self::zero(dim);
        out.push(GaussianTerm { poly, shape });
        Ok(out)
    }

    /// `exp(−s|x|²)`.
    pub fn isotropic(dim: usize, s: f64) -> Result<Self> {
        Self::gaussian(Polynomial::constant(dim, 1.0), DMatrix::identity(dim, dim) * s)
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: Vec::new(),
        }
    }

    fn push(&mut self, term: GaussianTerm) {
        if term.poly.is_zero() {
            return;
        }
        if let Some(existing) = self.terms.iter_mut().find(|t| t.shape == term.shape) {
            existing.poly = existing.poly.add(&term.poly);
        } else {
            self.terms.push(term);
        }
        self.terms.retain(|t| !t.poly.is_zero());
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[GaussianTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.poly.degree()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = Self::zero(self.dim);
        for t in &self.terms {
            out.push(GaussianTerm {
                poly: t.poly.scale(c),
                shape: t.shape.clone(),
            });
        }
        out
    }

    /// `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        for t in &other.terms {
            out.push(t.clone());
        }
        Ok(out)
    }

    /// `Σ c_i f_i`.
    pub fn linear_combination(dim: usize, parts: &[(f64, &TestFunction)]) -> Result<Self> {
        let mut out = Self::zero(dim);
        for (c, f) in parts {
            out = out.add(&f.scale(*c))?;
        }
        Ok(out)
    }

    /// Pointwise product; fails when a polynomial factor exceeds the degree cap.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut out = Self::zero(self.dim);
        for a in &self.terms {
            for b in &other.terms {
                let poly = a.poly.mul(&b.poly);
                check_degree(poly.degree())?;
                out.push(GaussianTerm {
                    poly,
                    shape: &a.shape + &b.shape,
                });
            }
        }
        Ok(out)
    }

    /// Multiplies every polynomial factor by `p`.
    pub fn mul_polynomial(&self, p: &Polynomial) -> Result<Self> {
        let mut out = Self::zero(self.dim);
        for t in &self.terms {
            let poly = t.poly.mul(p);
            check_degree(poly.degree())?;
            out.push(GaussianTerm {
                poly,
                shape: t.shape.clone(),
            });
        }
        Ok(out)
    }

    /// Multiplies by `exp(−xᵀMx)` for a symmetric `M` keeping every shape
    /// positive definite.
    pub fn mul_gaussian(&self, m: &DMatrix<f64>) -> Result<Self> {
        let mut out = Self::zero(self.dim);
        for t in &self.terms {
            let shape = &t.shape + m;
            if !(min_eigenvalue(&shape) > 0.0) {
                return Err(Error::NotPositiveDefinite("shifted Gaussian shape".into()));
            }
            out.push(GaussianTerm {
                poly: t.poly.clone(),
                shape,
            });
        }
        Ok(out)
    }

    /// `x ↦ f(Ax)`.
    pub fn compose_linear(&self, a: &MatrixSymbol) -> Result<Self> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: a.dim(),
            });
        }
        Ok(self.compose_matrix(a.entries()))
    }

    pub(crate) fn compose_matrix(&self, m: &DMatrix<f64>) -> Self {
        let mut out = Self::zero(self.dim);
        for t in &self.terms {
            let shape = crate::linalg::symmetrize(&(m.transpose() * &t.shape * m));
            out.push(GaussianTerm {
                poly: t.poly.compose_linear(m),
                shape,
            });
        }
        out
    }

    /// Checks `f ∈ L²(μ)`.
    ///
    /// With the exponential weight on the direct side every shape needs
    /// `2S − P ≻ 0`. On the reciprocal side with `γ(0) = 0` the density is
    /// singular at the origin and `f` must vanish there to sufficient order.
    pub fn check_membership(&self, mu: &WeightedMeasure) -> Result<()> {
        if mu.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: mu.dim(),
                found: self.dim,
            });
        }
        let p = mu.inner().gram();
        for t in &self.terms {
            let lmin = min_eigenvalue(&t.shape);
            if !(lmin > 0.0) {
                return Err(Error::NotInSpace(format!("shape eigenvalue {lmin:e} <= 0")));
            }
            if mu.side() == Side::Direct && mu.weight().kind() == WeightKind::Entire {
                let m = &t.shape * 2.0 - p;
                let lmin = min_eigenvalue(&m);
                if !(lmin > 0.0) {
                    return Err(Error::NotInSpace(format!(
                        "2S - P has smallest eigenvalue {lmin:e}; |f|^2 exp(|x|^2) is not integrable"
                    )));
                }
            }
        }
        if mu.side() == Side::Reciprocal && mu.weight().coeff(0) == 0.0 && !self.is_zero() {
            let m = mu.weight().lowest_index();
            let vanishing = self
                .terms
                .iter()
                .filter_map(|t| t.poly.lowest_degree())
                .min()
                .unwrap_or(0);
            if 2 * vanishing + self.dim <= 2 * m {
                return Err(Error::NotInSpace(format!(
                    "1/gamma has a |x|^-{} singularity at the origin",
                    2 * m
                )));
            }
        }
        Ok(())
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

fn check_degree(degree: usize) -> Result<()> {
    if degree > MAX_DEGREE {
        return Err(Error::DegreeOverflow {
            degree,
            max: MAX_DEGREE,
        });
    }
    Ok(())
}

impl Evaluable for TestFunction {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    fn decay(&self) -> Decay {
        let n = self.dim;
        let Some(first) = self.terms.first() else {
            return Decay::compact(n, 0.0);
        };
        // a common lower bound S_0 − cI of all shapes
        let mut shift: f64 = 0.0;
        for t in &self.terms[1..] {
            shift = shift.max(-min_eigenvalue(&(&t.shape - &first.shape)));
        }
        Decay {
            quad: &first.shape - DMatrix::identity(n, n) * shift,
            degree: self.degree(),
            support_radius: None,
        }
    }
}

/// Pointwise evaluation of any evaluable function.
pub fn pointwise_eval(f: &dyn Evaluable, x: &[f64]) -> f64 {
    f.eval(x)
}

/// The constant function 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant {
    pub dim: usize,
    pub value: f64,
}

impl Evaluable for Constant {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, _x: &[f64]) -> f64 {
        self.value
    }

    fn decay(&self) -> Decay {
        Decay {
            quad: DMatrix::zeros(self.dim, self.dim),
            degree: 0,
            support_radius: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::InnerProduct;
    use crate::weights::WeightSeries;
    use approx::assert_relative_eq;

    fn x_gauss() -> TestFunction {
        TestFunction::gaussian(Polynomial::variable(1, 0), DMatrix::from_element(1, 1, 1.0)).unwrap()
    }

    #[test]
    fn composition_examples() {
        let f = TestFunction::isotropic(1, 1.0).unwrap();
        let two = MatrixSymbol::from_row_slice(1, &[2.0]).unwrap();
        let g = f.compose_linear(&two).unwrap();
        assert_eq!(g.terms()[0].shape()[(0, 0)], 4.0);
        assert_eq!(f.compose_linear(&MatrixSymbol::identity(1)).unwrap(), f);

        let three = MatrixSymbol::from_row_slice(1, &[3.0]).unwrap();
        let h = x_gauss().compose_linear(&three).unwrap();
        for x in [0.1, -0.4, 0.9] {
            assert_relative_eq!(h.eval(&[x]), 3.0 * x * (-9.0 * x * x).exp(), max_relative = 1e-14);
        }
    }

    #[test]
    fn eval_examples() {
        let f = TestFunction::isotropic(1, 1.0).unwrap();
        assert_eq!(pointwise_eval(&f, &[0.0]), 1.0);
        let g = TestFunction::gaussian(
            Polynomial::from_terms(1, [(vec![0], 1.0), (vec![2], 1.0)]).unwrap(),
            DMatrix::from_element(1, 1, 1.0),
        )
        .unwrap();
        assert_relative_eq!(g.eval(&[1.0]), 2.0 / std::f64::consts::E, max_relative = 1e-15);
    }

    #[test]
    fn membership_rules() {
        let p = InnerProduct::identity(1);
        let exp_direct = WeightedMeasure::direct(WeightSeries::exp(), p.clone());
        let f = TestFunction::isotropic(1, 1.0).unwrap();
        assert!(f.check_membership(&exp_direct).is_ok());
        let half = MatrixSymbol::from_row_slice(1, &[0.5]).unwrap();
        let wide = f.compose_linear(&half).unwrap();
        assert!(matches!(wide.check_membership(&exp_direct), Err(Error::NotInSpace(_))));
        assert!(wide.check_membership(&exp_direct.flipped()).is_ok());

        let t_recip = WeightedMeasure::reciprocal(WeightSeries::polynomial(vec![0.0, 1.0]).unwrap(), p);
        assert!(f.check_membership(&t_recip).is_err());
        assert!(x_gauss().check_membership(&t_recip).is_ok());
    }

    #[test]
    fn algebra_closure() {
        let f = TestFunction::isotropic(2, 1.0).unwrap();
        let g = TestFunction::gaussian(Polynomial::variable(2, 1), DMatrix::identity(2, 2) * 0.5).unwrap();
        let sum = TestFunction::linear_combination(2, &[(2.0, &f), (-1.0, &g)]).unwrap();
        let prod = f.mul(&g).unwrap();
        let x = [0.3, -0.7];
        assert_relative_eq!(sum.eval(&x), 2.0 * f.eval(&x) - g.eval(&x), max_relative = 1e-14);
        assert_relative_eq!(prod.eval(&x), f.eval(&x) * g.eval(&x), max_relative = 1e-14);
        let cancel = f.add(&f.scale(-1.0)).unwrap();
        assert!(cancel.is_zero());

        let big = TestFunction::gaussian(Polynomial::monomial(&[7, 0], 1.0), DMatrix::identity(2, 2)).unwrap();
        assert!(matches!(big.mul(&big), Err(Error::DegreeOverflow { .. })));
        assert!(TestFunction::gaussian(Polynomial::monomial(&[13, 0], 1.0), DMatrix::identity(2, 2)).is_err());
        assert!(TestFunction::gaussian(Polynomial::constant(2, 1.0), -DMatrix::identity(2, 2)).is_err());
    }
}
