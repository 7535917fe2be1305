//! Matrix symbols and inner-product geometry on ℝ^κ.
//!
//! An [`InnerProduct`] is a symmetric positive-definite Gram matrix `P`
//! defining `<x, y>_P = xᵀ P y`. A [`MatrixSymbol`] is an invertible real
//! matrix together with its inverse and determinant modulus. Adjoints,
//! normality and operator norms are all taken with respect to `P`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 8;

/// Default relative tolerance for [`is_normal`].
pub const DEFAULT_NORMALITY_TOL: f64 = 1e-10;

const SYMMETRY_TOL: f64 = 1e-14;
const SINGULAR_TOL: f64 = 1e-12;

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::UnsupportedDimension(dim));
    }
    Ok(())
}

/// Eigenvalues (ascending) and matching eigenvectors of a symmetric matrix.
pub fn sym_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    sym_eigen(m).0[0]
}

/// Symmetric square root and inverse square root of an SPD matrix.
fn spd_sqrt_pair(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (values, vectors) = sym_eigen(m);
    if values[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite(format!(
            "smallest eigenvalue {:e}",
            values[0]
        )));
    }
    let root = DMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|v| v.sqrt()),
    ));
    let inv_root = DMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|v| 1.0 / v.sqrt()),
    ));
    let sqrt = &vectors * root * vectors.transpose();
    let inv_sqrt = &vectors * inv_root * vectors.transpose();
    Ok((symmetrize(&sqrt), symmetrize(&inv_sqrt)))
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Checks that a matrix is symmetric to `SYMMETRY_TOL` relative and returns
/// its exact symmetrization.
pub(crate) fn checked_symmetric(m: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidArgument(format!("{what} must be square")));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("{what} has non-finite entries")));
    }
    let scale = max_abs(m);
    let asym = max_abs(&(m - m.transpose()));
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::NotPositiveDefinite(format!(
            "{what} is not symmetric (asymmetry {asym:e})"
        )));
    }
    Ok(symmetrize(m))
}

/// Inner product `<x, y>_P = xᵀ P y` on ℝ^κ.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerProduct {
    gram: DMatrix<f64>,
    gram_inv: DMatrix<f64>,
    factor: DMatrix<f64>,
    inv_factor: DMatrix<f64>,
}

impl InnerProduct {
    pub fn new(gram: DMatrix<f64>) -> Result<Self> {
        check_dim(gram.nrows())?;
        let gram = checked_symmetric(&gram, "inner product matrix")?;
        let (factor, inv_factor) = spd_sqrt_pair(&gram)?;
        let residual = max_abs(&(&factor * &factor - &gram));
        if residual > 1e-12 * max_abs(&gram) {
            return Err(Error::NotPositiveDefinite(format!(
                "square root residual {residual:e}"
            )));
        }
        let gram_inv = symmetrize(&(&inv_factor * &inv_factor));
        Ok(Self {
            gram,
            gram_inv,
            factor,
            inv_factor,
        })
    }

    pub fn identity(dim: usize) -> Self {
        let eye = DMatrix::identity(dim, dim);
        Self {
            gram: eye.clone(),
            gram_inv: eye.clone(),
            factor: eye.clone(),
            inv_factor: eye,
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn gram_inverse(&self) -> &DMatrix<f64> {
        &self.gram_inv
    }

    /// `P^{1/2}`.
    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    /// `P^{-1/2}`.
    pub fn inv_factor(&self) -> &DMatrix<f64> {
        &self.inv_factor
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.gram[(i, j)] * y[j];
            }
            acc += x[i] * row;
        }
        acc
    }

    /// `|x|²_P`.
    pub fn norm_sq(&self, x: &[f64]) -> f64 {
        self.inner(x, x)
    }

    fn check_same_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: n,
            });
        }
        Ok(())
    }
}

/// An invertible linear map of ℝ^κ with cached inverse and `|det A|`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSymbol {
    entries: DMatrix<f64>,
    inverse: DMatrix<f64>,
    absdet: f64,
}

impl MatrixSymbol {
    /// Rejects matrices with `|det A| < 1e-12 · ‖A‖^κ`.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: entries.ncols(),
            });
        }
        check_dim(n)?;
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        let absdet = entries.clone().lu().determinant().abs();
        let norm = spectral_norm(&entries);
        let threshold = SINGULAR_TOL * norm.powi(n as i32);
        if !(absdet > threshold) || norm == 0.0 {
            return Err(Error::Singular { absdet, threshold });
        }
        let inverse = entries
            .clone()
            .lu()
            .try_inverse()
            .ok_or(Error::Singular { absdet, threshold })?;
        Ok(Self {
            entries,
            inverse,
            absdet,
        })
    }

    pub fn from_row_slice(dim: usize, values: &[f64]) -> Result<Self> {
        if values.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: values.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, values))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
            inverse: DMatrix::identity(dim, dim),
            absdet: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn absdet(&self) -> f64 {
        self.absdet
    }

    /// The symbol `A⁻¹`, reusing the cached inverse.
    pub fn inverted(&self) -> Self {
        Self {
            entries: self.inverse.clone(),
            inverse: self.entries.clone(),
            absdet: 1.0 / self.absdet,
        }
    }

    /// The product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self {
            entries: &self.entries * &other.entries,
            inverse: &other.inverse * &self.inverse,
            absdet: self.absdet * other.absdet,
        })
    }

    /// `Aⁿ` for any integer `n`, by repeated multiplication.
    pub fn pow(&self, n: i32) -> Self {
        let base = if n < 0 { self.inverted() } else { self.clone() };
        let mut out = Self::identity(self.dim());
        for _ in 0..n.unsigned_abs() {
            out = Self {
                entries: &out.entries * &base.entries,
                inverse: &base.inverse * &out.inverse,
                absdet: out.absdet * base.absdet,
            };
        }
        out
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        mat_vec(&self.entries, x)
    }

    pub fn apply_inverse(&self, x: &[f64]) -> Vec<f64> {
        mat_vec(&self.inverse, x)
    }
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    let n = m.nrows();
    let k = m.ncols();
    (0..n)
        .map(|i| (0..k).map(|j| m[(i, j)] * x[j]).sum())
        .collect()
}

/// Largest singular value in the Euclidean geometry.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

fn check_pair(a: &MatrixSymbol, p: &InnerProduct) -> Result<()> {
    p.check_same_dim(a.dim())
}

/// `A*ₚ = P⁻¹ Aᵀ P`, the adjoint of `A` in `(ℝ^κ, <·,·>_P)`.
pub fn p_adjoint(a: &MatrixSymbol, p: &InnerProduct) -> Result<DMatrix<f64>> {
    check_pair(a, p)?;
    Ok(p_adjoint_matrix(a.entries(), p))
}

pub(crate) fn p_adjoint_matrix(a: &DMatrix<f64>, p: &InnerProduct) -> DMatrix<f64> {
    p.gram_inverse() * a.transpose() * p.gram()
}

/// `‖AA*ₚ − A*ₚA‖_F / ‖A‖_F²`.
pub fn normality_defect(a: &MatrixSymbol, p: &InnerProduct) -> Result<f64> {
    check_pair(a, p)?;
    let m = a.entries();
    let adj = p_adjoint_matrix(m, p);
    let comm = m * &adj - &adj * m;
    Ok(comm.norm() / m.norm_squared())
}

pub fn is_normal(a: &MatrixSymbol, p: &InnerProduct, tol: f64) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("normality tolerance must be positive".into()));
    }
    Ok(normality_defect(a, p)? <= tol)
}

/// `sup_{x≠0} |Ax|_P / |x|_P`.
pub fn op_norm(a: &MatrixSymbol, p: &InnerProduct) -> Result<f64> {
    check_pair(a, p)?;
    Ok(p_op_norm(a.entries(), p))
}

pub(crate) fn p_op_norm(a: &DMatrix<f64>, p: &InnerProduct) -> f64 {
    spectral_norm(&(p.factor() * a * p.inv_factor()))
}

/// A P-unit vector attaining `op_norm` (`largest = true`) or the smallest
/// stretch `min |Ax|_P / |x|_P` (`largest = false`).
pub(crate) fn extremal_direction(a: &DMatrix<f64>, p: &InnerProduct, largest: bool) -> (Vec<f64>, f64) {
    let conj = p.factor() * a * p.inv_factor();
    let gram = conj.transpose() * &conj;
    let (values, vectors) = sym_eigen(&symmetrize(&gram));
    let idx = if largest { values.len() - 1 } else { 0 };
    let v: Vec<f64> = vectors.column(idx).iter().copied().collect();
    // back to original coordinates: x = P^{-1/2} v has |x|_P = 1
    let x = mat_vec(p.inv_factor(), &v);
    (x, values[idx].max(0.0).sqrt())
}

/// Serializable snapshot of a symbol, used in reports.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SymbolSummary {
    pub dim: usize,
    pub absdet: f64,
    pub op_norm: f64,
    pub inverse_op_norm: f64,
    pub normality_defect: f64,
    pub normal: bool,
}

impl SymbolSummary {
    pub fn new(a: &MatrixSymbol, p: &InnerProduct, tol: f64) -> Result<Self> {
        let defect = normality_defect(a, p)?;
        Ok(Self {
            dim: a.dim(),
            absdet: a.absdet(),
            op_norm: op_norm(a, p)?,
            inverse_op_norm: op_norm(&a.inverted(), p)?,
            normality_defect: defect,
            normal: defect <= tol,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rotation_like() -> (MatrixSymbol, InnerProduct) {
        let a = MatrixSymbol::from_row_slice(2, &[0.0, -2.0, 0.5, 0.0]).unwrap();
        let p = InnerProduct::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0]))).unwrap();
        (a, p)
    }

    #[test]
    fn euclidean_adjoint_is_transpose() {
        let a = MatrixSymbol::from_row_slice(2, &[1.0, 2.0, 3.0, 5.0]).unwrap();
        let adj = p_adjoint(&a, &InnerProduct::identity(2)).unwrap();
        assert_eq!(adj, a.entries().transpose());
        let id = MatrixSymbol::identity(2);
        let (_, p) = rotation_like();
        assert_relative_eq!(p_adjoint(&id, &p).unwrap(), DMatrix::identity(2, 2), epsilon = 1e-15);
    }

    #[test]
    fn adjoint_identity_on_random_pairs() {
        let (a, p) = rotation_like();
        let adj = p_adjoint(&a, &p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let y: Vec<f64> = (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let lhs = p.inner(&a.apply(&x), &y);
            let rhs = p.inner(&x, &mat_vec(&adj, &y));
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn normality_examples() {
        let tol = DEFAULT_NORMALITY_TOL;
        assert!(is_normal(&MatrixSymbol::identity(3), &InnerProduct::identity(3), tol).unwrap());
        let shear = MatrixSymbol::from_row_slice(2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(!is_normal(&shear, &InnerProduct::identity(2), tol).unwrap());
        let (a, p) = rotation_like();
        assert!(is_normal(&a, &p, tol).unwrap());
        assert!(!is_normal(&a, &InnerProduct::identity(2), tol).unwrap());
        assert!(is_normal(&a, &p, 0.0).is_err());
    }

    #[test]
    fn operator_norm_examples() {
        let (a, p) = rotation_like();
        assert_relative_eq!(op_norm(&a, &p).unwrap(), 1.0, epsilon = 1e-14);
        let two = MatrixSymbol::from_row_slice(2, &[2.0, 0.0, 0.0, 2.0]).unwrap();
        assert_relative_eq!(op_norm(&two, &p).unwrap(), 2.0, epsilon = 1e-14);
        let shear = MatrixSymbol::from_row_slice(2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert_relative_eq!(op_norm(&shear, &InnerProduct::identity(2)).unwrap(), golden, epsilon = 1e-14);
    }

    #[test]
    fn singular_and_bad_inputs_rejected() {
        assert!(matches!(
            MatrixSymbol::from_row_slice(2, &[1.0, 2.0, 2.0, 4.0]),
            Err(Error::Singular { .. })
        ));
        assert!(MatrixSymbol::from_row_slice(2, &[1.0, 2.0, 3.0]).is_err());
        assert!(InnerProduct::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0])).is_err());
        assert!(InnerProduct::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])).is_err());
        assert!(matches!(
            MatrixSymbol::new(DMatrix::identity(9, 9)),
            Err(Error::UnsupportedDimension(9))
        ));
        let a = MatrixSymbol::identity(2);
        assert!(op_norm(&a, &InnerProduct::identity(3)).is_err());
    }

    #[test]
    fn extremal_direction_attains_norm() {
        let a = MatrixSymbol::from_row_slice(2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        let p = InnerProduct::new(DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0])).unwrap();
        let (u, s) = extremal_direction(a.entries(), &p, true);
        assert_relative_eq!(p.norm_sq(&u), 1.0, epsilon = 1e-12);
        assert_relative_eq!(p.norm_sq(&a.apply(&u)).sqrt(), s, epsilon = 1e-12);
        assert_relative_eq!(s, op_norm(&a, &p).unwrap(), epsilon = 1e-12);
    }
}
