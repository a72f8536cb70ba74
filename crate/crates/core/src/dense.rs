//! Small dense complex matrices.
//!
//! Everything here is sized for exact work on registers of at most a dozen
//! qubits; no attempt is made at blocking or sparsity.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Square complex matrix acting on a `dimension`-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    inner: DMatrix<C64>,
}

/// Eigen-decomposition `A = V diag(values) V†` of a Hermitian matrix, with
/// eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DenseOperator,
}

impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            inner: DMatrix::from_fn(dim, dim, f),
        }
    }

    /// Build from row-major entries. `entries.len()` must be a perfect square.
    pub fn from_row_major(entries: &[C64]) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() {
            return Err(Error::Dimension(format!(
                "{} entries do not form a square matrix",
                entries.len()
            )));
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |r, c| if r == c { diag[r] } else { C64::new(0.0, 0.0) })
    }

    pub fn from_matrix(inner: DMatrix<C64>) -> Self {
        assert_eq!(inner.nrows(), inner.ncols(), "operator must be square");
        Self { inner }
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn as_matrix_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.inner
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.inner
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.inner[(row, col)]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.inner[(row, col)] = value;
    }

    pub fn to_row_major(&self) -> Vec<C64> {
        self.inner.transpose().iter().copied().collect()
    }

    pub fn dagger(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            inner: &self.inner * factor,
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "{} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            inner: &self.inner * &other.inner,
        })
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Spectral norm (largest singular value).
    pub fn operator_norm(&self) -> f64 {
        self.inner
            .clone()
            .singular_values()
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `A - A†`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    /// Largest entrywise modulus of `U†U - I`.
    pub fn unitarity_defect(&self) -> f64 {
        (&self.dagger() * self).max_abs_diff(&Self::identity(self.dim()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|r| (0..n).all(|c| r == c || self.get(r, c).norm() <= tol))
    }

    /// Integer power by repeated squaring.
    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.dim());
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Eigen-decomposition of a Hermitian matrix. Only the Hermitian part
    /// `(A + A†)/2` is used; callers are responsible for checking Hermiticity.
    pub fn eigh(&self) -> HermitianEigen {
        let herm = (&self.inner + self.inner.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(herm);
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(self.dim(), self.dim(), |r, c| {
            eig.eigenvectors[(r, order[c])]
        });
        HermitianEigen {
            values,
            vectors: Self { inner: vectors },
        }
    }

    /// `exp(-i H t)` for Hermitian `H` through its eigenbasis.
    pub fn exp_hermitian(&self, t: f64) -> Self {
        self.eigh().exp_i(t)
    }
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(f(E)) V†`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> DenseOperator {
        let n = self.dim();
        let v = self.vectors.as_matrix();
        let fe: Vec<C64> = self.values.iter().map(|&e| f(e)).collect();
        let mut scaled = v.clone();
        for c in 0..n {
            let mut col = scaled.column_mut(c);
            col *= fe[c];
        }
        DenseOperator {
            inner: scaled * v.adjoint(),
        }
    }

    /// `exp(-i H t)`.
    pub fn exp_i(&self, t: f64) -> DenseOperator {
        self.apply_fn(|e| C64::new(0.0, -e * t).exp())
    }

    /// Express an operator in the eigenbasis: `V† A V`.
    pub fn to_eigenbasis(&self, op: &DenseOperator) -> DenseOperator {
        let v = self.vectors.as_matrix();
        DenseOperator {
            inner: v.adjoint() * op.as_matrix() * v,
        }
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        DenseOperator {
            inner: &self.inner * &rhs.inner,
        }
    }
}

impl Add for &DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: &DenseOperator) -> DenseOperator {
        DenseOperator {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        DenseOperator {
            inner: &self.inner - &rhs.inner,
        }
    }
}
