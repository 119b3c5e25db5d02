//! Dense complex matrices and kets.
//!
//! Thin newtypes over `nalgebra` storage. Everything in the crate that is an
//! operator or a state is carried by [`ComplexMatrix`]; pure states by [`Ket`].

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Absolute tolerance on `max |M - M†|`.
pub const TOL_HERM: f64 = 1e-10;
/// Absolute tolerance on `| ||k|| - 1 |`.
pub const TOL_NORM: f64 = 1e-10;
/// Positivity tolerance, relative to the trace norm.
pub const TOL_POS: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Dense complex matrix, row-major semantics for indexing and serialization.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(rows, cols, |i, j| f(i, j)))
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_slice(rows: usize, cols: usize, data: &[Complex64]) -> Self {
        Self(DMatrix::from_row_slice(rows, cols, data))
    }

    /// Builds a real matrix from row-major entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        Self::from_fn(n, m, |i, j| r(rows[i][j]))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { r(diag[i]) } else { ZERO })
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &Ket, b: &Ket) -> Self {
        Self(&a.0 * b.0.adjoint())
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max_ij |self_ij - other_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape(), "shape mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        assert_eq!(self.cols(), other.rows());
        assert_eq!(self.rows(), other.cols());
        let mut acc = ZERO;
        for i in 0..self.rows() {
            for k in 0..self.cols() {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        acc
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// `½(M + M†)`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * r(0.5))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues_hermitian(&self) -> Vec<f64> {
        let h = self.hermitian_part();
        let mut eig: Vec<f64> = h.0.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(|a, b| a.total_cmp(b));
        eig
    }

    /// Eigen-decomposition of the Hermitian part: ascending eigenvalues and
    /// the matching orthonormal eigenvectors as columns.
    pub fn eigh(&self) -> (Vec<f64>, ComplexMatrix) {
        let h = self.hermitian_part();
        let eig = h.0.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let n = self.rows();
        let vectors = Self::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        (values, vectors)
    }

    pub fn min_eigenvalue_hermitian(&self) -> f64 {
        self.eigenvalues_hermitian()
            .first()
            .copied()
            .unwrap_or(0.0)
    }

    /// Sum of absolute eigenvalues of the Hermitian part.
    pub fn trace_norm_hermitian(&self) -> f64 {
        self.eigenvalues_hermitian().iter().map(|e| e.abs()).sum()
    }

    /// `min eig ≥ −tol · trace_norm`.
    pub fn is_positive(&self, tol: f64) -> bool {
        let eig = self.eigenvalues_hermitian();
        let norm: f64 = eig.iter().map(|e| e.abs()).sum();
        eig.first().map_or(true, |&m| m >= -tol * norm)
    }

    /// Square root of a positive semidefinite Hermitian matrix.
    pub fn sqrt_psd(&self) -> Self {
        let (vals, vecs) = self.eigh();
        let n = self.rows();
        let d = Self::from_fn(n, n, |i, j| {
            if i == j {
                r(vals[i].max(0.0).sqrt())
            } else {
                ZERO
            }
        });
        &(&vecs * &d) * &vecs.adjoint()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn apply(&self, k: &Ket) -> Ket {
        Ket(&self.0 * &k.0)
    }

    /// `⟨a|M|b⟩`.
    pub fn sandwich(&self, a: &Ket, b: &Ket) -> Complex64 {
        a.0.dotc(&(&self.0 * &b.0))
    }

    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.rows())
            .map(|i| {
                (0..self.cols())
                    .map(|j| {
                        let z = self.0[(i, j)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect()
    }

    pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: bad.len(),
            });
        }
        Ok(Self::from_fn(n, m, |i, j| c(rows[i][j][0], rows[i][j][1])))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut Complex64 {
        &mut self.0[idx]
    }
}

impl From<DMatrix<Complex64>> for ComplexMatrix {
    fn from(m: DMatrix<Complex64>) -> Self {
        Self(m)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(&self.0 $op &rhs.0)
            }
        }
        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op rhs.0)
            }
        }
        impl $trait<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op &rhs.0)
            }
        }
        impl $trait<ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(&self.0 $op rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Mul<Complex64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, s: Complex64) -> ComplexMatrix {
        ComplexMatrix(&self.0 * s)
    }
}

impl Mul<Complex64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, s: Complex64) -> ComplexMatrix {
        ComplexMatrix(self.0 * s)
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, s: f64) -> ComplexMatrix {
        ComplexMatrix(&self.0 * r(s))
    }
}

impl Mul<f64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, s: f64) -> ComplexMatrix {
        ComplexMatrix(self.0 * r(s))
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-self.0)
    }
}

/// A state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket(DVector<Complex64>);

impl Ket {
    pub fn zeros(dim: usize) -> Self {
        Self(DVector::zeros(dim))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut k = Self::zeros(dim);
        k.0[index] = ONE;
        k
    }

    pub fn from_vec(amplitudes: Vec<Complex64>) -> Self {
        Self(DVector::from_vec(amplitudes))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.0.as_slice()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_squared()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// Returns `None` for the zero ket.
    pub fn normalized(&self) -> Option<Ket> {
        let n = self.norm();
        (n > 0.0).then(|| Ket(&self.0 / r(n)))
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Ket) -> Complex64 {
        self.0.dotc(&other.0)
    }

    pub fn scale(&self, s: Complex64) -> Ket {
        Ket(&self.0 * s)
    }

    pub fn max_abs_diff(&self, other: &Ket) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.0.iter().map(|z| [z.re, z.im]).collect()
    }

    pub fn from_pairs(pairs: &[[f64; 2]]) -> Self {
        Self::from_vec(pairs.iter().map(|p| c(p[0], p[1])).collect())
    }
}

impl Index<usize> for Ket {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Ket {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

impl Add<&Ket> for &Ket {
    type Output = Ket;
    fn add(self, rhs: &Ket) -> Ket {
        Ket(&self.0 + &rhs.0)
    }
}

impl Sub<&Ket> for &Ket {
    type Output = Ket;
    fn sub(self, rhs: &Ket) -> Ket {
        Ket(&self.0 - &rhs.0)
    }
}

/// JSON form of a matrix: `{"d": .., "rows": [[[re, im], ..], ..]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub d: usize,
    pub rows: Vec<Vec<[f64; 2]>>,
}

/// JSON form of a ket: `{"d": .., "amplitudes": [[re, im], ..]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct KetJson {
    pub d: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn new(d: usize, m: &ComplexMatrix) -> Self {
        Self { d, rows: m.to_rows() }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let m = ComplexMatrix::from_rows(&self.rows)?;
        let n = self.d * self.d;
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.rows(),
            });
        }
        Ok(m)
    }
}

impl KetJson {
    pub fn new(d: usize, k: &Ket) -> Self {
        Self {
            d,
            amplitudes: k.to_pairs(),
        }
    }

    pub fn to_ket(&self) -> Result<Ket> {
        if self.amplitudes.len() != self.d * self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d * self.d,
                found: self.amplitudes.len(),
            });
        }
        Ok(Ket::from_pairs(&self.amplitudes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_eigenvalues_of_pauli_y() {
        let y = ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
        let e = y.eigenvalues_hermitian();
        assert!((e[0] + 1.0).abs() < 1e-14);
        assert!((e[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigh_reconstructs_complex_hermitian() {
        let m = ComplexMatrix::from_row_slice(
            3,
            3,
            &[r(2.0), c(0.5, 0.3), c(0.0, -1.0), c(0.5, -0.3), r(1.0), c(0.2, 0.1), c(0.0, 1.0), c(0.2, -0.1), r(-1.0)],
        );
        let (vals, vecs) = m.eigh();
        let d = ComplexMatrix::from_diagonal(&vals);
        let back = &(&vecs * &d) * &vecs.adjoint();
        assert!(back.max_abs_diff(&m) < 1e-13);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sqrt_psd_squares_back() {
        let g = ComplexMatrix::from_row_slice(2, 2, &[r(1.0), c(0.2, 0.4), c(-0.3, 0.1), r(0.7)]);
        let p = &g * &g.adjoint();
        let s = p.sqrt_psd();
        assert!((&s * &s).max_abs_diff(&p) < 1e-13);
    }

    #[test]
    fn trace_product_matches_full_product() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| c(i as f64 + 0.5, j as f64 - 1.0));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| c((i * j) as f64, 1.0));
        assert!((a.trace_product(&b) - (&a * &b).trace()).norm() < 1e-12);
    }

    #[test]
    fn json_rows_reject_ragged() {
        let rows = vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0]]];
        assert!(ComplexMatrix::from_rows(&rows).is_err());
    }
}
