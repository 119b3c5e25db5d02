//! Two-particle Hilbert space built from a `d`-dimensional one-particle basis.
//!
//! The product basis `|u_i(1); u_j(2)⟩` is laid out row-major with the
//! particle-1 index outer, so product index `k = i·d + j`. The exchange
//! eigenbasis lists the symmetric kets `|Ψ_s;ij⟩` (i ≤ j, lexicographic)
//! followed by the antisymmetric kets `|Ψ_a;ij⟩` (i < j, lexicographic).

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{r, ComplexMatrix, Ket, ONE, ZERO};

/// Largest supported one-particle dimension.
pub const MAX_DIM: usize = 16;

/// Index bookkeeping for the product and exchange eigenbases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairBasis {
    d: usize,
}

/// Exchange parity of an eigenbasis element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Symmetric => 1.0,
            Parity::Antisymmetric => -1.0,
        }
    }
}

impl PairBasis {
    pub fn new(d: usize) -> Result<Self> {
        Self::try_from_signed(d as i64)
    }

    /// Validates a possibly negative dimension, e.g. straight from a config file.
    pub fn try_from_signed(d: i64) -> Result<Self> {
        if d < 2 || d > MAX_DIM as i64 {
            return Err(Error::InvalidDimension { got: d, max: MAX_DIM });
        }
        Ok(Self { d: d as usize })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Two-particle dimension `d²`.
    pub fn dim(&self) -> usize {
        self.d * self.d
    }

    pub fn sym_count(&self) -> usize {
        self.d * (self.d + 1) / 2
    }

    pub fn asym_count(&self) -> usize {
        self.d * (self.d - 1) / 2
    }

    pub fn product_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.d && j < self.d);
        i * self.d + j
    }

    /// Inverse of [`product_index`](Self::product_index).
    pub fn product_pair(&self, k: usize) -> (usize, usize) {
        (k / self.d, k % self.d)
    }

    /// Product index of `P|u_i u_j⟩ = |u_j u_i⟩`.
    pub fn swapped(&self, k: usize) -> usize {
        let (i, j) = self.product_pair(k);
        self.product_index(j, i)
    }

    /// Position of `|Ψ_s;ij⟩` in the eigenbasis, for `i ≤ j`.
    pub fn sym_index(&self, i: usize, j: usize) -> usize {
        assert!(i <= j && j < self.d, "sym_index needs i <= j < d");
        // rows 0..i contribute d, d-1, ..., d-i+1 elements
        i * self.d - i * (i.saturating_sub(1)) / 2 + (j - i)
    }

    /// Position of `|Ψ_a;ij⟩` in the eigenbasis, for `i < j`.
    pub fn asym_index(&self, i: usize, j: usize) -> usize {
        assert!(i < j && j < self.d, "asym_index needs i < j < d");
        let offset = i * (self.d - 1) - i * (i.saturating_sub(1)) / 2;
        self.sym_count() + offset + (j - i - 1)
    }

    /// `(i, j)` pairs of the symmetric eigenbasis in order.
    pub fn sym_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.d)
            .flat_map(|i| (i..self.d).map(move |j| (i, j)))
            .collect()
    }

    /// `(i, j)` pairs of the antisymmetric eigenbasis in order.
    pub fn asym_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.d)
            .flat_map(|i| (i + 1..self.d).map(move |j| (i, j)))
            .collect()
    }

    pub fn check_ket(&self, k: &Ket) -> Result<()> {
        if k.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: k.dim(),
            });
        }
        Ok(())
    }

    pub fn check_operator(&self, m: &ComplexMatrix) -> Result<()> {
        if m.rows() != self.dim() || m.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: if m.rows() != self.dim() { m.rows() } else { m.cols() },
            });
        }
        Ok(())
    }

    /// The exchange operator `P` as an explicit 0/1 matrix.
    pub fn permutation(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut p = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            p[(self.swapped(k), k)] = ONE;
        }
        p
    }

    /// `S = ½(1 + P)`.
    pub fn symmetrizer(&self) -> ComplexMatrix {
        (ComplexMatrix::identity(self.dim()) + self.permutation()) * 0.5
    }

    /// `A = ½(1 − P)`.
    pub fn antisymmetrizer(&self) -> ComplexMatrix {
        (ComplexMatrix::identity(self.dim()) - self.permutation()) * 0.5
    }

    /// `|Ψ_s;ij⟩ = (|u_i u_j⟩ + |u_j u_i⟩)/√(2(1+δ_ij))`.
    pub fn sym_ket(&self, i: usize, j: usize) -> Ket {
        let mut k = Ket::zeros(self.dim());
        if i == j {
            k[self.product_index(i, i)] = ONE;
        } else {
            k[self.product_index(i, j)] = r(FRAC_1_SQRT_2);
            k[self.product_index(j, i)] = r(FRAC_1_SQRT_2);
        }
        k
    }

    /// `|Ψ_a;ij⟩ = (|u_i u_j⟩ − |u_j u_i⟩)/√2`, `i < j`.
    pub fn asym_ket(&self, i: usize, j: usize) -> Ket {
        assert!(i < j, "antisymmetric kets need i < j");
        let mut k = Ket::zeros(self.dim());
        k[self.product_index(i, j)] = r(FRAC_1_SQRT_2);
        k[self.product_index(j, i)] = r(-FRAC_1_SQRT_2);
        k
    }

    pub fn sym_eigenbasis(&self) -> Vec<Ket> {
        self.sym_pairs()
            .into_iter()
            .map(|(i, j)| self.sym_ket(i, j))
            .collect()
    }

    pub fn asym_eigenbasis(&self) -> Vec<Ket> {
        self.asym_pairs()
            .into_iter()
            .map(|(i, j)| self.asym_ket(i, j))
            .collect()
    }

    /// Parity of eigenbasis position `e`.
    pub fn parity(&self, e: usize) -> Parity {
        if e < self.sym_count() {
            Parity::Symmetric
        } else {
            Parity::Antisymmetric
        }
    }

    /// Unitary whose columns are the exchange eigenkets (symmetric first).
    pub fn eigenbasis_matrix(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut u = ComplexMatrix::zeros(n, n);
        for (col, ket) in self
            .sym_eigenbasis()
            .into_iter()
            .chain(self.asym_eigenbasis())
            .enumerate()
        {
            for row in 0..n {
                u[(row, col)] = ket[row];
            }
        }
        u
    }

    /// Product-basis amplitudes `c_ij` to eigenbasis amplitudes, using
    /// `(c_ij + c_ji)/√(2(1+δ_ij))` and `(c_ij − c_ji)/√2`.
    pub fn to_eigen(&self, psi: &Ket) -> Result<Ket> {
        self.check_ket(psi)?;
        let mut out = Ket::zeros(self.dim());
        for (i, j) in self.sym_pairs() {
            let cij = psi[self.product_index(i, j)];
            let cji = psi[self.product_index(j, i)];
            let norm = if i == j { 0.5 } else { FRAC_1_SQRT_2 };
            out[self.sym_index(i, j)] = (cij + cji) * norm;
        }
        for (i, j) in self.asym_pairs() {
            let cij = psi[self.product_index(i, j)];
            let cji = psi[self.product_index(j, i)];
            out[self.asym_index(i, j)] = (cij - cji) * FRAC_1_SQRT_2;
        }
        Ok(out)
    }

    /// Eigenbasis amplitudes back to the product basis (basis inversion).
    pub fn from_eigen(&self, coeffs: &Ket) -> Result<Ket> {
        self.check_ket(coeffs)?;
        let mut out = Ket::zeros(self.dim());
        for i in 0..self.d {
            for j in 0..self.d {
                let k = self.product_index(i, j);
                out[k] = match i.cmp(&j) {
                    std::cmp::Ordering::Equal => coeffs[self.sym_index(i, i)],
                    std::cmp::Ordering::Less => {
                        (coeffs[self.sym_index(i, j)] + coeffs[self.asym_index(i, j)]) * FRAC_1_SQRT_2
                    }
                    std::cmp::Ordering::Greater => {
                        (coeffs[self.sym_index(j, i)] - coeffs[self.asym_index(j, i)]) * FRAC_1_SQRT_2
                    }
                };
            }
        }
        Ok(out)
    }

    /// Splits `|Ψ⟩` into `(S|Ψ⟩, A|Ψ⟩)`.
    pub fn decompose_ket(&self, psi: &Ket) -> Result<(Ket, Ket)> {
        self.check_ket(psi)?;
        let swapped = self.exchange_ket(psi);
        let half = r(0.5);
        let sym = (psi + &swapped).scale(half);
        let anti = (psi - &swapped).scale(half);
        Ok((sym, anti))
    }

    /// `P|Ψ⟩` by index permutation.
    pub fn exchange_ket(&self, psi: &Ket) -> Ket {
        let mut out = Ket::zeros(psi.dim());
        for k in 0..psi.dim() {
            out[self.swapped(k)] = psi[k];
        }
        out
    }

    /// `P·M` by row permutation.
    pub fn exchange_left(&self, m: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(self.swapped(i), j)])
    }

    /// `M·P` by column permutation.
    pub fn exchange_right(&self, m: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, self.swapped(j))])
    }

    /// `P·M·P`.
    pub fn exchange_conjugate(&self, m: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| {
            m[(self.swapped(i), self.swapped(j))]
        })
    }

    /// `Tr(P·M)`.
    pub fn trace_exchange(&self, m: &ComplexMatrix) -> num_complex::Complex64 {
        (0..m.rows()).fold(ZERO, |acc, k| acc + m[(self.swapped(k), k)])
    }

    /// Rewrites an operator in the exchange eigenbasis: `U† M U`.
    pub fn to_eigen_operator(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let u = self.eigenbasis_matrix();
        &(&u.adjoint() * m) * &u
    }

    /// Inverse of [`to_eigen_operator`](Self::to_eigen_operator).
    pub fn from_eigen_operator(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let u = self.eigenbasis_matrix();
        &(&u * m) * &u.adjoint()
    }

    /// Embeds a one-particle operator as `H(1) ⊗ 1(2)`.
    pub fn one_body_first(&self, h: &ComplexMatrix) -> ComplexMatrix {
        h.kron(&ComplexMatrix::identity(self.d))
    }

    /// Embeds a one-particle operator as `1(1) ⊗ H(2)`.
    pub fn one_body_second(&self, h: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::identity(self.d).kron(h)
    }
}
