//! Witness that the trace-preserving symmetrization map is positive but not
//! two-positive: an 8×8 block matrix `Σ E_ij ⊗ M_ij` that is positive
//! before the map is applied blockwise and has a negative eigenvalue after.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ONE, ZERO};
use crate::output::{Cell, Table};
use crate::pairspace::PairBasis;
use crate::states::matrix_symmetricity;
use crate::symmap::{noncp_matrix, ScheduleSample};

/// Verdict threshold on the smallest eigenvalue.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// `½|++⟩⟨++| + ¼(|+−⟩ − |−+⟩)(⟨+−| − ⟨−+|)`
pub fn m11() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[0.5, 0.0, 0.0, 0.0],
        &[0.0, 0.25, -0.25, 0.0],
        &[0.0, -0.25, 0.25, 0.0],
        &[0.0, 0.0, 0.0, 0.0],
    ])
}

/// `E₁₁ ⊗ diag(δ, 0)`, i.e. `δ|++⟩⟨++|`.
pub fn corner(delta: f64) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&[delta, 0.0, 0.0, 0.0])
}

/// `Λ_t(M₁₁) = [1 + mP]M₁₁` written out.
pub fn mapped_m11(m: f64) -> ComplexMatrix {
    let d = 0.25 * (1.0 - m);
    ComplexMatrix::from_real_rows(&[
        &[0.5 * (1.0 + m), 0.0, 0.0, 0.0],
        &[0.0, d, -d, 0.0],
        &[0.0, -d, d, 0.0],
        &[0.0, 0.0, 0.0, 0.0],
    ])
}

fn block_matrix(blocks: &[[ComplexMatrix; 2]; 2]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(8, 8);
    for (i, row) in blocks.iter().enumerate() {
        for (j, block) in row.iter().enumerate() {
            let e = ComplexMatrix::from_fn(2, 2, |r, c| if (r, c) == (i, j) { ONE } else { ZERO });
            out = out + e.kron(block);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockWitness {
    pub delta: f64,
    pub m: f64,
    pub blocks: [[ComplexMatrix; 2]; 2],
    pub mapped: [[ComplexMatrix; 2]; 2],
    pub before: ComplexMatrix,
    pub after: ComplexMatrix,
}

pub fn build_witness(delta: f64, m: f64) -> Result<BlockWitness> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("must be finite and > 0, got {delta}"),
        });
    }
    if !m.is_finite() || m.abs() > 0.5 {
        return Err(Error::SymmetricityBound { m, bound: 0.5 });
    }
    let c = corner(delta);
    let blocks = [[m11(), c.clone()], [c.clone(), c.clone()]];
    let mapped = [[mapped_m11(m), c.clone()], [c.clone(), c]];
    Ok(BlockWitness {
        delta,
        m,
        before: block_matrix(&blocks),
        after: block_matrix(&mapped),
        blocks,
        mapped,
    })
}

/// Applies the general trace-preserving map with an `a·s = 0` schedule to
/// each block, independently of the closed forms used by `build_witness`.
pub fn mapped_blocks_from_map(w: &BlockWitness) -> Result<[[ComplexMatrix; 2]; 2]> {
    let basis = PairBasis::new(2)?;
    let sample = ScheduleSample::orthogonal_with_m(w.m)?;
    let map = |b: &ComplexMatrix| -> Result<ComplexMatrix> {
        let r = matrix_symmetricity(basis, b)?;
        Ok(noncp_matrix(basis, b, &sample, r))
    };
    Ok([
        [map(&w.blocks[0][0])?, map(&w.blocks[0][1])?],
        [map(&w.blocks[1][0])?, map(&w.blocks[1][1])?],
    ])
}

/// `½δ ± ¼√(20δ² − 4δ + 1) + ¼`, `½`, `0`
pub fn before_closed_form(delta: f64) -> [f64; 4] {
    let root = 0.25 * (20.0 * delta * delta - 4.0 * delta + 1.0).sqrt();
    [0.5 * delta + 0.25 + root, 0.5 * delta + 0.25 - root, 0.5, 0.0]
}

/// `¼m + ½δ + ¼ − ¼√(m² − 4mδ + 2m + 20δ² − 4δ + 1)`
pub fn after_closed_form(delta: f64, m: f64) -> f64 {
    0.25 * m + 0.5 * delta + 0.25
        - 0.25 * (m * m - 4.0 * m * delta + 2.0 * m + 20.0 * delta * delta - 4.0 * delta + 1.0).sqrt()
}

/// `m < 2δ − 1`, under which the after matrix has a negative eigenvalue.
pub fn predicts_negative(delta: f64, m: f64) -> bool {
    m < 2.0 * delta - 1.0
}

fn nearest_distance(eigs: &[f64], v: f64) -> f64 {
    eigs.iter().map(|e| (e - v).abs()).fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdicts {
    pub before_positive: bool,
    pub after_positive: bool,
    pub predicted_negative: bool,
    /// The inequality agrees with the computed after-verdict.
    pub prediction_consistent: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormulaResiduals {
    /// Largest distance from a closed-form before-eigenvalue to the spectrum.
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub delta: f64,
    pub m: f64,
    pub before_eigs: Vec<f64>,
    pub after_eigs: Vec<f64>,
    pub verdicts: Verdicts,
    pub formula_residuals: FormulaResiduals,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

pub fn certify(w: &BlockWitness) -> Result<Certificate> {
    let before_eigs = w.before.eigenvalues_hermitian();
    let after_eigs = w.after.eigenvalues_hermitian();
    if before_eigs.iter().chain(&after_eigs).any(|e| !e.is_finite()) {
        return Err(Error::Contract("eigensolver returned non-finite values".into()));
    }
    let before_res = before_closed_form(w.delta)
        .iter()
        .map(|&v| nearest_distance(&before_eigs, v))
        .fold(0.0, f64::max);
    let after_res = nearest_distance(&after_eigs, after_closed_form(w.delta, w.m));
    let before_positive = before_eigs[0] >= -POSITIVITY_TOL;
    let after_positive = after_eigs[0] >= -POSITIVITY_TOL;
    let predicted_negative = predicts_negative(w.delta, w.m);
    Ok(Certificate {
        delta: w.delta,
        m: w.m,
        before_eigs,
        after_eigs,
        verdicts: Verdicts {
            before_positive,
            after_positive,
            predicted_negative,
            prediction_consistent: !predicted_negative || !after_positive,
        },
        formula_residuals: FormulaResiduals {
            before: before_res,
            after: after_res,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanCell {
    pub delta: f64,
    pub m: f64,
    pub before_positive: bool,
    pub after_positive: bool,
    pub predicted_negative: bool,
    pub min_after_eigenvalue: f64,
    /// Prediction says negative but the eigensolver says positive.
    pub mismatch: bool,
}

/// Certifies every `(δ, m)` cell; rows are ordered δ-major.
pub fn scan(deltas: &[f64], ms: &[f64]) -> Result<Vec<ScanCell>> {
    for &d in deltas {
        if !(d > 0.0 && d < 0.5) {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: format!("grid values must lie in (0, 1/2), got {d}"),
            });
        }
    }
    for &m in ms {
        if !(-0.5..=0.5).contains(&m) {
            return Err(Error::SymmetricityBound { m, bound: 0.5 });
        }
    }
    let cells: Vec<(f64, f64)> = deltas.iter().flat_map(|&d| ms.iter().map(move |&m| (d, m))).collect();
    cells
        .par_iter()
        .map(|&(delta, m)| {
            let cert = certify(&build_witness(delta, m)?)?;
            let v = cert.verdicts;
            Ok(ScanCell {
                delta,
                m,
                before_positive: v.before_positive,
                after_positive: v.after_positive,
                predicted_negative: v.predicted_negative,
                min_after_eigenvalue: cert.after_eigs[0],
                mismatch: !v.prediction_consistent,
            })
        })
        .collect()
}

pub fn scan_table(cells: &[ScanCell]) -> Table {
    let mut t = Table::new([
        "delta",
        "m",
        "before_positive",
        "after_positive",
        "predicted_negative",
        "min_after_eigenvalue",
        "mismatch",
    ]);
    for c in cells {
        t.push(vec![
            Cell::from(c.delta),
            c.m.into(),
            c.before_positive.into(),
            c.after_positive.into(),
            c.predicted_negative.into(),
            c.min_after_eigenvalue.into(),
            c.mismatch.into(),
        ]);
    }
    t
}

/// First scanned cell that is positive before and not positive after.
pub fn non_cp_witness(cells: &[ScanCell]) -> Option<ScanCell> {
    cells.iter().copied().find(|c| c.before_positive && !c.after_positive)
}
