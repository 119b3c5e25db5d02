//! Density operators on the two-particle space, symmetricity, symmetry
//! classification and the constructive decompositions into definite-symmetry
//! parts.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, Ket, TOL_HERM, TOL_NORM, TOL_POS};
use crate::pairspace::{PairBasis, Parity};

/// Relative Frobenius tolerance used by [`classify`].
pub const CLASSIFY_TOL: f64 = 1e-9;

/// Relative tolerance on `|Tr Pρ| / Tr ρ` for the perfectly-asymmetric domain.
pub const PA_TOL: f64 = 1e-9;

/// Maximum ensemble size.
pub const MAX_ENSEMBLE: usize = 64;

/// Components of a symmetry split lighter than this are treated as zero kets.
pub const DROP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    basis: PairBasis,
}

impl DensityOperator {
    /// Validates Hermiticity and positivity. The trace need not be one.
    pub fn new(basis: PairBasis, matrix: ComplexMatrix) -> Result<Self> {
        basis.check_operator(&matrix)?;
        if has_non_finite(&matrix) {
            return Err(Error::InvalidParameter {
                name: "rho",
                reason: "matrix has non-finite entries".into(),
            });
        }
        let deviation = matrix.hermiticity_deviation();
        if deviation > TOL_HERM {
            return Err(Error::NotHermitian { deviation });
        }
        let herm = matrix.hermitian_part();
        if !herm.is_positive(TOL_POS) {
            return Err(Error::NotPositive {
                min_eigenvalue: herm.min_eigenvalue_hermitian(),
            });
        }
        Ok(Self { matrix: herm, basis })
    }

    /// Wraps a matrix without validation; for test harnesses that need to
    /// push invalid inputs through a map on purpose.
    pub fn new_unchecked(basis: PairBasis, matrix: ComplexMatrix) -> Self {
        Self { matrix, basis }
    }

    /// Validated state that must also have unit trace.
    pub fn new_normalized(basis: PairBasis, matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::new(basis, matrix)?;
        if !rho.is_normalized() {
            return Err(Error::NotNormalized { trace: rho.trace() });
        }
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|` for a ket of dimension `d²`.
    pub fn pure(basis: PairBasis, psi: &Ket) -> Result<Self> {
        basis.check_ket(psi)?;
        Ok(Self {
            matrix: ComplexMatrix::outer(psi, psi),
            basis,
        })
    }

    /// `1/d²`.
    pub fn maximally_mixed(basis: PairBasis) -> Self {
        let n = basis.dim();
        Self {
            matrix: ComplexMatrix::identity(n) * (1.0 / n as f64),
            basis,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn basis(&self) -> PairBasis {
        self.basis
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn is_normalized(&self) -> bool {
        (self.trace() - 1.0).abs() <= TOL_NORM
    }

    /// Divides by the trace.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr.abs() <= f64::MIN_POSITIVE {
            return Err(Error::ZeroTrace);
        }
        Ok(Self {
            matrix: &self.matrix * (1.0 / tr),
            basis: self.basis,
        })
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix.min_eigenvalue_hermitian()
    }

    pub fn symmetricity(&self) -> Result<f64> {
        symmetricity(self)
    }

    pub fn classify(&self) -> Classification {
        classify(self)
    }

    /// Convex combination `Σ w_k ρ_k` of states on the same basis.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidEnsemble("empty mixture".into()))?;
        let basis = first.1.basis;
        let mut acc = ComplexMatrix::zeros(basis.dim(), basis.dim());
        for (w, rho) in parts {
            if rho.basis != basis {
                return Err(Error::DimensionMismatch {
                    expected: basis.dim(),
                    found: rho.basis.dim(),
                });
            }
            acc = acc + &rho.matrix * *w;
        }
        Self::new(basis, acc)
    }

    pub fn to_json(&self, kind: Option<RandomKind>, seed: Option<u64>) -> DensityJson {
        DensityJson {
            d: self.basis.d(),
            kind,
            seed,
            rows: self.matrix.to_rows(),
        }
    }

    pub fn from_json(json: &DensityJson) -> Result<Self> {
        let basis = PairBasis::new(json.d)?;
        let m = ComplexMatrix::from_rows(&json.rows)?;
        Self::new(basis, m)
    }
}

fn has_non_finite(m: &ComplexMatrix) -> bool {
    m.as_dmatrix()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityJson {
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<RandomKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub rows: Vec<Vec<[f64; 2]>>,
}

/// Weighted pure states `Σ p_r |Ψ_r⟩⟨Ψ_r|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    basis: PairBasis,
    weights: Vec<f64>,
    kets: Vec<Ket>,
}

impl Ensemble {
    pub fn new(basis: PairBasis, weights: Vec<f64>, kets: Vec<Ket>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidEnsemble("no members".into()));
        }
        if weights.len() != kets.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} weights for {} kets",
                weights.len(),
                kets.len()
            )));
        }
        if weights.len() > MAX_ENSEMBLE {
            return Err(Error::InvalidEnsemble(format!(
                "{} members exceeds the cap of {MAX_ENSEMBLE}",
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidEnsemble(format!("weight {w} is not positive")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}, not 1")));
        }
        for (idx, k) in kets.iter().enumerate() {
            basis.check_ket(k)?;
            if !k.is_normalized(TOL_NORM) {
                return Err(Error::InvalidEnsemble(format!(
                    "ket {idx} has norm {}",
                    k.norm()
                )));
            }
        }
        Ok(Self { basis, weights, kets })
    }

    pub fn basis(&self) -> PairBasis {
        self.basis
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kets(&self) -> &[Ket] {
        &self.kets
    }

    pub fn density(&self) -> DensityOperator {
        let n = self.basis.dim();
        let mut acc = ComplexMatrix::zeros(n, n);
        for (p, k) in self.weights.iter().zip(&self.kets) {
            acc = acc + ComplexMatrix::outer(k, k) * *p;
        }
        DensityOperator::new_unchecked(self.basis, acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryClass {
    StateSymmetric,
    StateAntisymmetric,
    OperatorSymmetricOnly,
    NoDefiniteSymmetry,
}

/// Relative Frobenius residuals behind a classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `‖Pρ − ρ‖ / ‖ρ‖`
    pub state_symmetric: f64,
    /// `‖Pρ + ρ‖ / ‖ρ‖`
    pub state_antisymmetric: f64,
    /// `‖PρP − ρ‖ / ‖ρ‖`
    pub operator_symmetric: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: SymmetryClass,
    /// `None` for traceless input.
    pub symmetricity: Option<f64>,
    pub residuals: Residuals,
}

/// `Tr Pρ / Tr ρ` of a raw matrix.
pub fn matrix_symmetricity(basis: PairBasis, m: &ComplexMatrix) -> Result<f64> {
    let tr = m.trace().re;
    if tr.abs() <= f64::EPSILON * m.frobenius_norm() || tr == 0.0 {
        return Err(Error::ZeroTrace);
    }
    Ok(basis.trace_exchange(m).re / tr)
}

pub fn symmetricity(rho: &DensityOperator) -> Result<f64> {
    matrix_symmetricity(rho.basis, &rho.matrix)
}

pub fn residuals(basis: PairBasis, m: &ComplexMatrix) -> Residuals {
    let norm = m.frobenius_norm();
    if norm == 0.0 {
        return Residuals {
            state_symmetric: 0.0,
            state_antisymmetric: 0.0,
            operator_symmetric: 0.0,
        };
    }
    let pm = basis.exchange_left(m);
    let pmp = basis.exchange_conjugate(m);
    Residuals {
        state_symmetric: (&pm - m).frobenius_norm() / norm,
        state_antisymmetric: (&pm + m).frobenius_norm() / norm,
        operator_symmetric: (&pmp - m).frobenius_norm() / norm,
    }
}

pub fn classify(rho: &DensityOperator) -> Classification {
    let res = residuals(rho.basis, &rho.matrix);
    let class = if res.state_symmetric <= CLASSIFY_TOL {
        SymmetryClass::StateSymmetric
    } else if res.state_antisymmetric <= CLASSIFY_TOL {
        SymmetryClass::StateAntisymmetric
    } else if res.operator_symmetric <= CLASSIFY_TOL {
        SymmetryClass::OperatorSymmetricOnly
    } else {
        SymmetryClass::NoDefiniteSymmetry
    };
    Classification {
        class,
        symmetricity: symmetricity(rho).ok(),
        residuals: res,
    }
}

/// `T_S(O) = ½(O + POP)`.
pub fn operator_symmetrize(basis: PairBasis, o: &ComplexMatrix) -> Result<ComplexMatrix> {
    basis.check_operator(o)?;
    Ok((o + basis.exchange_conjugate(o)) * 0.5)
}

/// `T_A(O) = ½(O − POP)`.
pub fn operator_antisymmetrize(basis: PairBasis, o: &ComplexMatrix) -> Result<ComplexMatrix> {
    basis.check_operator(o)?;
    Ok((o - basis.exchange_conjugate(o)) * 0.5)
}

/// `SρS` computed as `¼(ρ + Pρ + ρP + PρP)`.
fn sandwich_s(basis: PairBasis, m: &ComplexMatrix) -> ComplexMatrix {
    (m + basis.exchange_left(m) + basis.exchange_right(m) + basis.exchange_conjugate(m)) * 0.25
}

/// `AρA` computed as `¼(ρ − Pρ − ρP + PρP)`.
fn sandwich_a(basis: PairBasis, m: &ComplexMatrix) -> ComplexMatrix {
    (m - basis.exchange_left(m) - basis.exchange_right(m) + basis.exchange_conjugate(m)) * 0.25
}

/// Projection onto one exchange eigenspace, `SρS` or `AρA`.
pub fn project(basis: PairBasis, m: &ComplexMatrix, parity: Parity) -> ComplexMatrix {
    match parity {
        Parity::Symmetric => sandwich_s(basis, m),
        Parity::Antisymmetric => sandwich_a(basis, m),
    }
}

/// A state-symmetric ρ written in the symmetric eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockForm {
    /// `⟨Ψ_s;ij|ρ|Ψ_s;kl⟩`, indexed by symmetric eigenbasis position.
    pub coefficients: ComplexMatrix,
    /// `Σ C_{ij,kl} |Ψ_s;ij⟩⟨Ψ_s;kl|` in the product basis.
    pub reconstructed: ComplexMatrix,
    pub coefficient_trace: f64,
    pub coefficient_hermiticity: f64,
}

pub fn lemma1_block_form(rho: &DensityOperator) -> Result<BlockForm> {
    let res = residuals(rho.basis, &rho.matrix);
    if res.state_symmetric > CLASSIFY_TOL {
        return Err(Error::NotStateSymmetric {
            residual: res.state_symmetric,
        });
    }
    let basis = rho.basis;
    let kets = basis.sym_eigenbasis();
    let n = kets.len();
    let images: Vec<Ket> = kets.iter().map(|k| rho.matrix.apply(k)).collect();
    let coefficients = ComplexMatrix::from_fn(n, n, |e, f| kets[e].inner(&images[f]));
    let dim = basis.dim();
    let mut reconstructed = ComplexMatrix::zeros(dim, dim);
    for e in 0..n {
        for f in 0..n {
            let coeff = coefficients[(e, f)];
            if coeff != Complex64::new(0.0, 0.0) {
                reconstructed = reconstructed + ComplexMatrix::outer(&kets[e], &kets[f]) * coeff;
            }
        }
    }
    Ok(BlockForm {
        coefficient_trace: coefficients.trace().re,
        coefficient_hermiticity: coefficients.hermiticity_deviation(),
        coefficients,
        reconstructed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitComponent {
    pub weight: f64,
    pub parity: Parity,
    /// Index of the ensemble member this component came from.
    pub source: usize,
    pub state: DensityOperator,
}

/// Per-member split `p_r → (p_{r,S}, p_{r,A})` with each part normalized.
/// Parts with squared norm below [`DROP_TOL`] are dropped and their weight
/// goes to the other part. This does not check operator symmetry; the
/// weighted components reproduce ρ only when the cross terms cancel.
pub fn symmetry_split(ens: &Ensemble) -> Result<Vec<SplitComponent>> {
    let basis = ens.basis;
    let mut out = Vec::new();
    for (source, (p, psi)) in ens.weights.iter().zip(&ens.kets).enumerate() {
        let (sym, anti) = basis.decompose_ket(psi)?;
        let ns = sym.norm_sqr();
        let na = anti.norm_sqr();
        let keep_s = ns >= DROP_TOL;
        let keep_a = na >= DROP_TOL;
        let (ws, wa) = match (keep_s, keep_a) {
            (true, true) => (p * ns / (ns + na), p * na / (ns + na)),
            (true, false) => (*p, 0.0),
            (false, true) => (0.0, *p),
            (false, false) => unreachable!("normalized ket has a nonzero part"),
        };
        for (keep, w, part, n, parity) in [
            (keep_s, ws, &sym, ns, Parity::Symmetric),
            (keep_a, wa, &anti, na, Parity::Antisymmetric),
        ] {
            if keep {
                let m = ComplexMatrix::outer(part, part) * (1.0 / n);
                out.push(SplitComponent {
                    weight: w,
                    parity,
                    source,
                    state: DensityOperator::new_unchecked(basis, m),
                });
            }
        }
    }
    Ok(out)
}

/// Writes an operator-symmetric ensemble state as a mixture of
/// state-symmetric and state-antisymmetric density operators.
pub fn lemma3_decompose(ens: &Ensemble) -> Result<Vec<SplitComponent>> {
    let rho = ens.density();
    let res = residuals(ens.basis, &rho.matrix);
    if res.operator_symmetric > CLASSIFY_TOL {
        return Err(Error::NotOperatorSymmetric {
            residual: res.operator_symmetric,
        });
    }
    symmetry_split(ens)
}

/// Splits a perfectly asymmetric, operator-symmetric ρ into `(ρ_A, ρ_S)`,
/// each of unit trace, with `ρ/Tr ρ = ½ρ_A + ½ρ_S`.
pub fn split_paos(rho: &DensityOperator) -> Result<(DensityOperator, DensityOperator)> {
    let basis = rho.basis;
    let tr = rho.trace();
    let r = symmetricity(rho)?;
    if r.abs() > PA_TOL {
        return Err(Error::NotPerfectlyAsymmetric { symmetricity: r });
    }
    let res = residuals(basis, &rho.matrix);
    if res.operator_symmetric > CLASSIFY_TOL {
        return Err(Error::NotOperatorSymmetric {
            residual: res.operator_symmetric,
        });
    }
    let scale = 2.0 / tr;
    let rho_s = sandwich_s(basis, &rho.matrix) * scale;
    let rho_a = sandwich_a(basis, &rho.matrix) * scale;
    Ok((
        DensityOperator::new_unchecked(basis, rho_a),
        DensityOperator::new_unchecked(basis, rho_s),
    ))
}

/// Residuals of the four Schrödinger/Heisenberg picture identities, in the
/// order SS, AA, SA, AS, together with the scale `‖O‖‖ψ‖‖φ‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PictureReport {
    pub residuals: [f64; 4],
    pub scale: f64,
}

impl PictureReport {
    pub fn max_relative(&self) -> f64 {
        let worst = self.residuals.iter().cloned().fold(0.0, f64::max);
        if self.scale == 0.0 {
            worst
        } else {
            worst / self.scale
        }
    }
}

pub fn picture_identity_check(
    basis: PairBasis,
    o: &ComplexMatrix,
    psi: &Ket,
    phi: &Ket,
) -> Result<PictureReport> {
    basis.check_operator(o)?;
    basis.check_ket(psi)?;
    basis.check_ket(phi)?;
    let (psi_s, psi_a) = basis.decompose_ket(psi)?;
    let (phi_s, phi_a) = basis.decompose_ket(phi)?;
    let o_s = operator_symmetrize(basis, o)?;
    let o_a = operator_antisymmetrize(basis, o)?;
    let anti_comm = basis.exchange_left(&o_s) + basis.exchange_right(&o_s);
    let comm = basis.exchange_left(&o_a) - basis.exchange_right(&o_a);

    let rhs = |m: ComplexMatrix| m.sandwich(psi, phi) * 0.5;
    let lhs = [
        o.sandwich(&psi_s, &phi_s),
        o.sandwich(&psi_a, &phi_a),
        o.sandwich(&psi_s, &phi_a),
        o.sandwich(&psi_a, &phi_s),
    ];
    let right = [
        rhs(&o_s + &anti_comm * 0.5),
        rhs(&o_s - &anti_comm * 0.5),
        rhs(&o_a + &comm * 0.5),
        rhs(&o_a - &comm * 0.5),
    ];
    let mut residuals = [0.0; 4];
    for k in 0..4 {
        residuals[k] = (lhs[k] - right[k]).norm();
    }
    Ok(PictureReport {
        residuals,
        scale: o.frobenius_norm() * psi.norm() * phi.norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomKind {
    Generic,
    StateSymmetric,
    StateAntisymmetric,
    PerfectlyAsymmetric,
    Paos,
}

impl RandomKind {
    pub const ALL: [RandomKind; 5] = [
        RandomKind::Generic,
        RandomKind::StateSymmetric,
        RandomKind::StateAntisymmetric,
        RandomKind::PerfectlyAsymmetric,
        RandomKind::Paos,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RandomKind::Generic => "generic",
            RandomKind::StateSymmetric => "state_symmetric",
            RandomKind::StateAntisymmetric => "state_antisymmetric",
            RandomKind::PerfectlyAsymmetric => "perfectly_asymmetric",
            RandomKind::Paos => "paos",
        }
    }
}

impl fmt::Display for RandomKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RandomKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RandomKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter {
                name: "kind",
                reason: format!(
                    "unknown kind `{s}`; expected one of generic, state_symmetric, \
                     state_antisymmetric, perfectly_asymmetric, paos"
                ),
            })
    }
}

/// Seeded source of random states. Entries of the Ginibre matrix `G` are
/// drawn real part first, row-major, from ChaCha8 seeded with `seed_from_u64`.
pub struct StateSampler {
    basis: PairBasis,
    rng: ChaCha8Rng,
}

impl StateSampler {
    pub fn new(basis: PairBasis, seed: u64) -> Self {
        Self {
            basis,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn gaussian(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn ginibre(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            let re = self.gaussian();
            let im = self.gaussian();
            data.push(c(re, im));
        }
        ComplexMatrix::from_row_slice(rows, cols, &data)
    }

    /// Normalized complex Gaussian ket of dimension `d²`.
    pub fn ket(&mut self) -> Ket {
        let n = self.basis.dim();
        let amps = (0..n)
            .map(|_| {
                let re = self.gaussian();
                let im = self.gaussian();
                c(re, im)
            })
            .collect();
        Ket::from_vec(amps).normalized().expect("gaussian ket is nonzero")
    }

    pub fn generic(&mut self) -> DensityOperator {
        let n = self.basis.dim();
        let g = self.ginibre(n, n);
        let m = &g * &g.adjoint();
        let tr = m.trace().re;
        DensityOperator::new_unchecked(self.basis, (m * (1.0 / tr)).hermitian_part())
    }

    pub fn in_eigenspace(&mut self, parity: Parity) -> DensityOperator {
        let g = self.generic();
        let m = project(self.basis, g.matrix(), parity);
        let tr = m.trace().re;
        DensityOperator::new_unchecked(self.basis, (m * (1.0 / tr)).hermitian_part())
    }

    pub fn perfectly_asymmetric(&mut self) -> DensityOperator {
        let rho1 = self.generic();
        let r1 = symmetricity(&rho1).expect("unit trace");
        if r1 == 0.0 {
            return rho1;
        }
        let mut rho2 = self.generic();
        let mut r2 = symmetricity(&rho2).expect("unit trace");
        if r1.signum() == r2.signum() || r2 == 0.0 {
            let parity = if r1 > 0.0 {
                Parity::Antisymmetric
            } else {
                Parity::Symmetric
            };
            rho2 = self.in_eigenspace(parity);
            r2 = parity.sign();
        }
        let alpha = -r2 / (r1 - r2);
        let m = rho1.matrix() * alpha + rho2.matrix() * (1.0 - alpha);
        DensityOperator::new_unchecked(self.basis, m)
    }

    pub fn paos(&mut self) -> DensityOperator {
        let s = self.in_eigenspace(Parity::Symmetric);
        let a = self.in_eigenspace(Parity::Antisymmetric);
        DensityOperator::new_unchecked(self.basis, (s.matrix() + a.matrix()) * 0.5)
    }

    /// A paos state `½ρ_A + ½ρ_S` whose blocks share the same spectrum, so
    /// `Tr ρ_A² = Tr ρ_S²`. Returns `(ρ, ρ_A, ρ_S)`.
    pub fn paos_equal_purity(&mut self) -> (DensityOperator, DensityOperator, DensityOperator) {
        let rho_a = self.in_eigenspace(Parity::Antisymmetric);
        let (vals, _) = rho_a.matrix().eigh();
        let spectrum: Vec<f64> = vals.into_iter().rev().take(self.basis.asym_count()).collect();
        let host = self.in_eigenspace(Parity::Symmetric);
        let (_, vecs) = host.matrix().eigh();
        let n = self.basis.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for (k, lambda) in spectrum.iter().enumerate() {
            let col = n - 1 - k;
            let w = Ket::from_vec((0..n).map(|row| vecs[(row, col)]).collect());
            m = m + ComplexMatrix::outer(&w, &w) * lambda.max(0.0);
        }
        let tr = m.trace().re;
        let rho_s = DensityOperator::new_unchecked(self.basis, (m * (1.0 / tr)).hermitian_part());
        let rho = DensityOperator::new_unchecked(
            self.basis,
            (rho_s.matrix() + rho_a.matrix()) * 0.5,
        );
        (rho, rho_a, rho_s)
    }

    pub fn draw(&mut self, kind: RandomKind) -> DensityOperator {
        match kind {
            RandomKind::Generic => self.generic(),
            RandomKind::StateSymmetric => self.in_eigenspace(Parity::Symmetric),
            RandomKind::StateAntisymmetric => self.in_eigenspace(Parity::Antisymmetric),
            RandomKind::PerfectlyAsymmetric => self.perfectly_asymmetric(),
            RandomKind::Paos => self.paos(),
        }
    }
}

pub fn random_density(seed: u64, basis: PairBasis, kind: RandomKind) -> DensityOperator {
    StateSampler::new(basis, seed).draw(kind)
}

/// The two-positivity witness state `½[|++⟩⟨++| + ½(|+−⟩ − |−+⟩)(⟨+−| − ⟨−+|)]` on `d = 2`.
pub fn witness_state() -> DensityOperator {
    let basis = PairBasis::new(2).expect("d = 2 is valid");
    let m = ComplexMatrix::from_real_rows(&[
        &[0.5, 0.0, 0.0, 0.0],
        &[0.0, 0.25, -0.25, 0.0],
        &[0.0, -0.25, 0.25, 0.0],
        &[0.0, 0.0, 0.0, 0.0],
    ]);
    DensityOperator::new_unchecked(basis, m)
}
