//! The operator-sum map `Λ_t(σ) = Σ_α W_α σ W_α†` with `W_α = a_α A + s_α S`,
//! its trace-preserving non-linear extension, and entropy tracking.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decoherence::PositivityCertificate;
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, TOL_NORM, TOL_POS};
use crate::output::{Cell, Table};
use crate::pairspace::PairBasis;
use crate::states::{matrix_symmetricity, split_paos, DensityOperator, PA_TOL};

/// Largest channel count of a schedule.
pub const MAX_CHANNELS: usize = 8;

/// Coefficient vectors `a(t)`, `s(t)` at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSample {
    pub a: Vec<Complex64>,
    pub s: Vec<Complex64>,
}

/// `u·v = Σ u_α* v_α`.
fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(x, y)| x.conj() * y).sum()
}

impl ScheduleSample {
    pub fn new(a: Vec<Complex64>, s: Vec<Complex64>) -> Result<Self> {
        if a.len() != s.len() || a.is_empty() || a.len() > MAX_CHANNELS {
            return Err(Error::ScheduleConstraint(format!(
                "a and s need the same length in 1..={MAX_CHANNELS}, got {} and {}",
                a.len(),
                s.len()
            )));
        }
        Ok(Self { a, s })
    }

    pub fn real(a: &[f64], s: &[f64]) -> Result<Self> {
        Self::new(a.iter().map(|&x| c(x, 0.0)).collect(), s.iter().map(|&x| c(x, 0.0)).collect())
    }

    /// A two-channel sample with `a·s = 0`, `p = 1` and the requested `m`.
    pub fn orthogonal_with_m(m: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&m) {
            return Err(Error::SymmetricityBound { m, bound: 1.0 });
        }
        Self::real(&[(1.0 - m).sqrt(), 0.0], &[0.0, (1.0 + m).sqrt()])
    }

    pub fn channels(&self) -> usize {
        self.a.len()
    }

    /// `‖a‖²`
    pub fn a2(&self) -> f64 {
        dot(&self.a, &self.a).re
    }

    /// `‖s‖²`
    pub fn s2(&self) -> f64 {
        dot(&self.s, &self.s).re
    }

    /// `p = ½(‖s‖² + ‖a‖²)`
    pub fn p(&self) -> f64 {
        0.5 * (self.s2() + self.a2())
    }

    /// `m = ½(‖s‖² − ‖a‖²)`
    pub fn m(&self) -> f64 {
        0.5 * (self.s2() - self.a2())
    }

    /// `a·s = Σ a_α* s_α`
    pub fn a_dot_s(&self) -> Complex64 {
        dot(&self.a, &self.s)
    }

    /// `X = Σ s_α a_α*`, the sum entering the collision probability.
    pub fn cross_sum(&self) -> Complex64 {
        self.s.iter().zip(&self.a).map(|(s, a)| s * a.conj()).sum()
    }

    fn sum(&self) -> Vec<Complex64> {
        self.s.iter().zip(&self.a).map(|(s, a)| s + a).collect()
    }

    fn diff(&self) -> Vec<Complex64> {
        self.s.iter().zip(&self.a).map(|(s, a)| s - a).collect()
    }

    /// `‖s + a‖²`
    pub fn norm_sum2(&self) -> f64 {
        let v = self.sum();
        dot(&v, &v).re
    }

    /// `‖s − a‖²`
    pub fn norm_diff2(&self) -> f64 {
        let v = self.diff();
        dot(&v, &v).re
    }

    /// `(s + a)·(s − a)`, the coefficient of `Pσ`.
    pub fn sum_dot_diff(&self) -> Complex64 {
        dot(&self.sum(), &self.diff())
    }

    /// `(s − a)·(s + a)`, the coefficient of `σP`.
    pub fn diff_dot_sum(&self) -> Complex64 {
        dot(&self.diff(), &self.sum())
    }

    /// Kraus operators `W_α = a_α A + s_α S`.
    pub fn kraus(&self, basis: PairBasis) -> Vec<ComplexMatrix> {
        let a_proj = basis.antisymmetrizer();
        let s_proj = basis.symmetrizer();
        self.a
            .iter()
            .zip(&self.s)
            .map(|(a, s)| &a_proj * *a + &s_proj * *s)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinSchedule {
    ToAntisymmetric,
    ToSymmetric,
    Identity,
    Perpendicular,
}

impl BuiltinSchedule {
    pub const ALL: [BuiltinSchedule; 4] = [
        BuiltinSchedule::ToAntisymmetric,
        BuiltinSchedule::ToSymmetric,
        BuiltinSchedule::Identity,
        BuiltinSchedule::Perpendicular,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BuiltinSchedule::ToAntisymmetric => "to_antisymmetric",
            BuiltinSchedule::ToSymmetric => "to_symmetric",
            BuiltinSchedule::Identity => "identity",
            BuiltinSchedule::Perpendicular => "perpendicular",
        }
    }
}

impl fmt::Display for BuiltinSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BuiltinSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BuiltinSchedule::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter {
                name: "schedule",
                reason: format!(
                    "unknown schedule `{s}`; expected to_antisymmetric, to_symmetric, identity or perpendicular"
                ),
            })
    }
}

type ScheduleFn = Arc<dyn Fn(f64) -> ScheduleSample + Send + Sync>;

/// A time-dependent pair of coefficient vectors, evaluable at any `t ≥ 0`.
#[derive(Clone)]
pub enum Schedule {
    Builtin { kind: BuiltinSchedule, kappa: f64 },
    Custom { name: String, f: ScheduleFn },
}

impl fmt::Debug for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Builtin { kind, kappa } => write!(f, "Schedule::{kind}(kappa = {kappa})"),
            Schedule::Custom { name, .. } => write!(f, "Schedule::Custom({name})"),
        }
    }
}

impl Schedule {
    pub fn builtin(kind: BuiltinSchedule, kappa: f64) -> Result<Self> {
        if !kappa.is_finite() || kappa <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "kappa",
                reason: format!("must be finite and > 0, got {kappa}"),
            });
        }
        Ok(Schedule::Builtin { kind, kappa })
    }

    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> ScheduleSample + Send + Sync + 'static) -> Self {
        Schedule::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn at(&self, t: f64) -> ScheduleSample {
        match self {
            Schedule::Builtin { kind, kappa } => {
                let th = (kappa * t).tanh();
                let sech = 1.0 / (kappa * t).cosh();
                let sample = match kind {
                    BuiltinSchedule::ToAntisymmetric => ScheduleSample::real(&[th, 1.0], &[0.0, sech]),
                    BuiltinSchedule::ToSymmetric => ScheduleSample::real(&[0.0, sech], &[th, 1.0]),
                    BuiltinSchedule::Identity => ScheduleSample::real(&[1.0], &[1.0]),
                    BuiltinSchedule::Perpendicular => ScheduleSample::real(&[th, 1.0, 0.0], &[0.0, 0.0, sech]),
                };
                sample.expect("builtin schedules have matching lengths")
            }
            Schedule::Custom { f, .. } => f(t),
        }
    }

    pub fn kappa(&self) -> Option<f64> {
        match self {
            Schedule::Builtin { kappa, .. } => Some(*kappa),
            Schedule::Custom { .. } => None,
        }
    }

    /// Checks the initial conditions `a(0) = s(0)`, `‖a(0)‖ = ‖s(0)‖ = 1`,
    /// right-continuity at zero, and `p(t) = 1`, `|m(t)| ≤ 1` at `times`.
    pub fn check_constraints(&self, times: &[f64]) -> Result<()> {
        let zero = self.at(0.0);
        let gap = zero
            .a
            .iter()
            .zip(&zero.s)
            .map(|(a, s)| (a - s).norm())
            .fold(0.0, f64::max);
        if gap > 1e-12 {
            return Err(Error::ScheduleConstraint(format!("a(0) differs from s(0) by {gap:e}")));
        }
        if (zero.a2() - 1.0).abs() > 1e-12 || (zero.s2() - 1.0).abs() > 1e-12 {
            return Err(Error::ScheduleConstraint(format!(
                "need |a(0)|^2 = |s(0)|^2 = 1, got {} and {}",
                zero.a2(),
                zero.s2()
            )));
        }
        let eps = self.at(1e-9);
        let jump = eps
            .a
            .iter()
            .chain(&eps.s)
            .zip(zero.a.iter().chain(&zero.s))
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        if jump > 1e-6 {
            return Err(Error::ScheduleConstraint(format!("discontinuous at t = 0 (jump {jump:e})")));
        }
        for &t in times {
            let sample = self.at(t);
            if (sample.p() - 1.0).abs() > 1e-12 {
                return Err(Error::ScheduleConstraint(format!("p({t}) = {} is not 1", sample.p())));
            }
            if sample.m().abs() > 1.0 + 1e-12 {
                return Err(Error::SymmetricityBound { m: sample.m(), bound: 1.0 });
            }
        }
        Ok(())
    }
}

/// Serializable description of a builtin schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub kind: BuiltinSchedule,
    pub kappa: f64,
}

impl ScheduleSpec {
    pub fn build(&self) -> Result<Schedule> {
        Schedule::builtin(self.kind, self.kappa)
    }
}

/// `¼[‖a+s‖²σ + ‖s−a‖²PσP + (s+a)·(s−a)Pσ + (s−a)·(s+a)σP]`, unchecked.
pub fn four_term(basis: PairBasis, sigma: &ComplexMatrix, sample: &ScheduleSample) -> ComplexMatrix {
    let mut out = sigma * sample.norm_sum2();
    out = out + basis.exchange_conjugate(sigma) * sample.norm_diff2();
    out = out + basis.exchange_left(sigma) * sample.sum_dot_diff();
    out = out + basis.exchange_right(sigma) * sample.diff_dot_sum();
    out * 0.25
}

/// `Σ_α W_α σ W_α†` with explicit Kraus matrices.
pub fn kraus_sum(basis: PairBasis, sigma: &ComplexMatrix, sample: &ScheduleSample) -> ComplexMatrix {
    operator_sum(&sample.kraus(basis), sigma)
}

/// `Σ_k W_k σ W_k†` for arbitrary operators.
pub fn operator_sum(kraus: &[ComplexMatrix], sigma: &ComplexMatrix) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(sigma.rows(), sigma.cols());
    for w in kraus {
        acc = acc + &(w * sigma) * &w.adjoint();
    }
    acc
}

fn nonzero_symmetricity(sigma: &DensityOperator) -> Result<f64> {
    matrix_symmetricity(sigma.basis(), sigma.matrix())
}

/// `Λ_t(σ)` on the perfectly asymmetric domain, where it is completely
/// positive and trace preserving.
pub fn apply_map(sigma: &DensityOperator, sched: &Schedule, t: f64) -> Result<DensityOperator> {
    let r = nonzero_symmetricity(sigma)?;
    if r.abs() > PA_TOL {
        return Err(Error::NotPerfectlyAsymmetric { symmetricity: r });
    }
    let sample = sched.at(t);
    let m = sample.m();
    if m.abs() > 1.0 + 1e-12 {
        return Err(Error::SymmetricityBound { m, bound: 1.0 });
    }
    let out = four_term(sigma.basis(), sigma.matrix(), &sample);
    Ok(DensityOperator::new_unchecked(sigma.basis(), out))
}

/// `σ + ¼‖s−a‖²(PσP − σ) + ¼(s+a)·(s−a)(Pσ − σr) + ¼(s−a)·(s+a)(σP − σr)`
/// with `r = Tr Pσ / Tr σ`, unchecked.
pub fn noncp_matrix(basis: PairBasis, sigma: &ComplexMatrix, sample: &ScheduleSample, r: f64) -> ComplexMatrix {
    let sr = sigma * r;
    let mut out = sigma.clone();
    out = out + (basis.exchange_conjugate(sigma) - sigma) * (0.25 * sample.norm_diff2());
    out = out + (basis.exchange_left(sigma) - &sr) * (sample.sum_dot_diff() * 0.25);
    out = out + (basis.exchange_right(sigma) - &sr) * (sample.diff_dot_sum() * 0.25);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonCpOutput {
    pub state: DensityOperator,
    pub certificate: PositivityCertificate,
}

/// The trace-preserving extension of `Λ_t` to all of `B₊(H)`, valid for
/// `|m(t)| ≤ ½`. Positivity is not structural and is certified per call.
pub fn apply_map_noncp(sigma: &DensityOperator, sched: &Schedule, t: f64) -> Result<NonCpOutput> {
    let r = nonzero_symmetricity(sigma)?;
    let sample = sched.at(t);
    let m = sample.m();
    if m.abs() > 0.5 + 1e-12 {
        return Err(Error::SymmetricityBound { m, bound: 0.5 });
    }
    let out = noncp_matrix(sigma.basis(), sigma.matrix(), &sample, r);
    let certificate = PositivityCertificate::of(&out);
    Ok(NonCpOutput {
        state: DensityOperator::new_unchecked(sigma.basis(), out),
        certificate,
    })
}

/// `¼‖s+a‖² − [1 − ¼‖s−a‖² − ¼·2Re((s−a)·(s+a))·r]`, zero whenever
/// `p = 1 − r·m`.
pub fn constraint_identity_residual(sample: &ScheduleSample, r: f64) -> f64 {
    let lhs = 0.25 * sample.norm_sum2();
    let cross = sample.diff_dot_sum() + sample.sum_dot_diff();
    let rhs = 1.0 - 0.25 * sample.norm_diff2() - 0.25 * cross.re * r;
    lhs - rhs
}

/// `Tr σ(t) = p Tr σ + m Tr Pσ` for an arbitrary input.
pub fn predicted_trace(sample: &ScheduleSample, trace: f64, trace_p: f64) -> f64 {
    sample.p() * trace + sample.m() * trace_p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorSymmetry {
    Symmetric,
    Antisymmetric,
    Indefinite,
}

pub fn operator_symmetry(basis: PairBasis, w: &ComplexMatrix) -> OperatorSymmetry {
    let scale = w.frobenius_norm().max(f64::MIN_POSITIVE);
    let pw = basis.exchange_left(w);
    let wp = basis.exchange_right(w);
    if (&pw - &wp).frobenius_norm() <= 1e-10 * scale {
        OperatorSymmetry::Symmetric
    } else if (&pw + &wp).frobenius_norm() <= 1e-10 * scale {
        OperatorSymmetry::Antisymmetric
    } else {
        OperatorSymmetry::Indefinite
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConservationReport {
    pub symmetries: Vec<OperatorSymmetry>,
    pub completeness_residual: f64,
    pub trace_p_before: f64,
    pub trace_p_after: f64,
    /// `Σ ε_α Tr(W_α†W_α Pσ)`, when every operator has definite symmetry.
    pub predicted: Option<f64>,
    /// All operators share one symmetry, so `|Tr Pρ|` is conserved.
    pub conservation_implied: bool,
    /// `Tr Pρ` is unchanged by the map.
    pub conserved: bool,
}

pub fn symmetricity_conservation_check(
    basis: PairBasis,
    kraus: &[ComplexMatrix],
    sigma: &DensityOperator,
) -> Result<ConservationReport> {
    if kraus.is_empty() {
        return Err(Error::InvalidParameter {
            name: "kraus",
            reason: "need at least one operator".into(),
        });
    }
    for w in kraus {
        basis.check_operator(w)?;
    }
    let n = basis.dim();
    let mut completeness = ComplexMatrix::zeros(n, n);
    for w in kraus {
        completeness = completeness + &w.adjoint() * w;
    }
    let completeness_residual = completeness.max_abs_diff(&ComplexMatrix::identity(n));
    if completeness_residual > 1e-9 {
        return Err(Error::InvalidParameter {
            name: "kraus",
            reason: format!("sum of W^dagger W differs from 1 by {completeness_residual:e}"),
        });
    }
    let symmetries: Vec<OperatorSymmetry> = kraus.iter().map(|w| operator_symmetry(basis, w)).collect();
    let before = basis.trace_exchange(sigma.matrix()).re;
    let after_m = operator_sum(kraus, sigma.matrix());
    let after = basis.trace_exchange(&after_m).re;
    let p_sigma = basis.exchange_left(sigma.matrix());
    let predicted = if symmetries.contains(&OperatorSymmetry::Indefinite) {
        None
    } else {
        Some(
            kraus
                .iter()
                .zip(&symmetries)
                .map(|(w, sym)| {
                    let sign = if *sym == OperatorSymmetry::Symmetric { 1.0 } else { -1.0 };
                    sign * (&w.adjoint() * w).trace_product(&p_sigma).re
                })
                .sum(),
        )
    };
    let conservation_implied = symmetries.iter().all(|s| *s == OperatorSymmetry::Symmetric)
        || symmetries.iter().all(|s| *s == OperatorSymmetry::Antisymmetric);
    Ok(ConservationReport {
        conserved: (after - before).abs() <= 1e-10,
        symmetries,
        completeness_residual,
        trace_p_before: before,
        trace_p_after: after,
        predicted,
        conservation_implied,
    })
}

/// `−ln Tr ρ²` with `k = 1`.
pub fn renyi_entropy(rho: &DensityOperator) -> Result<f64> {
    if !rho.is_normalized() {
        return Err(Error::NotNormalized { trace: rho.trace() });
    }
    Ok(-rho.purity().ln())
}

/// `ΔS_R = −ln[1 + tanh⁴(κt)]` for the tanh/sech schedules.
pub fn entropy_change_closed(kappa_t: f64) -> f64 {
    -(kappa_t.tanh().powi(4)).ln_1p()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapRow {
    pub t: f64,
    pub m_t: f64,
    pub symmetricity_measured: f64,
    pub trace: f64,
    pub renyi_entropy: f64,
    /// `S_R(0) − ln[2 − |a·s|²]`, a lower bound on `S_R(t)`.
    pub entropy_bound_rhs: f64,
    pub min_eigenvalue: f64,
    /// `S_R(0) − ln{½[‖a‖⁴ + ‖s‖⁴]}`, present when the equal-purity
    /// hypothesis holds.
    pub entropy_predicted: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapReport {
    pub rows: Vec<MapRow>,
    /// The input is paos with `Tr ρ_A² = Tr ρ_S²`, so the purity formula
    /// applies; otherwise only the general bound is checked.
    pub equal_purity: bool,
    pub max_trace_drift: f64,
    pub all_positive: bool,
    pub bound_holds: bool,
}

impl MapReport {
    pub fn to_table(&self) -> Table {
        let mut table = Table::new([
            "t",
            "m_t",
            "symmetricity_measured",
            "trace",
            "renyi_entropy",
            "entropy_bound_rhs",
            "min_eigenvalue",
        ]);
        for r in &self.rows {
            table.push(vec![
                Cell::from(r.t),
                r.m_t.into(),
                r.symmetricity_measured.into(),
                r.trace.into(),
                r.renyi_entropy.into(),
                r.entropy_bound_rhs.into(),
                r.min_eigenvalue.into(),
            ]);
        }
        table
    }
}

/// Rows for `Λ_t` on the perfectly asymmetric domain.
pub fn entropy_trajectory(sigma: &DensityOperator, sched: &Schedule, times: &[f64]) -> Result<MapReport> {
    trajectory_with(sigma, sched, times, |t| apply_map(sigma, sched, t))
}

/// Rows for the trace-preserving extension, valid for any input while
/// `|m(t)| ≤ ½`. `all_positive` carries the per-call certificates.
pub fn extended_trajectory(sigma: &DensityOperator, sched: &Schedule, times: &[f64]) -> Result<MapReport> {
    trajectory_with(sigma, sched, times, |t| apply_map_noncp(sigma, sched, t).map(|o| o.state))
}

fn trajectory_with(
    sigma: &DensityOperator,
    sched: &Schedule,
    times: &[f64],
    map: impl Fn(f64) -> Result<DensityOperator>,
) -> Result<MapReport> {
    let s0 = renyi_entropy(sigma)?;
    let equal_purity = match split_paos(sigma) {
        Ok((ra, rs)) => (ra.purity() - rs.purity()).abs() <= 1e-10,
        Err(_) => false,
    };
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let sample = sched.at(t);
        let out = map(t)?;
        let trace = out.trace();
        let renyi = if (trace - 1.0).abs() <= TOL_NORM {
            renyi_entropy(&out)?
        } else {
            -(out.purity() / (trace * trace)).ln()
        };
        let as2 = sample.a_dot_s().norm_sqr();
        let a2 = sample.a2();
        let s2 = sample.s2();
        rows.push(MapRow {
            t,
            m_t: sample.m(),
            symmetricity_measured: matrix_symmetricity(out.basis(), out.matrix())?,
            trace,
            renyi_entropy: renyi,
            entropy_bound_rhs: s0 - (2.0 - as2).ln(),
            min_eigenvalue: out.min_eigenvalue(),
            entropy_predicted: equal_purity.then(|| s0 - (0.5 * (a2 * a2 + s2 * s2)).ln()),
        });
    }
    let max_trace_drift = rows
        .iter()
        .map(|r| (r.trace - sigma.trace()).abs())
        .fold(0.0, f64::max);
    let all_positive = rows.iter().all(|r| r.min_eigenvalue >= -TOL_POS);
    let bound_holds = rows.iter().all(|r| r.renyi_entropy >= r.entropy_bound_rhs - 1e-10);
    Ok(MapReport {
        rows,
        equal_purity,
        max_trace_drift,
        all_positive,
        bound_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Ket, ZERO};
    use crate::pairspace::Parity;
    use crate::states::{witness_state, random_density, RandomKind, StateSampler, SymmetryClass};

    fn b(d: usize) -> PairBasis {
        PairBasis::new(d).unwrap()
    }

    fn sched(kind: BuiltinSchedule) -> Schedule {
        Schedule::builtin(kind, 1.0).unwrap()
    }

    #[test]
    fn to_antisymmetric_initial_and_symmetricity() {
        let s = sched(BuiltinSchedule::ToAntisymmetric);
        let zero = s.at(0.0);
        assert_eq!(zero.a, vec![ZERO, c(1.0, 0.0)]);
        assert_eq!(zero.s, vec![ZERO, c(1.0, 0.0)]);
        let two = s.at(2.0);
        assert!((two.m() + 2.0f64.tanh().powi(2)).abs() < 1e-15);
        assert!((two.m() + 0.9293).abs() < 1e-4);
        assert!((two.p() - 1.0).abs() < 1e-15);
        let late = sched(BuiltinSchedule::ToSymmetric).at(30.0);
        assert!((late.m() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn builtin_constraints() {
        let times = [0.0, 0.5, 1.0, 4.0];
        for kind in [BuiltinSchedule::ToAntisymmetric, BuiltinSchedule::ToSymmetric, BuiltinSchedule::Identity] {
            sched(kind).check_constraints(&times).unwrap();
        }
        let perp = sched(BuiltinSchedule::Perpendicular);
        assert!(matches!(perp.check_constraints(&times), Err(Error::ScheduleConstraint(_))));
        for t in times {
            let sample = perp.at(t);
            assert!(sample.a_dot_s().norm() < 1e-15);
            let anti = sched(BuiltinSchedule::ToAntisymmetric).at(t);
            assert!((sample.a2() - anti.a2()).abs() < 1e-15);
            assert!((sample.s2() - anti.s2()).abs() < 1e-15);
        }
        assert!(Schedule::builtin(BuiltinSchedule::Identity, 0.0).is_err());
    }

    #[test]
    fn identity_schedule_is_identity() {
        let sigma = random_density(1, b(3), RandomKind::PerfectlyAsymmetric);
        let out = apply_map(&sigma, &sched(BuiltinSchedule::Identity), 2.0).unwrap();
        assert!(out.matrix().max_abs_diff(sigma.matrix()) < 1e-15);
    }

    #[test]
    fn witness_state_flows_to_singlet() {
        let sigma = witness_state();
        let basis = sigma.basis();
        let out = apply_map(&sigma, &sched(BuiltinSchedule::ToAntisymmetric), 10.0).unwrap();
        let (rho_a, _) = split_paos(&sigma).unwrap();
        assert!(out.matrix().max_abs_diff(rho_a.matrix()) < 1e-6);
        let singlet = ComplexMatrix::outer(&basis.asym_ket(0, 1), &basis.asym_ket(0, 1));
        assert!(out.matrix().max_abs_diff(&singlet) < 1e-6);
    }

    #[test]
    fn to_symmetric_symmetricity_at_one() {
        let out = apply_map(&witness_state(), &sched(BuiltinSchedule::ToSymmetric), 1.0).unwrap();
        let r = out.symmetricity().unwrap();
        assert!((r - 1.0f64.tanh().powi(2)).abs() < 1e-12);
        assert!((r - 0.5800).abs() < 1e-4);
    }

    #[test]
    fn apply_map_rejects_outside_domain() {
        let basis = b(2);
        let sym = DensityOperator::pure(basis, &basis.sym_ket(0, 0)).unwrap();
        let err = apply_map(&sym, &sched(BuiltinSchedule::ToAntisymmetric), 1.0).unwrap_err();
        assert!(matches!(err, Error::NotPerfectlyAsymmetric { .. }));
        assert!(err.to_string().contains("apply_map_noncp"));
        let over = Schedule::custom("over", |_| ScheduleSample::real(&[0.0], &[2.0]).unwrap());
        assert!(matches!(
            apply_map(&witness_state(), &over, 1.0),
            Err(Error::SymmetricityBound { .. })
        ));
    }

    #[test]
    fn kraus_sum_equals_four_term() {
        let basis = b(3);
        let sigma = random_density(3, basis, RandomKind::Generic);
        let complex = ScheduleSample::new(
            vec![c(0.3, 0.2), c(-0.1, 0.7), c(0.5, 0.0)],
            vec![c(0.0, -0.4), c(0.6, 0.1), c(-0.2, 0.3)],
        )
        .unwrap();
        let cases = [sched(BuiltinSchedule::ToAntisymmetric).at(0.7), sched(BuiltinSchedule::Perpendicular).at(1.3), complex];
        for sample in &cases {
            let lit = kraus_sum(basis, sigma.matrix(), sample);
            let closed = four_term(basis, sigma.matrix(), sample);
            assert!(lit.max_abs_diff(&closed) < 1e-12);
        }
    }

    #[test]
    fn trace_drift_formula_outside_domain() {
        let basis = b(3);
        let sigma = random_density(4, basis, RandomKind::Generic);
        let tr = sigma.trace();
        let trp = basis.trace_exchange(sigma.matrix()).re;
        for t in [0.3, 1.0, 3.0] {
            let sample = sched(BuiltinSchedule::ToSymmetric).at(t);
            let out = four_term(basis, sigma.matrix(), &sample);
            assert!((out.trace().re - predicted_trace(&sample, tr, trp)).abs() < 1e-12);
            let trp_out = basis.trace_exchange(&out).re;
            assert!((trp_out - (sample.m() * tr + sample.p() * trp)).abs() < 1e-12);
        }
    }

    #[test]
    fn noncp_fixed_points() {
        let basis = b(3);
        let mut sampler = StateSampler::new(basis, 5);
        let custom = Schedule::custom("half", |_| ScheduleSample::orthogonal_with_m(-0.5).unwrap());
        let general = Schedule::custom("mixed", |_| {
            ScheduleSample::new(vec![c(0.8, 0.1), c(0.2, 0.0)], vec![c(0.5, -0.3), c(0.6, 0.2)]).unwrap()
        });
        for parity in [Parity::Symmetric, Parity::Antisymmetric] {
            let sigma = sampler.in_eigenspace(parity);
            for s in [&custom, &general] {
                let out = apply_map_noncp(&sigma, s, 1.0).unwrap();
                assert!(out.state.matrix().max_abs_diff(sigma.matrix()) < 1e-10);
            }
        }
    }

    #[test]
    fn noncp_matches_cp_map_on_domain() {
        let sigma = random_density(6, b(3), RandomKind::PerfectlyAsymmetric);
        let s = sched(BuiltinSchedule::ToAntisymmetric);
        let t = 0.5; // tanh²(0.5) ≈ 0.21 keeps |m| ≤ ½
        let cp = apply_map(&sigma, &s, t).unwrap();
        let ncp = apply_map_noncp(&sigma, &s, t).unwrap();
        assert!(cp.matrix().max_abs_diff(ncp.state.matrix()) < 1e-10);
        assert!(ncp.certificate.positive);
        assert!(matches!(
            apply_map_noncp(&sigma, &s, 2.0),
            Err(Error::SymmetricityBound { bound, .. }) if bound == 0.5
        ));
    }

    #[test]
    fn noncp_orthogonal_reduces_to_one_plus_mp() {
        let sigma = witness_state();
        let basis = sigma.basis();
        for m in [-0.5, -0.2, 0.3, 0.5] {
            let s = Schedule::custom("orth", move |_| ScheduleSample::orthogonal_with_m(m).unwrap());
            let out = apply_map_noncp(&sigma, &s, 1.0).unwrap();
            let expect = sigma.matrix() + basis.exchange_left(sigma.matrix()) * m;
            assert!(out.state.matrix().max_abs_diff(&expect) < 1e-15);
            assert!((out.certificate.trace - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn constraint_identity() {
        for r in [-0.6f64, 0.0, 0.4] {
            // a·s = 0 schedule rescaled so that p = 1 − r·m
            for m in [-0.5f64, 0.1, 0.5] {
                let p = 1.0 - r * m;
                let a2 = p - m;
                let s2 = p + m;
                let sample = ScheduleSample::real(&[a2.sqrt(), 0.0], &[0.0, s2.sqrt()]).unwrap();
                assert!(constraint_identity_residual(&sample, r).abs() < 1e-12);
            }
        }
        let off = ScheduleSample::real(&[1.2], &[0.3]).unwrap();
        assert!(constraint_identity_residual(&off, 0.0).abs() > 1e-3);
    }

    #[test]
    fn conservation_examples() {
        let basis = b(2);
        let sigma = random_density(7, basis, RandomKind::Generic);
        let p = basis.permutation();
        let half = 0.5f64.sqrt();
        let ops = vec![ComplexMatrix::identity(4) * half, &p * half];
        let rep = symmetricity_conservation_check(basis, &ops, &sigma).unwrap();
        assert!(rep.conservation_implied && rep.conserved);

        let s = basis.symmetrizer();
        let a = basis.antisymmetrizer();
        let swap_blocks = vec![s.clone(), a.clone()];
        let rep = symmetricity_conservation_check(basis, &swap_blocks, &sigma).unwrap();
        assert!(rep.conserved);

        // W0 = |Ψs⟩⟨Ψa| moves weight out of the antisymmetric block
        let s01 = basis.sym_ket(0, 1);
        let a01 = basis.asym_ket(0, 1);
        let w0 = ComplexMatrix::outer(&s01, &a01);
        let rest = ComplexMatrix::identity(4) - ComplexMatrix::outer(&a01, &a01);
        let leak = vec![w0, rest];
        let singlet = DensityOperator::pure(basis, &a01).unwrap();
        let rep = symmetricity_conservation_check(basis, &leak, &singlet).unwrap();
        assert!(!rep.conservation_implied);
        assert!(!rep.conserved);
        assert!((rep.predicted.unwrap() - rep.trace_p_after).abs() < 1e-12);
        assert!((rep.trace_p_after - 1.0).abs() < 1e-12);

        let skew = ComplexMatrix::outer(&s01, &Ket::basis(4, 1));
        let skew_rest = ComplexMatrix::identity(4) - ComplexMatrix::outer(&Ket::basis(4, 1), &Ket::basis(4, 1));
        let rep = symmetricity_conservation_check(basis, &[skew, skew_rest], &singlet).unwrap();
        assert_eq!(rep.predicted, None);

        let bad = vec![ComplexMatrix::identity(4) * 0.5];
        assert!(symmetricity_conservation_check(basis, &bad, &sigma).is_err());
    }

    #[test]
    fn antisymmetric_operator_flips_sign() {
        let basis = b(2);
        // exchanges |Ψs;01⟩ and |Ψa;01⟩, identity elsewhere is not allowed, so
        // build an antisymmetric unitary on the 2-dim block plus ±-mixing on the rest
        let s01 = basis.sym_ket(0, 1);
        let a01 = basis.asym_ket(0, 1);
        let s00 = basis.sym_ket(0, 0);
        let s11 = basis.sym_ket(1, 1);
        let w = ComplexMatrix::outer(&s01, &a01) + ComplexMatrix::outer(&a01, &s01);
        let rest = ComplexMatrix::outer(&s00, &s00) + ComplexMatrix::outer(&s11, &s11);
        assert_eq!(operator_symmetry(basis, &w), OperatorSymmetry::Antisymmetric);
        let sigma = DensityOperator::pure(basis, &a01).unwrap();
        let rep = symmetricity_conservation_check(basis, &[w, rest], &sigma).unwrap();
        assert!(!rep.conservation_implied);
        let pred = rep.predicted.unwrap();
        assert!((pred - rep.trace_p_after).abs() < 1e-12);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy_change_closed(0.0), 0.0);
        assert!((entropy_change_closed(8.0) + 2f64.ln()).abs() < 1e-6);
        let basis = b(3);
        let (sigma, _, _) = StateSampler::new(basis, 8).paos_equal_purity();
        let times: Vec<f64> = (0..=20).map(|k| k as f64 * 0.25).collect();
        let rep = entropy_trajectory(&sigma, &sched(BuiltinSchedule::ToAntisymmetric), &times).unwrap();
        assert!(rep.equal_purity && rep.all_positive && rep.bound_holds);
        let s0 = rep.rows[0].renyi_entropy;
        for (row, t) in rep.rows.iter().zip(&times) {
            assert!((row.renyi_entropy - s0 - entropy_change_closed(*t)).abs() < 1e-10);
            assert!((row.entropy_predicted.unwrap() - row.renyi_entropy).abs() < 1e-10);
        }
        for w in rep.rows.windows(2) {
            assert!(w[1].renyi_entropy <= w[0].renyi_entropy + 1e-14);
        }
        let flat = entropy_trajectory(&sigma, &sched(BuiltinSchedule::Identity), &times).unwrap();
        assert!(flat.rows.iter().all(|r| (r.renyi_entropy - s0).abs() < 1e-12));
        assert_eq!(rep.to_table().columns.len(), 7);
    }

    #[test]
    fn extended_trajectory_on_generic_input() {
        let sigma = random_density(10, b(2), RandomKind::Generic);
        let times = [0.0, 0.25, 0.5];
        let rep = extended_trajectory(&sigma, &sched(BuiltinSchedule::ToSymmetric), &times).unwrap();
        assert!(rep.max_trace_drift < 1e-12);
        assert!(entropy_trajectory(&sigma, &sched(BuiltinSchedule::ToSymmetric), &times).is_err());
        assert!(extended_trajectory(&sigma, &sched(BuiltinSchedule::ToSymmetric), &[2.0]).is_err());
    }

    #[test]
    fn entropy_requires_normalized() {
        let basis = b(2);
        let rho = DensityOperator::new(basis, ComplexMatrix::identity(4)).unwrap();
        assert!(renyi_entropy(&rho).is_err());
        let pure = DensityOperator::pure(basis, &Ket::basis(4, 0)).unwrap();
        assert!(renyi_entropy(&pure).unwrap().abs() < 1e-15);
    }

    #[test]
    fn map_keeps_definite_output_class_in_limit() {
        let sigma = random_density(9, b(2), RandomKind::Paos);
        let out = apply_map(&sigma, &sched(BuiltinSchedule::ToSymmetric), 25.0).unwrap();
        assert_eq!(out.classify().class, SymmetryClass::StateSymmetric);
    }
}
