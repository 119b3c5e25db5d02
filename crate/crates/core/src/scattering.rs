//! Collision probabilities for two identical spin-`s` particles scattering
//! into the `±n` directions, with and without environment-induced
//! symmetrization, plus a finite-matrix model that realizes the amplitudes
//! through an explicit two-particle unitary.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decoherence::semigroup_matrix;
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, Ket, ZERO};
use crate::output::{Cell, Table};
use crate::pairspace::PairBasis;
use crate::qnd::{semigroup_tau, SpectralModel};
use crate::symmap::{kraus_sum, Schedule, ScheduleSample};

/// Spin `s` stored as the integer `2s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Spin(u32);

impl Spin {
    pub fn new(s: f64) -> Result<Self> {
        let twice = 2.0 * s;
        if !s.is_finite() || s < 0.0 || (twice - twice.round()).abs() > 1e-12 || twice > 1e6 {
            return Err(Error::InvalidParameter {
                name: "spin_s",
                reason: format!("must be a nonnegative half-integer, got {s}"),
            });
        }
        Ok(Spin(twice.round() as u32))
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// `2s + 1`
    pub fn multiplicity(self) -> usize {
        self.0 as usize + 1
    }
}

impl TryFrom<f64> for Spin {
    type Error = Error;

    fn try_from(s: f64) -> Result<Self> {
        Spin::new(s)
    }
}

impl From<Spin> for f64 {
    fn from(s: Spin) -> f64 {
        s.value()
    }
}

/// Particle statistics, `ε = +1` for bosons and `ε = −1` for fermions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    pub fn epsilon(self) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => -1.0,
        }
    }
}

impl TryFrom<i32> for Statistics {
    type Error = Error;

    fn try_from(e: i32) -> Result<Self> {
        match e {
            1 => Ok(Statistics::Boson),
            -1 => Ok(Statistics::Fermion),
            _ => Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("must be +1 or -1, got {e}"),
            }),
        }
    }
}

impl From<Statistics> for i32 {
    fn from(s: Statistics) -> i32 {
        s.epsilon() as i32
    }
}

/// Decoherence time as a function of collision time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TauModel {
    /// `τ(t) = rate·t`
    Linear { rate: f64 },
    /// `τ(t) = 2πg t / b`, the QND bath rate with `t` in units of `ħβ`.
    Bath { g: f64, b: f64 },
}

impl TauModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TauModel::Linear { rate } if !rate.is_finite() || rate < 0.0 => Err(Error::InvalidParameter {
                name: "tau_rate",
                reason: format!("must be finite and >= 0, got {rate}"),
            }),
            TauModel::Bath { g, b } => SpectralModel::exponential(g, b).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn tau(&self, t: f64) -> f64 {
        match *self {
            TauModel::Linear { rate } => rate * t,
            TauModel::Bath { g, b } => SpectralModel::exponential(g, b)
                .map(|m| semigroup_tau(&m, t))
                .unwrap_or(f64::NAN),
        }
    }
}

impl Default for TauModel {
    fn default() -> Self {
        TauModel::Bath { g: 1.0, b: 10.0 }
    }
}

#[derive(Debug, Clone)]
pub struct CollisionConfig {
    pub spin: Spin,
    pub statistics: Statistics,
    pub f_n: Complex64,
    pub f_minus_n: Complex64,
    pub schedule: Schedule,
    pub tau: TauModel,
}

impl CollisionConfig {
    pub fn new(
        spin: Spin,
        statistics: Statistics,
        f_n: Complex64,
        f_minus_n: Complex64,
        schedule: Schedule,
        tau: TauModel,
    ) -> Result<Self> {
        check_amplitudes(f_n, f_minus_n)?;
        tau.validate()?;
        schedule.check_constraints(&[])?;
        Ok(Self {
            spin,
            statistics,
            f_n,
            f_minus_n,
            schedule,
            tau,
        })
    }
}

fn check_amplitudes(f: Complex64, g: Complex64) -> Result<()> {
    if [f.re, f.im, g.re, g.im].iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "amplitudes",
            reason: "F(n) and F(-n) must be finite".into(),
        })
    }
}

/// `|F(n)|² + |F(−n)|² + ε/(2s+1)·[F*(n)F(−n) + F(n)F*(−n)]`
pub fn standard_probability(spin: Spin, statistics: Statistics, f: Complex64, g: Complex64) -> Result<f64> {
    check_amplitudes(f, g)?;
    let n = spin.multiplicity() as f64;
    Ok(f.norm_sqr() + g.norm_sqr() + statistics.epsilon() / n * 2.0 * (f.conj() * g).re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvironmentProbability {
    pub value: f64,
    /// Imaginary part left over after summing the two cross terms.
    pub imaginary_residue: f64,
    pub tau: f64,
    pub m: f64,
}

/// The environment-induced probability for one schedule sample and `τ`,
/// summed term by term as complex numbers.
pub fn environment_probability_sample(
    spin: Spin,
    sample: &ScheduleSample,
    tau: f64,
    f: Complex64,
    g: Complex64,
) -> EnvironmentProbability {
    let damp = (-2.0 * tau).exp();
    let n = spin.multiplicity() as f64;
    // Σ s_α a_α* and Σ a_α s_α*
    let sa: Complex64 = sample.s.iter().zip(&sample.a).map(|(s, a)| s * a.conj()).sum();
    let as_: Complex64 = sample.a.iter().zip(&sample.s).map(|(a, s)| a * s.conj()).sum();
    let diag = (sa + as_) * (0.5 * damp);
    let s2a2 = c(sample.s2() - sample.a2(), 0.0);
    let cross_1 = (s2a2 + (as_ - sa) * damp) / (2.0 * n);
    let cross_2 = (s2a2 + (sa - as_) * damp) / (2.0 * n);
    let total = (c(1.0, 0.0) + diag) * f.norm_sqr()
        + (c(1.0, 0.0) - diag) * g.norm_sqr()
        + cross_1 * f * g.conj()
        + cross_2 * g * f.conj();
    EnvironmentProbability {
        value: total.re,
        imaginary_residue: total.im.abs(),
        tau,
        m: sample.m(),
    }
}

pub fn environment_probability(cfg: &CollisionConfig, t: f64) -> Result<EnvironmentProbability> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("must be finite and >= 0, got {t}"),
        });
    }
    cfg.schedule.check_constraints(&[t])?;
    let tau = cfg.tau.tau(t);
    let sample = cfg.schedule.at(t);
    Ok(environment_probability_sample(cfg.spin, &sample, tau, cfg.f_n, cfg.f_minus_n))
}

/// Rate at which the environment-induced value approaches the standard one:
/// `max(e^{−2τ}, 1 − tanh²(κt))`.
pub fn limit_scale(tau: f64, kappa_t: f64) -> f64 {
    (-2.0 * tau).exp().max(1.0 - kappa_t.tanh().powi(2))
}

/// Observable measured by the finite-matrix model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detector {
    /// `O = |−n, n⟩⟨−n, n| ⊗ 1_spin`
    Plain,
    /// `T_S(O) = ½(O + POP)`
    Symmetrized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub imaginary: f64,
    /// `F(n)`, `F(−n)` read back from the constructed unitary, divided by
    /// `scale`.
    pub f_read: (Complex64, Complex64),
    /// Amplitudes were divided by this factor to fit in a unitary; the
    /// returned `value` is rescaled by `scale²`.
    pub scale: f64,
}

// One-particle momentum labels.
const PLUS_Z: usize = 0;
const MINUS_Z: usize = 1;
const PLUS_N: usize = 2;
const MINUS_N: usize = 3;
const MOMENTA: usize = 4;

/// Two-particle momentum ket over the 4 direction labels.
fn mom_ket(terms: &[(usize, usize, f64)]) -> Ket {
    let mut v = vec![ZERO; MOMENTA * MOMENTA];
    for &(i, j, w) in terms {
        v[i * MOMENTA + j] += c(w, 0.0);
    }
    Ket::from_vec(v)
}

/// Unitary on the two-particle momentum space that maps the incoming pair
/// in each exchange sector to `α·out + β·r`, and is the identity off the
/// sector's three-dimensional block.
fn momentum_unitary(alpha_s: Complex64, alpha_a: Complex64) -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let sectors = [
        (
            alpha_s,
            mom_ket(&[(MINUS_Z, PLUS_Z, h), (PLUS_Z, MINUS_Z, h)]),
            mom_ket(&[(MINUS_N, PLUS_N, h), (PLUS_N, MINUS_N, h)]),
            mom_ket(&[(PLUS_Z, PLUS_Z, 1.0)]),
        ),
        (
            alpha_a,
            mom_ket(&[(MINUS_Z, PLUS_Z, h), (PLUS_Z, MINUS_Z, -h)]),
            mom_ket(&[(MINUS_N, PLUS_N, h), (PLUS_N, MINUS_N, -h)]),
            mom_ket(&[(PLUS_Z, PLUS_N, h), (PLUS_N, PLUS_Z, -h)]),
        ),
    ];
    let n = MOMENTA * MOMENTA;
    let mut u = ComplexMatrix::identity(n);
    for (alpha, input, out, rest) in sectors {
        let beta = c((1.0 - alpha.norm_sqr()).max(0.0).sqrt(), 0.0);
        let proj = ComplexMatrix::outer(&input, &input)
            + ComplexMatrix::outer(&out, &out)
            + ComplexMatrix::outer(&rest, &rest);
        let block = ComplexMatrix::outer(&out, &input) * alpha
            + ComplexMatrix::outer(&rest, &input) * beta
            + ComplexMatrix::outer(&input, &out)
            + ComplexMatrix::outer(&out, &rest) * beta
            - ComplexMatrix::outer(&rest, &rest) * alpha.conj();
        u = u - proj + block;
    }
    u
}

/// Lifts a two-particle momentum operator to momentum ⊗ spin with the
/// one-particle index `mom·N + spin`.
fn with_spin(m: &ComplexMatrix, spins: usize) -> ComplexMatrix {
    let d = MOMENTA * spins;
    ComplexMatrix::from_fn(d * d, d * d, |row, col| {
        let (r1, r2) = (row / d, row % d);
        let (c1, c2) = (col / d, col % d);
        if r1 % spins != c1 % spins || r2 % spins != c2 % spins {
            return ZERO;
        }
        let mr = (r1 / spins) * MOMENTA + r2 / spins;
        let mc = (c1 / spins) * MOMENTA + c2 / spins;
        m[(mr, mc)]
    })
}

/// Evaluates `2 Tr U_T Σ_α W_α e^{−τ/2{P,·,P}}(ρ₀) W_α† U_T† D` by explicit
/// matrices on `(momentum ⊗ spin)^{⊗2}`, where `D` is the chosen detector.
/// Supported for `2s + 1 ≤ 4`.
pub fn matrix_oracle(
    spin: Spin,
    sample: &ScheduleSample,
    tau: f64,
    f: Complex64,
    g: Complex64,
    detector: Detector,
) -> Result<OracleResult> {
    check_amplitudes(f, g)?;
    let spins = spin.multiplicity();
    if spins > 4 {
        return Err(Error::InvalidParameter {
            name: "spin_s",
            reason: format!("the matrix model supports s <= 3/2, got {}", spin.value()),
        });
    }
    let alpha_s = f + g;
    let alpha_a = f - g;
    let scale = alpha_s.norm().max(alpha_a.norm()).max(1.0);
    let u_mom = momentum_unitary(alpha_s / scale, alpha_a / scale);
    let f_read = (
        u_mom.sandwich(&mom_ket(&[(MINUS_N, PLUS_N, 1.0)]), &mom_ket(&[(MINUS_Z, PLUS_Z, 1.0)])),
        u_mom.sandwich(&mom_ket(&[(PLUS_N, MINUS_N, 1.0)]), &mom_ket(&[(MINUS_Z, PLUS_Z, 1.0)])),
    );

    let basis = PairBasis::new(MOMENTA * spins)?;
    let u = with_spin(&u_mom, spins);
    let incoming = mom_ket(&[(MINUS_Z, PLUS_Z, 1.0)]);
    let rho0 = with_spin(&ComplexMatrix::outer(&incoming, &incoming), spins) * (1.0 / (spins * spins) as f64);
    let outgoing = mom_ket(&[(MINUS_N, PLUS_N, 1.0)]);
    let mut detector_op = with_spin(&ComplexMatrix::outer(&outgoing, &outgoing), spins);
    if detector == Detector::Symmetrized {
        detector_op = (&detector_op + &basis.exchange_conjugate(&detector_op)) * 0.5;
    }

    let decohered = semigroup_matrix(basis, &rho0, tau);
    let mapped = kraus_sum(basis, &decohered, sample);
    let evolved = &(&u * &mapped) * &u.adjoint();
    let value = evolved.trace_product(&detector_op) * 2.0;
    Ok(OracleResult {
        value: value.re * scale * scale,
        imaginary: value.im * scale * scale,
        f_read,
        scale,
    })
}

/// One CSV row per time.
pub fn trajectory(cfg: &CollisionConfig, times: &[f64]) -> Result<Table> {
    let mut table = Table::new(["t", "P_env", "P_standard_boson", "P_standard_fermion", "tau", "m_t"]);
    let boson = standard_probability(cfg.spin, Statistics::Boson, cfg.f_n, cfg.f_minus_n)?;
    let fermion = standard_probability(cfg.spin, Statistics::Fermion, cfg.f_n, cfg.f_minus_n)?;
    for &t in times {
        let env = environment_probability(cfg, t)?;
        if env.imaginary_residue > 1e-12 * (1.0 + env.value.abs()) {
            return Err(Error::Contract(format!(
                "collision probability has imaginary part {:e} at t = {t}",
                env.imaginary_residue
            )));
        }
        table.push(vec![
            Cell::from(t),
            env.value.into(),
            boson.into(),
            fermion.into(),
            env.tau.into(),
            env.m.into(),
        ]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmap::BuiltinSchedule;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn half() -> Spin {
        Spin::new(0.5).unwrap()
    }

    fn sched(kind: BuiltinSchedule) -> Schedule {
        Schedule::builtin(kind, 1.0).unwrap()
    }

    #[test]
    fn spin_and_epsilon_validation() {
        assert_eq!(Spin::new(1.5).unwrap().multiplicity(), 4);
        assert!(Spin::new(0.3).is_err());
        assert!(Spin::new(-0.5).is_err());
        assert!(Statistics::try_from(0).is_err());
        let s: Spin = serde_json::from_str("0.5").unwrap();
        assert_eq!(s, half());
        assert!(serde_json::from_str::<Statistics>("2").is_err());
    }

    #[test]
    fn standard_examples() {
        let one = c(1.0, 0.0);
        let zero_spin = Spin::new(0.0).unwrap();
        assert_eq!(standard_probability(zero_spin, Statistics::Boson, one, one).unwrap(), 4.0);
        assert_eq!(standard_probability(half(), Statistics::Fermion, one, one).unwrap(), 1.0);
        let f = c(0.3, -0.7);
        assert_eq!(standard_probability(half(), Statistics::Boson, f, ZERO).unwrap(), f.norm_sqr());
        assert!(standard_probability(half(), Statistics::Boson, c(f64::NAN, 0.0), one).is_err());
    }

    #[test]
    fn standard_nonnegative_and_swap_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let f = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let g = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            for s in [0.0, 0.5, 1.0, 2.5] {
                for st in [Statistics::Boson, Statistics::Fermion] {
                    let spin = Spin::new(s).unwrap();
                    let p = standard_probability(spin, st, f, g).unwrap();
                    assert!(p >= -1e-12);
                    assert!((p - standard_probability(spin, st, g, f).unwrap()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn environment_is_real() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for kind in BuiltinSchedule::ALL {
            for _ in 0..50 {
                let f = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                let g = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                let t = rng.random_range(0.0..4.0);
                let env = environment_probability_sample(half(), &sched(kind).at(t), 0.3 * t, f, g);
                assert!(env.imaginary_residue <= 1e-12);
            }
        }
        let complex = ScheduleSample::new(vec![c(0.6, 0.5)], vec![c(0.2, -0.9)]).unwrap();
        let env = environment_probability_sample(half(), &complex, 0.1, c(0.4, 0.1), c(-0.2, 0.5));
        assert!(env.imaginary_residue <= 1e-12);
    }

    #[test]
    fn oracle_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let raw = ScheduleSample::new(vec![c(0.6, 0.5), c(0.1, 0.0)], vec![c(0.2, -0.9), c(0.0, 0.3)]).unwrap();
        let k = 1.0 / raw.p().sqrt();
        let complex = ScheduleSample::new(
            raw.a.iter().map(|x| x * k).collect(),
            raw.s.iter().map(|x| x * k).collect(),
        )
        .unwrap();
        for spin in [0.0, 0.5] {
            let spin = Spin::new(spin).unwrap();
            for sample in [sched(BuiltinSchedule::ToSymmetric).at(0.7), sched(BuiltinSchedule::ToAntisymmetric).at(0.0), complex.clone()] {
                let f = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                let g = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                let tau = rng.random_range(0.0..1.5);
                let oracle = matrix_oracle(spin, &sample, tau, f, g, Detector::Plain).unwrap();
                let closed = environment_probability_sample(spin, &sample, tau, f, g);
                assert!((oracle.value - closed.value).abs() < 1e-12, "{} vs {}", oracle.value, closed.value);
                assert!(oracle.imaginary.abs() < 1e-12);
                assert!((oracle.f_read.0 * oracle.scale - f).norm() < 1e-14);
                assert!((oracle.f_read.1 * oracle.scale - g).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn momentum_unitary_is_unitary_and_commutes() {
        let u = momentum_unitary(c(0.3, 0.4), c(-0.5, 0.1));
        let n = MOMENTA * MOMENTA;
        assert!((&u * &u.adjoint()).max_abs_diff(&ComplexMatrix::identity(n)) < 1e-14);
        let basis = PairBasis::new(MOMENTA).unwrap();
        assert!(basis.exchange_left(&u).max_abs_diff(&basis.exchange_right(&u)) < 1e-15);
    }

    #[test]
    fn symmetrized_detector_loses_direction_asymmetry() {
        let sample = sched(BuiltinSchedule::ToSymmetric).at(0.5);
        let (f, g) = (c(0.5, 0.1), c(0.1, -0.2));
        let plain = matrix_oracle(half(), &sample, 0.2, f, g, Detector::Plain).unwrap();
        let sym = matrix_oracle(half(), &sample, 0.2, f, g, Detector::Symmetrized).unwrap();
        assert!((plain.value - sym.value).abs() > 1e-3);
        let swapped = matrix_oracle(half(), &sample, 0.2, g, f, Detector::Symmetrized).unwrap();
        assert!((sym.value - swapped.value).abs() < 1e-12);
    }

    #[test]
    fn limits_recover_standard() {
        let (f, g) = (c(0.4, -0.3), c(0.2, 0.5));
        let pairs = [
            (BuiltinSchedule::ToSymmetric, Statistics::Boson),
            (BuiltinSchedule::ToAntisymmetric, Statistics::Fermion),
        ];
        for (kind, st) in pairs {
            let cfg = CollisionConfig::new(half(), st, f, g, sched(kind), TauModel::Linear { rate: 1.0 }).unwrap();
            let standard = standard_probability(half(), st, f, g).unwrap();
            for t in [3.0, 5.0, 8.0] {
                let env = environment_probability(&cfg, t).unwrap();
                let bound = 2.0 * (f.norm_sqr() + g.norm_sqr()) * limit_scale(env.tau, t);
                assert!((env.value - standard).abs() <= bound);
            }
        }
    }

    #[test]
    fn initial_value_has_no_interference_without_decoherence_asymmetry() {
        // a = s and τ = 0: (1 ± Re a·s)|F|² with ‖a‖ = 1 gives 2|F(n)|²
        let cfg = CollisionConfig::new(
            half(),
            Statistics::Boson,
            c(1.0, 0.0),
            c(1.0, 0.0),
            sched(BuiltinSchedule::ToSymmetric),
            TauModel::default(),
        )
        .unwrap();
        let env = environment_probability(&cfg, 0.0).unwrap();
        assert!((env.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn swap_asymmetry_is_the_decohering_part() {
        let sample = sched(BuiltinSchedule::ToSymmetric).at(0.6);
        let (f, g) = (c(0.5, 0.2), c(-0.1, 0.3));
        let tau = 0.4;
        let p = environment_probability_sample(half(), &sample, tau, f, g).value;
        let q = environment_probability_sample(half(), &sample, tau, g, f).value;
        let r = sample.a_dot_s().re;
        let expect = 2.0 * r * (-2.0 * tau).exp() * (f.norm_sqr() - g.norm_sqr());
        assert!((p - q - expect).abs() < 1e-14);
        let orth = ScheduleSample::orthogonal_with_m(0.3).unwrap();
        let p = environment_probability_sample(half(), &orth, tau, f, g).value;
        let q = environment_probability_sample(half(), &orth, tau, g, f).value;
        assert!((p - q).abs() < 1e-14);
    }

    #[test]
    fn config_rejects_perpendicular() {
        let r = CollisionConfig::new(
            half(),
            Statistics::Boson,
            c(1.0, 0.0),
            ZERO,
            sched(BuiltinSchedule::Perpendicular),
            TauModel::default(),
        );
        assert!(matches!(r, Err(Error::ScheduleConstraint(_))));
    }

    #[test]
    fn bath_tau_rate() {
        let tau = TauModel::Bath { g: 0.5, b: 10.0 };
        assert!((tau.tau(2.0) - 2.0 * std::f64::consts::PI * 0.5 * 2.0 / 10.0).abs() < 1e-15);
        assert!(TauModel::Linear { rate: -1.0 }.validate().is_err());
        let json = serde_json::to_string(&tau).unwrap();
        assert_eq!(serde_json::from_str::<TauModel>(&json).unwrap(), tau);
    }

    #[test]
    fn table_columns() {
        let cfg = CollisionConfig::new(
            half(),
            Statistics::Fermion,
            c(0.3, 0.0),
            c(0.0, 0.2),
            sched(BuiltinSchedule::ToAntisymmetric),
            TauModel::default(),
        )
        .unwrap();
        let t = trajectory(&cfg, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(t.columns, ["t", "P_env", "P_standard_boson", "P_standard_fermion", "tau", "m_t"]);
        assert_eq!(t.rows.len(), 3);
    }
}
