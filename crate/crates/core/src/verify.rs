//! Seeded invariant suite behind `symflow verify`: every check reports a
//! nonnegative residual and the tolerance it is held to.

use serde::Serialize;

use crate::cpcheck;
use crate::decoherence::{
    apply_formal_antisymmetrizer, apply_inverse_semigroup, apply_semigroup_symmetrizer, closed_form_deviation,
    exchange_exponential_series, gaussian_unitary_average, integrate_master_equation, EvolutionParams,
    QuadratureSpec,
};
use crate::error::Result;
use crate::linalg::{c, ComplexMatrix};
use crate::pairspace::{PairBasis, Parity};
use crate::qnd::{decoherence_exponent_closed, decoherence_exponent_quadrature, weierstrass_product_corrected, SpectralModel};
use crate::scattering::{environment_probability_sample, matrix_oracle, Detector, Spin};
use crate::states::{classify, operator_antisymmetrize, operator_symmetrize, StateSampler, SymmetryClass};
use crate::symmap::{
    apply_map, apply_map_noncp, entropy_change_closed, entropy_trajectory, four_term, kraus_sum, BuiltinSchedule,
    Schedule,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub d: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn record(&mut self, name: &str, residual: f64, tolerance: f64) {
        self.checks.push(Check {
            name: name.to_string(),
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
        });
    }

    fn flag(&mut self, name: &str, ok: bool) {
        self.record(name, if ok { 0.0 } else { 1.0 }, 0.0);
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// Runs the suite for one-particle dimension `d`; rejects invalid `d`
/// before any computation.
pub fn run_suite(d: usize, seed: u64) -> Result<VerifyReport> {
    let basis = PairBasis::new(d)?;
    let n = basis.dim();
    let id = ComplexMatrix::identity(n);
    let mut sampler = StateSampler::new(basis, seed);
    let mut s = Suite { checks: Vec::new() };

    let p = basis.permutation();
    let sym = basis.symmetrizer();
    let asym = basis.antisymmetrizer();
    let mut completeness = ComplexMatrix::zeros(n, n);
    for k in basis.sym_eigenbasis().iter().chain(&basis.asym_eigenbasis()) {
        completeness = completeness + ComplexMatrix::outer(k, k);
    }
    s.record(
        "exchange_algebra",
        max_of([
            (&p * &p).max_abs_diff(&id),
            (&sym + &asym).max_abs_diff(&id),
            (&sym * &sym).max_abs_diff(&sym),
            (&asym * &asym).max_abs_diff(&asym),
            (&sym * &asym).max_abs(),
            (&sym * 2.0 - &id).max_abs_diff(&p),
            completeness.max_abs_diff(&id),
        ]),
        1e-12,
    );

    let mut roundtrip: f64 = 0.0;
    for _ in 0..100 {
        let k = sampler.ket();
        let back = basis.from_eigen(&basis.to_eigen(&k)?)?;
        roundtrip = roundtrip.max(back.max_abs_diff(&k));
    }
    s.record("eigenbasis_roundtrip", roundtrip, 1e-12);

    let mut bound: f64 = 0.0;
    for _ in 0..200 {
        let rho = sampler.generic();
        bound = bound.max(rho.symmetricity()?.abs() - 1.0);
    }
    s.record("symmetricity_bound", bound.max(0.0), 1e-9);

    let mut extremes: f64 = 0.0;
    let mut classified = true;
    for parity in [Parity::Symmetric, Parity::Antisymmetric] {
        for _ in 0..10 {
            let rho = sampler.in_eigenspace(parity);
            extremes = extremes.max((rho.symmetricity()? - parity.sign()).abs());
            let expect = match parity {
                Parity::Symmetric => SymmetryClass::StateSymmetric,
                Parity::Antisymmetric => SymmetryClass::StateAntisymmetric,
            };
            classified &= classify(&rho).class == expect;
            classified &= basis.exchange_conjugate(rho.matrix()).max_abs_diff(rho.matrix()) < 1e-12;
        }
    }
    s.record("symmetricity_extremes", extremes, 1e-10);
    s.flag("classifier_definite_states", classified);

    let generic = sampler.generic();
    let ts = operator_symmetrize(basis, generic.matrix())?;
    let ta = operator_antisymmetrize(basis, generic.matrix())?;
    s.record(
        "operator_symmetrizers",
        max_of([
            (ts.trace().re - generic.trace()).abs(),
            ts.hermiticity_deviation(),
            ta.trace().norm(),
        ]),
        1e-12,
    );

    let mut hyper: f64 = 0.0;
    let mut law: f64 = 0.0;
    let mut decay: f64 = 0.0;
    let mut inverse: f64 = 0.0;
    let mut formal: f64 = 0.0;
    for tau in [0.1, 1.0, 5.0] {
        let rho = sampler.generic();
        let m = rho.matrix();
        let series = exchange_exponential_series(basis, m, tau, 60);
        let closed = m * tau.cosh() + basis.exchange_conjugate(m) * tau.sinh();
        hyper = hyper.max(series.max_abs_diff(&closed) / tau.cosh());

        let once = apply_semigroup_symmetrizer(&apply_semigroup_symmetrizer(&rho, 0.3 * tau)?, 0.7 * tau)?;
        let direct = apply_semigroup_symmetrizer(&rho, tau)?;
        law = law.max(once.matrix().max_abs_diff(direct.matrix()));

        let e = basis.to_eigen_operator(m);
        let out = basis.to_eigen_operator(direct.matrix());
        for i in 0..n {
            for j in 0..n {
                let mixed = basis.parity(i) != basis.parity(j);
                let factor = if mixed { (-2.0 * tau).exp() } else { 1.0 };
                decay = decay.max((out[(i, j)] - e[(i, j)] * factor).norm());
            }
        }

        let back = apply_inverse_semigroup(basis, direct.matrix(), tau)?;
        inverse = inverse.max(back.max_abs_diff(m));

        let lhs = apply_formal_antisymmetrizer(basis, m, tau)?;
        let series = exchange_exponential_series(basis, m, -tau, 80) * (-tau).exp();
        formal = formal.max(lhs.max_abs_diff(&series));
    }
    s.record("hyperbolic_identity", hyper, 1e-10);
    s.record("semigroup_law", law, 1e-12);
    s.record("offdiagonal_decay", decay, 1e-12);
    s.record("inverse_semigroup", inverse, 1e-8);
    s.record("formal_antisymmetrizer", formal, 1e-12);

    let rho = sampler.generic();
    let spec = QuadratureSpec {
        nodes: 201,
        ..QuadratureSpec::default()
    };
    let avg = gaussian_unitary_average(&rho, 1.0, spec)?;
    let closed = apply_semigroup_symmetrizer(&rho, 1.0)?;
    s.record("gaussian_average", avg.state.matrix().max_abs_diff(closed.matrix()), 1e-8);

    let traj = integrate_master_equation(&rho, &EvolutionParams::new(0.5, 0.01, 1.0))?;
    s.record("master_equation_closed_form", closed_form_deviation(&rho, 0.5, &traj), 1e-9);
    s.record(
        "master_equation_trace",
        max_of(traj.samples.iter().map(|x| (x.trace - 1.0).abs())),
        1e-9,
    );
    s.record(
        "master_equation_positivity",
        max_of(traj.samples.iter().map(|x| -x.min_eigenvalue)),
        1e-8,
    );

    let mut qnd: f64 = 0.0;
    for (g, b, theta) in [(1.0, 1.0, 1.0), (1.0, 5.0, 5.0), (0.5, 20.0, 20.0)] {
        let model = SpectralModel::exponential(g, b)?;
        let q = decoherence_exponent_quadrature(&model, theta)?;
        let cf = decoherence_exponent_closed(&model, theta)?;
        qnd = qnd.max((q - cf).abs() / cf.abs());
    }
    s.record("qnd_quadrature_vs_closed", qnd, 1e-5);
    s.record(
        "weierstrass_corrected",
        max_of([0.5f64, 1.0, 2.0].map(|x| (weierstrass_product_corrected(x, 100_000) - x.sinh() / x).abs())),
        1e-8,
    );

    let times: Vec<f64> = (0..10).map(|k| 0.4 * k as f64).collect();
    let mut map_sym: f64 = 0.0;
    let mut map_trace: f64 = 0.0;
    let mut map_pos: f64 = 0.0;
    let mut kraus: f64 = 0.0;
    for _ in 0..10 {
        let sigma = sampler.perfectly_asymmetric();
        for (kind, sign) in [(BuiltinSchedule::ToAntisymmetric, -1.0), (BuiltinSchedule::ToSymmetric, 1.0)] {
            let sched = Schedule::builtin(kind, 1.0)?;
            for &t in &times {
                let out = apply_map(&sigma, &sched, t)?;
                map_sym = map_sym.max((out.symmetricity()? - sign * t.tanh().powi(2)).abs());
                map_trace = map_trace.max((out.trace() - 1.0).abs());
                map_pos = map_pos.max(-out.min_eigenvalue());
                let sample = sched.at(t);
                kraus = kraus.max(
                    kraus_sum(basis, sigma.matrix(), &sample).max_abs_diff(&four_term(basis, sigma.matrix(), &sample)),
                );
            }
        }
    }
    s.record("map_symmetricity_tanh2", map_sym, 1e-10);
    s.record("map_trace", map_trace, 1e-10);
    s.record("map_positivity", map_pos, 1e-10);
    s.record("map_kraus_vs_four_term", kraus, 1e-12);

    let half = Schedule::builtin(BuiltinSchedule::ToAntisymmetric, 1.0)?;
    let mut fixed: f64 = 0.0;
    for parity in [Parity::Symmetric, Parity::Antisymmetric] {
        let sigma = sampler.in_eigenspace(parity);
        let out = apply_map_noncp(&sigma, &half, 0.5)?;
        fixed = fixed.max(out.state.matrix().max_abs_diff(sigma.matrix()));
    }
    s.record("noncp_fixed_points", fixed, 1e-10);

    let (paos, _, _) = sampler.paos_equal_purity();
    let entropy = entropy_trajectory(&paos, &half, &times)?;
    let s0 = entropy.rows[0].renyi_entropy;
    s.record(
        "entropy_formula",
        max_of(entropy.rows.iter().map(|r| (r.renyi_entropy - s0 - entropy_change_closed(r.t)).abs())),
        1e-10,
    );

    let spin = Spin::new(0.5)?;
    let sample = Schedule::builtin(BuiltinSchedule::ToSymmetric, 1.0)?.at(0.8);
    let (f, g) = (c(0.31, -0.2), c(-0.15, 0.44));
    let oracle = matrix_oracle(spin, &sample, 0.6, f, g, Detector::Plain)?;
    let closed = environment_probability_sample(spin, &sample, 0.6, f, g);
    s.record("scattering_oracle", (oracle.value - closed.value).abs(), 1e-9);
    s.record("scattering_reality", closed.imaginary_residue, 1e-12);

    let cert = cpcheck::certify(&cpcheck::build_witness(0.4, -0.5)?)?;
    s.record(
        "witness_formulas",
        cert.formula_residuals.before.max(cert.formula_residuals.after),
        1e-10,
    );
    s.flag(
        "witness_not_two_positive",
        cert.verdicts.before_positive && !cert.verdicts.after_positive,
    );

    Ok(VerifyReport {
        d,
        seed,
        checks: s.checks,
    })
}
