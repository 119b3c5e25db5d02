//! The semigroup operator-symmetrization channel `e^{−τ/2{P,·,P}}`, its
//! Gaussian-unitary representation, the formal antisymmetrizer and the
//! exchange-dissipator master equation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, I, TOL_HERM};
use crate::output::{Cell, Table};
use crate::pairspace::PairBasis;
use crate::states::{matrix_symmetricity, DensityOperator};

/// `{A, ρ, B} = BA†ρ + ρBA† − 2A†ρB`.
pub fn dissipator_bracket(a: &ComplexMatrix, rho: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let a_dag = a.adjoint();
    let ba = b * &a_dag;
    &ba * rho + rho * &ba - &(&a_dag * rho) * b * 2.0
}

/// `{P, ρ, P}` via the shortcut `2ρ − 2PρP`.
pub fn exchange_dissipator(basis: PairBasis, rho: &ComplexMatrix) -> ComplexMatrix {
    (rho - basis.exchange_conjugate(rho)) * 2.0
}

/// `½(1+e^{−2τ})M + ½(1−e^{−2τ})PMP`, without any validation.
pub fn semigroup_matrix(basis: PairBasis, m: &ComplexMatrix, tau: f64) -> ComplexMatrix {
    let e = (-2.0 * tau).exp();
    m * (0.5 * (1.0 + e)) + basis.exchange_conjugate(m) * (0.5 * (1.0 - e))
}

pub fn apply_semigroup_symmetrizer(rho: &DensityOperator, tau: f64) -> Result<DensityOperator> {
    check_tau(tau)?;
    let out = semigroup_matrix(rho.basis(), rho.matrix(), tau);
    Ok(DensityOperator::new_unchecked(rho.basis(), out))
}

fn check_tau(tau: f64) -> Result<()> {
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: format!("must be finite and >= 0, got {tau}"),
        });
    }
    Ok(())
}

/// `e^{τ P·P}ρ = Σ_n τⁿ/n! (P·P)ⁿ ρ`, summed term by term.
pub fn exchange_exponential_series(basis: PairBasis, m: &ComplexMatrix, tau: f64, terms: usize) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(m.rows(), m.cols());
    let mut term = m.clone();
    for n in 0..terms {
        acc = acc + &term;
        term = basis.exchange_conjugate(&term) * (tau / (n + 1) as f64);
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Trapezoid nodes on the uniform grid, odd so that `u = 0` is a node.
    pub nodes: usize,
    /// Integration range `±half_width·√τ`.
    pub half_width: f64,
    /// Largest acceptable error estimate.
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes: 401,
            half_width: 8.0,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianAverage {
    pub state: DensityOperator,
    /// Node-doubling difference plus the Gaussian tail mass outside the grid.
    pub error_estimate: f64,
}

/// Gaussian weights of `cos²u`, `sin²u` and `sin u cos u` by the trapezoid rule.
fn gaussian_moments(tau: f64, nodes: usize, half_width: f64) -> [f64; 3] {
    let sigma = tau.sqrt();
    let lo = -half_width * sigma;
    let h = 2.0 * half_width * sigma / (nodes - 1) as f64;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * tau).sqrt();
    let mut acc = [0.0; 3];
    for k in 0..nodes {
        let u = lo + h * k as f64;
        let end = if k == 0 || k == nodes - 1 { 0.5 } else { 1.0 };
        let w = end * h * norm * (-u * u / (2.0 * tau)).exp();
        let (s, c) = u.sin_cos();
        acc[0] += w * c * c;
        acc[1] += w * s * s;
        acc[2] += w * s * c;
    }
    acc
}

fn unitary_average(basis: PairBasis, m: &ComplexMatrix, moments: [f64; 3]) -> ComplexMatrix {
    let [cc, ss, sc] = moments;
    // (c − isP) ρ (c + isP) = c²ρ + s²PρP + i·sc(ρP − Pρ)
    let cross = basis.exchange_right(m) - basis.exchange_left(m);
    m * cc + basis.exchange_conjugate(m) * ss + cross * (I * sc)
}

/// `(2πτ)^{−½} ∫ du e^{−u²/2τ} e^{−iPu} ρ e^{iPu}` by the trapezoid rule.
pub fn gaussian_unitary_average(rho: &DensityOperator, tau: f64, spec: QuadratureSpec) -> Result<GaussianAverage> {
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: format!("the Gaussian average needs tau > 0, got {tau}"),
        });
    }
    if spec.nodes < 3 || !(spec.half_width > 0.0) {
        return Err(Error::InvalidParameter {
            name: "quadrature",
            reason: "need at least 3 nodes and a positive half width".into(),
        });
    }
    let basis = rho.basis();
    let coarse = unitary_average(basis, rho.matrix(), gaussian_moments(tau, spec.nodes, spec.half_width));
    let fine = unitary_average(
        basis,
        rho.matrix(),
        gaussian_moments(tau, 2 * spec.nodes - 1, spec.half_width),
    );
    let hw = spec.half_width;
    let tail = (2.0 / std::f64::consts::PI).sqrt() * (-hw * hw / 2.0).exp() / hw;
    let error_estimate = coarse.max_abs_diff(&fine) + tail * rho.matrix().max_abs() * 2.0;
    if error_estimate > spec.tol {
        return Err(Error::QuadratureNotConverged {
            estimate: coarse.trace().re,
            error: error_estimate,
        });
    }
    Ok(GaussianAverage {
        state: DensityOperator::new_unchecked(basis, coarse),
        error_estimate,
    })
}

/// `e^{−2τ} e^{τ/2{P,·,P}}(O) = ½(e^{−2τ}+1)O + ½(e^{−2τ}−1)POP`.
pub fn apply_formal_antisymmetrizer(basis: PairBasis, o: &ComplexMatrix, tau: f64) -> Result<ComplexMatrix> {
    check_tau(tau)?;
    basis.check_operator(o)?;
    let e = (-2.0 * tau).exp();
    Ok(o * (0.5 * (e + 1.0)) + basis.exchange_conjugate(o) * (0.5 * (e - 1.0)))
}

/// Inverse of the semigroup channel, `½(1+e^{2τ})O + ½(1−e^{2τ})POP`.
/// Only defined on the image of the forward channel as far as states go.
pub fn apply_inverse_semigroup(basis: PairBasis, o: &ComplexMatrix, tau: f64) -> Result<ComplexMatrix> {
    check_tau(tau)?;
    basis.check_operator(o)?;
    let e = (2.0 * tau).exp();
    Ok(o * (0.5 * (1.0 + e)) + basis.exchange_conjugate(o) * (0.5 * (1.0 - e)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityCertificate {
    pub min_eigenvalue: f64,
    pub trace: f64,
    pub positive: bool,
}

impl PositivityCertificate {
    pub fn of(m: &ComplexMatrix) -> Self {
        let min_eigenvalue = m.hermitian_part().min_eigenvalue_hermitian();
        Self {
            min_eigenvalue,
            trace: m.trace().re,
            positive: m.is_positive(crate::linalg::TOL_POS),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionParams {
    pub gamma: f64,
    pub dt: f64,
    pub t_max: f64,
    /// Two-particle Hamiltonian; `None` means `H = 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<Vec<Vec<[f64; 2]>>>,
    /// Keep every n-th step (the final step is always kept).
    #[serde(default = "one")]
    pub sample_every: usize,
}

fn one() -> usize {
    1
}

impl EvolutionParams {
    pub fn new(gamma: f64, dt: f64, t_max: f64) -> Self {
        Self {
            gamma,
            dt,
            t_max,
            hamiltonian: None,
            sample_every: 1,
        }
    }

    pub fn with_hamiltonian(mut self, h: &ComplexMatrix) -> Self {
        self.hamiltonian = Some(h.to_rows());
        self
    }

    pub fn with_sample_every(mut self, n: usize) -> Self {
        self.sample_every = n;
        self
    }

    pub fn hamiltonian_matrix(&self, basis: PairBasis) -> Result<ComplexMatrix> {
        match &self.hamiltonian {
            None => Ok(ComplexMatrix::zeros(basis.dim(), basis.dim())),
            Some(rows) => {
                let h = ComplexMatrix::from_rows(rows)?;
                basis.check_operator(&h)?;
                Ok(h)
            }
        }
    }

    fn steps(&self) -> Result<usize> {
        for (name, v) in [("gamma", self.gamma), ("dt", self.dt), ("t_max", self.t_max)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be finite".into(),
                });
            }
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("must be >= 0, got {}", self.gamma),
            });
        }
        if self.dt <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("must be > 0, got {}", self.dt),
            });
        }
        if self.t_max < 0.0 {
            return Err(Error::InvalidParameter {
                name: "t_max",
                reason: format!("must be >= 0, got {}", self.t_max),
            });
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidParameter {
                name: "sample_every",
                reason: "must be >= 1".into(),
            });
        }
        let n = (self.t_max / self.dt).round();
        if (n * self.dt - self.t_max).abs() > 1e-9 * self.t_max.max(1.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("t_max = {} is not a whole number of steps of {}", self.t_max, self.dt),
            });
        }
        Ok(n as usize)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: DensityOperator,
    pub trace: f64,
    pub symmetricity: f64,
    pub min_eigenvalue: f64,
    pub hermiticity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory always has the initial sample")
    }

    /// Columns `t, trace, symmetricity, min_eigenvalue`, then the real and
    /// imaginary parts of each selected product-basis element.
    pub fn to_table(&self, elements: &[(usize, usize)]) -> Table {
        let mut cols: Vec<String> = ["t", "trace", "symmetricity", "min_eigenvalue"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        for (i, j) in elements {
            cols.push(format!("re_{i}_{j}"));
            cols.push(format!("im_{i}_{j}"));
        }
        let mut table = Table::new(cols);
        for s in &self.samples {
            let mut row: Vec<Cell> = vec![s.t.into(), s.trace.into(), s.symmetricity.into(), s.min_eigenvalue.into()];
            for &(i, j) in elements {
                let z = s.state.matrix()[(i, j)];
                row.push(z.re.into());
                row.push(z.im.into());
            }
            table.push(row);
        }
        table
    }
}

/// Operator 2-norm of a Hermitian matrix.
fn spectral_norm(h: &ComplexMatrix) -> f64 {
    h.eigenvalues_hermitian().iter().fold(0.0f64, |m, e| m.max(e.abs()))
}

/// Fixed-step RK4 for `dρ/dt = −i[H,ρ] − γ(2ρ − 2PρP)`.
pub fn integrate_master_equation(rho0: &DensityOperator, params: &EvolutionParams) -> Result<Trajectory> {
    let basis = rho0.basis();
    let steps = params.steps()?;
    let h = params.hamiltonian_matrix(basis)?;
    let deviation = h.hermiticity_deviation();
    if deviation > TOL_HERM {
        return Err(Error::NotHermitian { deviation });
    }
    let h_norm = spectral_norm(&h);
    let commutator = (basis.exchange_left(&h) - basis.exchange_right(&h)).frobenius_norm();
    if commutator > 1e-10 * h.frobenius_norm().max(f64::MIN_POSITIVE) {
        return Err(Error::HamiltonianNotSymmetric { commutator });
    }
    let stiffness = params.dt * (h_norm + 4.0 * params.gamma);
    if stiffness > 0.1 {
        return Err(Error::StepTooLarge { stiffness });
    }

    let gamma = params.gamma;
    let rhs = |m: &ComplexMatrix| -> ComplexMatrix {
        let comm = &(&h * m) - &(m * &h);
        comm * (-I) - exchange_dissipator(basis, m) * gamma
    };

    let tr0 = rho0.trace();
    let sample = |t: f64, m: &ComplexMatrix| -> Result<Sample> {
        let trace = m.trace().re;
        let hermiticity = m.hermiticity_deviation();
        let min_eigenvalue = m.hermitian_part().min_eigenvalue_hermitian();
        if (trace - tr0).abs() > 1e-9 {
            return Err(Error::Contract(format!("trace drifted to {trace} at t = {t}")));
        }
        if hermiticity > 1e-10 {
            return Err(Error::Contract(format!("Hermiticity lost ({hermiticity:e}) at t = {t}")));
        }
        if min_eigenvalue < -1e-8 {
            return Err(Error::Contract(format!("min eigenvalue {min_eigenvalue:e} at t = {t}")));
        }
        Ok(Sample {
            t,
            state: DensityOperator::new_unchecked(basis, m.clone()),
            trace,
            symmetricity: matrix_symmetricity(basis, m)?,
            min_eigenvalue,
            hermiticity,
        })
    };

    let dt = params.dt;
    let mut m = rho0.matrix().clone();
    let mut samples = vec![sample(0.0, &m)?];
    for step in 1..=steps {
        let k1 = rhs(&m);
        let k2 = rhs(&(&m + &k1 * (dt / 2.0)));
        let k3 = rhs(&(&m + &k2 * (dt / 2.0)));
        let k4 = rhs(&(&m + &k3 * dt));
        m = &m + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        if step % params.sample_every == 0 || step == steps {
            samples.push(sample(step as f64 * dt, &m)?);
        }
    }
    Ok(Trajectory { samples })
}

/// Maximum entrywise deviation of a zero-Hamiltonian trajectory from the
/// closed-form channel at `τ = 2γt`.
pub fn closed_form_deviation(rho0: &DensityOperator, gamma: f64, traj: &Trajectory) -> f64 {
    traj.samples
        .iter()
        .map(|s| {
            let exact = semigroup_matrix(rho0.basis(), rho0.matrix(), 2.0 * gamma * s.t);
            s.state.matrix().max_abs_diff(&exact)
        })
        .fold(0.0, f64::max)
}
