//! Decoherence exponent of the QND-coupled Ohmic bath in dimensionless form.
//!
//! With `x = ω/ω_c`, `θ = ω_c t`, `b = βħω_c` and `g = η/ħ²`,
//! `I(θ) = g ∫₀^∞ e^{−x} (1 − cos θx)/x · coth(bx/2) dx`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::output::{Cell, Table};
use crate::pairspace::Parity;
use crate::quadrature::{integrate, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    Exponential,
    Step,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralModel {
    pub g: f64,
    pub b: f64,
    pub cutoff: Cutoff,
}

impl SpectralModel {
    pub fn new(g: f64, b: f64, cutoff: Cutoff) -> Result<Self> {
        let model = Self { g, b, cutoff };
        model.validate()?;
        Ok(model)
    }

    pub fn exponential(g: f64, b: f64) -> Result<Self> {
        Self::new(g, b, Cutoff::Exponential)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("g", self.g), ("b", self.b)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and > 0, got {v}"),
                });
            }
        }
        Ok(())
    }

    fn require(&self, cutoff: Cutoff) -> Result<()> {
        if self.cutoff != cutoff {
            return Err(Error::InvalidParameter {
                name: "cutoff",
                reason: format!("this computation needs the {cutoff:?} cutoff"),
            });
        }
        Ok(())
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !theta.is_finite() || theta < 0.0 {
        return Err(Error::InvalidParameter {
            name: "theta",
            reason: format!("must be finite and >= 0, got {theta}"),
        });
    }
    Ok(())
}

/// Quadrature result in units where `g` has already been applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureValue {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// Largest acceptable absolute error of the quadrature.
pub const QUAD_TOL: f64 = 1e-8;

/// Integrand without the `g` factor; `damped` selects the `e^{−x}` weight.
fn kernel(theta: f64, b: f64, damped: bool) -> impl Fn(f64) -> f64 {
    move |x: f64| {
        let s = (0.5 * theta * x).sin();
        let base = 2.0 * s * s / x / (0.5 * b * x).tanh();
        if damped {
            base * (-x).exp()
        } else {
            base
        }
    }
}

/// `∫₀^h (c0 + c1 x + c2 x² + c3 x³) dx` for the small-x expansion.
fn series_head(theta: f64, b: f64, damped: bool, h: f64) -> f64 {
    let t2 = theta * theta;
    let t4 = t2 * t2;
    let c0 = t2 / b;
    let curv = t2 * b / 12.0 - t4 / (12.0 * b);
    let (c1, c2, c3) = if damped {
        (-t2 / b, t2 / (2.0 * b) + curv, -t2 / (6.0 * b) - curv)
    } else {
        (0.0, curv, 0.0)
    };
    h * (c0 + h * (c1 / 2.0 + h * (c2 / 3.0 + h * c3 / 4.0)))
}

/// Breakpoints from `h` to `end`: geometric up to 1 then pieces no longer
/// than half an oscillation period.
fn breakpoints(theta: f64, h: f64, end: f64) -> Vec<f64> {
    let mut pts = vec![h];
    let mut x = h;
    while x * 2.0 < end.min(1.0) {
        x *= 2.0;
        pts.push(x);
    }
    let width = if theta > 0.0 { (PI / theta).min(1.0) } else { 1.0 };
    let start = *pts.last().expect("non-empty");
    let n = ((end - start) / width).ceil().max(1.0) as usize;
    for k in 1..=n {
        pts.push(start + (end - start) * k as f64 / n as f64);
    }
    pts
}

fn head_width(theta: f64, b: f64) -> f64 {
    let mut h = 1e-3f64;
    if theta > 0.0 {
        h = h.min(0.01 / theta);
    }
    h.min(0.01 / b)
}

fn quadrature(theta: f64, b: f64, damped: bool, end: f64) -> Result<QuadratureValue> {
    let h = head_width(theta, b);
    let head = series_head(theta, b, damped, h);
    let est = integrate(kernel(theta, b, damped), &breakpoints(theta, h, end), Tolerance::default());
    let value = head + est.value;
    if !est.converged && est.error > QUAD_TOL {
        return Err(Error::QuadratureNotConverged {
            estimate: value,
            error: est.error,
        });
    }
    Ok(QuadratureValue {
        value,
        error: est.error,
        intervals: est.intervals,
    })
}

/// Upper limit beyond which the exponential-cutoff tail is below 1e−12:
/// the integrand is bounded by `2e^{−x}coth(bx/2)/x`.
fn upper_limit(b: f64) -> f64 {
    let mut x = 30.0f64;
    while 2.0 * (-x).exp() / x / (0.5 * b * x).tanh() > 1e-13 {
        x += 5.0;
    }
    x
}

pub fn decoherence_exponent_quadrature_detail(model: &SpectralModel, theta: f64) -> Result<QuadratureValue> {
    model.validate()?;
    model.require(Cutoff::Exponential)?;
    check_theta(theta)?;
    if theta == 0.0 {
        return Ok(QuadratureValue { value: 0.0, error: 0.0, intervals: 0 });
    }
    let q = quadrature(theta, model.b, true, upper_limit(model.b))?;
    Ok(QuadratureValue {
        value: model.g * q.value,
        error: model.g * q.error,
        intervals: q.intervals,
    })
}

pub fn decoherence_exponent_quadrature(model: &SpectralModel, theta: f64) -> Result<f64> {
    Ok(decoherence_exponent_quadrature_detail(model, theta)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedForm {
    pub value: f64,
    /// Number of product factors summed explicitly.
    pub terms: usize,
    /// Integral estimate of the neglected factors (already in `value`).
    pub tail: f64,
}

/// Product truncation `max(10³, ⌈100θ/b⌉)`.
pub fn product_terms(theta: f64, b: f64) -> usize {
    1000usize.max((100.0 * theta / b).ceil() as usize)
}

/// `I = (g/2)ln(1+θ²) + g Σ_j ln(1 + θ²/(jb+1)²)`, with the remainder of the
/// sum beyond `J` replaced by its integral from `J + ½`.
pub fn decoherence_exponent_closed_detail(model: &SpectralModel, theta: f64) -> Result<ClosedForm> {
    model.validate()?;
    model.require(Cutoff::Exponential)?;
    check_theta(theta)?;
    let (g, b) = (model.g, model.b);
    let t2 = theta * theta;
    let terms = product_terms(theta, b);
    let sum: f64 = (1..=terms)
        .map(|j| {
            let y = j as f64 * b + 1.0;
            (t2 / (y * y)).ln_1p()
        })
        .sum();
    let y = (terms as f64 + 0.5) * b + 1.0;
    let tail = if theta == 0.0 {
        0.0
    } else {
        (2.0 * theta * (theta / y).atan() - y * (t2 / (y * y)).ln_1p()) / b
    };
    Ok(ClosedForm {
        value: g * (0.5 * t2.ln_1p() + sum + tail),
        terms,
        tail: g * tail,
    })
}

pub fn decoherence_exponent_closed(model: &SpectralModel, theta: f64) -> Result<f64> {
    Ok(decoherence_exponent_closed_detail(model, theta)?.value)
}

/// `ln(sinh(x)/x)` without overflow or cancellation.
pub fn ln_sinhc(x: f64) -> f64 {
    let x = x.abs();
    if x < 0.1 {
        let x2 = x * x;
        x2 * (1.0 / 6.0 + x2 * (-1.0 / 180.0 + x2 * (1.0 / 2835.0 + x2 * (-1.0 / 37800.0 + x2 / 467775.0))))
    } else if x < 20.0 {
        (x.sinh() / x).ln()
    } else {
        x - std::f64::consts::LN_2 - x.ln() + (-(-2.0 * x).exp()).ln_1p()
    }
}

/// High-temperature form `(g/2)ln(θ²+1) + g ln[(b/πθ) sinh(πθ/b)]`.
pub fn decoherence_exponent_high_t(model: &SpectralModel, theta: f64) -> Result<f64> {
    model.validate()?;
    check_theta(theta)?;
    Ok(model.g * (0.5 * (theta * theta).ln_1p() + ln_sinhc(PI * theta / model.b)))
}

/// `τ(θ) = 2πgθ/b`.
pub fn semigroup_tau(model: &SpectralModel, theta: f64) -> f64 {
    2.0 * PI * model.g * theta / model.b
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemigroupRegime {
    /// Linear-in-θ exponent `2πgθ/b` per unit parity deficit.
    pub tau: f64,
    /// `(2π/b)^{2g}` raised to the parity deficit of an off-diagonal element.
    pub prefactor_offdiagonal: f64,
    /// `4g ln(b/2π)`, which must be small.
    pub small_parameter: f64,
    pub warnings: Vec<String>,
}

impl SemigroupRegime {
    pub fn regime_ok(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// `1 − p_bra·p_ket`, 0 on the diagonal blocks and 2 on the mixed ones.
pub fn parity_deficit(bra: Parity, ket: Parity) -> f64 {
    1.0 - bra.sign() * ket.sign()
}

/// `(2π/b)^{2g·deficit}`.
pub fn semigroup_prefactor(model: &SpectralModel, bra: Parity, ket: Parity) -> f64 {
    (2.0 * PI / model.b).powf(2.0 * model.g * parity_deficit(bra, ket))
}

pub fn decoherence_exponent_semigroup(model: &SpectralModel, theta: f64) -> Result<SemigroupRegime> {
    model.validate()?;
    check_theta(theta)?;
    let (g, b) = (model.g, model.b);
    let small = 4.0 * g * (b / (2.0 * PI)).ln();
    let mut warnings = Vec::new();
    if b < 10.0 {
        warnings.push(format!("b = {b} is not large compared with 1"));
    }
    if theta / b < 10.0 {
        warnings.push(format!(
            "theta/b = {} is not large compared with 1; the linear form fails as theta -> 0",
            theta / b
        ));
    }
    if small.abs() >= 0.1 {
        warnings.push(format!("4 g ln(b/2pi) = {small} is not small"));
    }
    Ok(SemigroupRegime {
        tau: semigroup_tau(model, theta),
        prefactor_offdiagonal: semigroup_prefactor(model, Parity::Symmetric, Parity::Antisymmetric),
        small_parameter: small,
        warnings,
    })
}

/// Multiplier of a matrix element between exchange eigenvectors of the
/// given parities: `exp{2(p_bra p_ket − 1) I(θ)}`.
pub fn decay_factor(exponent: f64, bra: Parity, ket: Parity) -> f64 {
    (-2.0 * parity_deficit(bra, ket) * exponent).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeCheck {
    /// Finite difference of the quadrature.
    pub lhs: f64,
    /// Series truncated after `n_terms`.
    pub rhs_truncated: f64,
    /// Integral estimate of the omitted series terms.
    pub tail: f64,
    pub rhs_corrected: f64,
}

/// Compares `dI/dθ` against `gθ/(1+θ²) + 2gθ Σ_n 1/(θ² + (1+nb)²)`.
pub fn derivative_series_check(model: &SpectralModel, theta: f64, n_terms: usize) -> Result<DerivativeCheck> {
    model.validate()?;
    model.require(Cutoff::Exponential)?;
    if !theta.is_finite() || theta <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "theta",
            reason: format!("must be > 0, got {theta}"),
        });
    }
    let (g, b) = (model.g, model.b);
    let h = 1e-2 * theta.min(1.0);
    // I is even in θ, so the stencil may dip below zero
    let f = |t: f64| -> Result<f64> { decoherence_exponent_quadrature(model, t.abs()) };
    let lhs = (-f(theta + 2.0 * h)? + 8.0 * f(theta + h)? - 8.0 * f(theta - h)? + f(theta - 2.0 * h)?) / (12.0 * h);
    let t2 = theta * theta;
    let series: f64 = (1..=n_terms)
        .map(|n| {
            let y = 1.0 + n as f64 * b;
            1.0 / (t2 + y * y)
        })
        .sum();
    let rhs_truncated = g * theta / (1.0 + t2) + 2.0 * g * theta * series;
    let tail = 2.0 * g / b * (theta / (1.0 + (n_terms as f64 + 0.5) * b)).atan();
    Ok(DerivativeCheck {
        lhs,
        rhs_truncated,
        tail,
        rhs_corrected: rhs_truncated + tail,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepExploration {
    pub value: f64,
    pub error: f64,
    pub warnings: Vec<String>,
}

/// The exponent with the damping replaced by a hard cutoff at `x = 1`.
pub fn step_cutoff_exploration(model: &SpectralModel, theta: f64) -> Result<StepExploration> {
    model.validate()?;
    model.require(Cutoff::Step)?;
    check_theta(theta)?;
    let mut warnings = Vec::new();
    if model.b >= 1.0 {
        warnings.push(format!("b = {} is not small; the step-cutoff semigroup path needs b -> 0", model.b));
    }
    if theta <= 10.0 {
        warnings.push(format!("theta = {theta} is not large"));
    }
    if theta == 0.0 {
        return Ok(StepExploration { value: 0.0, error: 0.0, warnings });
    }
    let q = quadrature(theta, model.b, false, 1.0)?;
    Ok(StepExploration {
        value: model.g * q.value,
        error: model.g * q.error,
        warnings,
    })
}

/// `Π_{j≤n} [1 + x²/(πj)²]`.
pub fn weierstrass_product(x: f64, n: usize) -> f64 {
    let a = (x / PI).powi(2);
    (1..=n)
        .map(|j| (a / (j * j) as f64).ln_1p())
        .sum::<f64>()
        .exp()
}

/// The truncated product times `exp{x²/π² Σ_{j>n} 1/j²}` with the
/// Euler–Maclaurin form of the remaining sum.
pub fn weierstrass_product_corrected(x: f64, n: usize) -> f64 {
    let nf = n as f64;
    let rest = 1.0 / nf - 1.0 / (2.0 * nf * nf) + 1.0 / (6.0 * nf * nf * nf);
    weierstrass_product(x, n) * ((x / PI).powi(2) * rest).exp()
}

/// Columns `theta, I_quadrature, I_closed, I_highT_approx, tau_semigroup, regime_ok`.
pub fn curve_table(model: &SpectralModel, thetas: &[f64]) -> Result<Table> {
    let mut table = Table::new([
        "theta",
        "I_quadrature",
        "I_closed",
        "I_highT_approx",
        "tau_semigroup",
        "regime_ok",
    ]);
    for &theta in thetas {
        let regime = decoherence_exponent_semigroup(model, theta)?;
        table.push(vec![
            theta.into(),
            decoherence_exponent_quadrature(model, theta)?.into(),
            decoherence_exponent_closed(model, theta)?.into(),
            decoherence_exponent_high_t(model, theta)?.into(),
            regime.tau.into(),
            Cell::from(regime.regime_ok()),
        ]);
    }
    Ok(table)
}

/// `n` evenly spaced samples on `(0, θ_max]`.
pub fn theta_grid(theta_max: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| theta_max * k as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(g: f64, b: f64) -> SpectralModel {
        SpectralModel::exponential(g, b).unwrap()
    }

    /// Independent oracle: the closed form summed to convergence with
    /// compensated summation and no integral tail.
    fn brute_closed(g: f64, b: f64, theta: f64, n: usize) -> f64 {
        let t2 = theta * theta;
        let mut sum = 0.0;
        let mut comp = 0.0;
        for j in 1..=n {
            let y = j as f64 * b + 1.0;
            let term = (t2 / (y * y)).ln_1p() - comp;
            let next = sum + term;
            comp = (next - sum) - term;
            sum = next;
        }
        g * (0.5 * t2.ln_1p() + sum)
    }

    #[test]
    fn zero_time_is_zero() {
        let model = m(1.0, 3.0);
        assert_eq!(decoherence_exponent_quadrature(&model, 0.0).unwrap(), 0.0);
        assert_eq!(decoherence_exponent_closed(&model, 0.0).unwrap(), 0.0);
        assert!(decoherence_exponent_quadrature(&model, -1.0).is_err());
        assert!(SpectralModel::exponential(0.0, 1.0).is_err());
        assert!(SpectralModel::exponential(1.0, -1.0).is_err());
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let model = m(1.0, 10.0);
        let q = decoherence_exponent_quadrature_detail(&model, 5.0).unwrap();
        let c = decoherence_exponent_closed(&model, 5.0).unwrap();
        assert!((q.value - c).abs() < 1e-6);
        assert!(q.error <= QUAD_TOL);
    }

    #[test]
    fn closed_tail_agrees_with_long_sum() {
        for (b, theta) in [(0.5, 100.0), (1.0, 20.0), (5.0, 5.0)] {
            let closed = decoherence_exponent_closed(&m(1.0, b), theta).unwrap();
            let brute = brute_closed(1.0, b, theta, 4_000_000);
            // remaining brute tail is about θ²/(b²·4e6)
            let left = theta * theta / (b * b * 4e6);
            assert!((closed - brute - left).abs() < 1e-6 * closed, "b={b} θ={theta}");
        }
    }

    #[test]
    fn zero_temperature_limit() {
        let model = m(1.0, 1e4);
        let q = decoherence_exponent_quadrature(&model, 2.0).unwrap();
        let zero_t = 0.5 * 5.0f64.ln();
        assert!((q - zero_t).abs() < 1e-3);
    }

    #[test]
    fn high_temperature_approximation() {
        let model = m(1.0, 100.0);
        let closed = decoherence_exponent_closed(&model, 50.0).unwrap();
        let approx = decoherence_exponent_high_t(&model, 50.0).unwrap();
        assert!((closed - approx).abs() / closed < 0.02);
    }

    #[test]
    fn log_sinhc_is_smooth_across_branches() {
        for x in [1e-4f64, 5e-4, 1e-3, 0.0999, 0.1, 0.5, 19.999, 20.0, 20.001, 300.0] {
            let expect = if x < 1e-2 {
                let x2 = x * x;
                x2 / 6.0 - x2 * x2 / 180.0 + x2 * x2 * x2 / 2835.0
            } else if x < 50.0 {
                (x.sinh() / x).ln()
            } else {
                x - 2f64.ln() - x.ln()
            };
            assert!((ln_sinhc(x) - expect).abs() < 1e-12 * expect.abs().max(1e-8), "{x}");
        }
        assert!(ln_sinhc(1e6).is_finite());
    }

    #[test]
    fn parity_table() {
        use Parity::*;
        assert_eq!(parity_deficit(Symmetric, Symmetric), 0.0);
        assert_eq!(parity_deficit(Antisymmetric, Antisymmetric), 0.0);
        assert_eq!(parity_deficit(Symmetric, Antisymmetric), 2.0);
        assert_eq!(decay_factor(3.0, Symmetric, Symmetric), 1.0);
        assert!((decay_factor(0.25, Antisymmetric, Symmetric) - (-1.0f64).exp()).abs() < 1e-15);
        let model = m(0.5, 4.0 * PI);
        assert_eq!(semigroup_prefactor(&model, Symmetric, Symmetric), 1.0);
        assert!((semigroup_prefactor(&model, Symmetric, Antisymmetric) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn semigroup_rate_example() {
        let reg = decoherence_exponent_semigroup(&m(0.01, 50.0), 500.0).unwrap();
        assert!((reg.tau - 2.0 * PI * 0.01 * 500.0 / 50.0).abs() < 1e-15);
        assert!((reg.tau - 0.628).abs() < 1e-3);
        assert!(reg.regime_ok(), "{:?}", reg.warnings);
        let bad = decoherence_exponent_semigroup(&m(1.0, 5.0), 10.0).unwrap();
        assert_eq!(bad.warnings.len(), 3);
    }

    #[test]
    fn slope_approaches_semigroup_rate() {
        let model = m(1.0, 20.0);
        let theta = 400.0;
        let h = 1.0;
        let slope = (decoherence_exponent_closed(&model, theta + h).unwrap()
            - decoherence_exponent_closed(&model, theta - h).unwrap())
            / (2.0 * h);
        let rate = PI / 20.0;
        assert!((slope - rate).abs() / rate < 0.05);
    }

    #[test]
    fn derivative_series() {
        let model = m(1.0, 5.0);
        let chk = derivative_series_check(&model, 2.0, 10_000).unwrap();
        assert!((chk.lhs - chk.rhs_corrected).abs() < 1e-5, "{chk:?}");
        assert!(chk.tail > 0.0 && chk.tail < 1e-4);
        let small = derivative_series_check(&model, 1e-4, 10_000).unwrap();
        assert!(small.lhs.abs() < 1e-3 && small.rhs_corrected.abs() < 1e-3);
        let cold = derivative_series_check(&m(1.0, 1e9), 2.0, 10).unwrap();
        assert!((cold.rhs_truncated - 2.0 / 5.0).abs() < 1e-8);
    }

    #[test]
    fn weierstrass_identity() {
        for x in [0.5f64, 1.0, 2.0] {
            let exact = x.sinh() / x;
            assert!((weierstrass_product(x, 100_000) - exact).abs() < 1e-4);
            assert!((weierstrass_product_corrected(x, 100_000) - exact).abs() < 1e-8);
        }
        let pi_case = weierstrass_product_corrected(PI, 100_000);
        assert!((pi_case - PI.sinh() / PI).abs() < 1e-8);
        assert!((pi_case - 3.676).abs() < 1e-3);
    }

    #[test]
    fn monotone_in_theta() {
        let model = m(1.0, 2.0);
        let mut last = 0.0;
        for theta in theta_grid(30.0, 30) {
            let v = decoherence_exponent_quadrature(&model, theta).unwrap();
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn step_cutoff() {
        let step = SpectralModel::new(1.0, 0.01, Cutoff::Step).unwrap();
        assert_eq!(step_cutoff_exploration(&step, 0.0).unwrap().value, 0.0);
        let i100 = step_cutoff_exploration(&step, 100.0).unwrap();
        let i200 = step_cutoff_exploration(&step, 200.0).unwrap();
        assert!(i100.warnings.is_empty());
        let ratio = ((i200.value - i100.value) / 100.0) / (i100.value / 100.0);
        assert!((ratio - 1.0).abs() < 0.1, "ratio {ratio}");
        let hot = SpectralModel::new(1.0, 10.0, Cutoff::Step).unwrap();
        let v = step_cutoff_exploration(&hot, 5.0).unwrap();
        assert!(v.value.is_finite() && !v.warnings.is_empty());
        assert!(step_cutoff_exploration(&m(1.0, 1.0), 1.0).is_err());
    }

    #[test]
    fn curve_columns() {
        let table = curve_table(&m(1.0, 10.0), &theta_grid(20.0, 4)).unwrap();
        assert_eq!(table.rows.len(), 4);
        let q = table.column("I_quadrature").unwrap();
        let c = table.column("I_closed").unwrap();
        for (a, b) in q.iter().zip(&c) {
            assert!((a - b).abs() <= 1e-5 * b.abs());
        }
    }
}
