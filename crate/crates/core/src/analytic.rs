//! Closed-form separable solutions of the uncontrolled problem on
//! `(0, (1 + k t)^alpha)` and the algebraic / stretched-exponential decay
//! envelopes that bracket its `L²` norm.
//!
//! The solution family is `u = sin(πx / l(t)) · G(t) · exp(k²α²x²t / (4(1+kt))) · exp(−kαx²/4)`
//! with a logarithmic growth factor `G` at `alpha = 1/2` and a power/exponential
//! factor otherwise. The ansatz is an exact solution of `u_t = u_xx` only for
//! `alpha = 1`; for other exponents it is evaluated as written and serves as a
//! smooth, positive, compatible initial datum (its `t = 0` trace).

use std::f64::consts::PI;

use statrs::function::erf::erf;

use crate::error::{invalid, Error, Result};
use crate::quadrature::simpson;

const PI2: f64 = PI * PI;

/// Poincaré constant on `(0, 1)` used by the energy upper bounds.
pub const POINCARE_CONSTANT: f64 = PI2;

fn check_params(alpha: f64, k: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(invalid("alpha", format!("must be > 0, got {alpha}")));
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(invalid("k", format!("must be > 0, got {k}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSolution {
    pub alpha: f64,
    pub k: f64,
}

impl AnalyticSolution {
    pub fn new(alpha: f64, k: f64) -> Result<Self> {
        check_params(alpha, k)?;
        Ok(Self { alpha, k })
    }

    /// `l(t) = (1 + k t)^alpha`.
    pub fn boundary(&self, t: f64) -> f64 {
        (1.0 + self.k * t).powf(self.alpha)
    }

    /// Time factor `G(t)`. The half-exponent case is selected by exact comparison.
    #[allow(clippy::float_cmp)]
    pub fn time_factor(&self, t: f64) -> f64 {
        let (a, k) = (self.alpha, self.k);
        let s = 1.0 + k * t;
        if a == 0.5 {
            s.powf(-a / 2.0 - PI2 / k)
        } else {
            let e = 1.0 - 2.0 * a;
            s.powf(-a / 2.0) * (-PI2 * (s.powf(e) - 1.0) / (k * e)).exp()
        }
    }

    /// `u(x, t)` for `0 ≤ x ≤ l(t)`.
    pub fn value(&self, x: f64, t: f64) -> Result<f64> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidTime {
                t,
                reason: "time must be finite and non-negative",
            });
        }
        let l = self.boundary(t);
        if !(0.0..=l).contains(&x) {
            return Err(Error::OutOfDomain { value: x, upper: l });
        }
        Ok(self.value_unchecked(x, t))
    }

    pub(crate) fn value_unchecked(&self, x: f64, t: f64) -> f64 {
        let (a, k) = (self.alpha, self.k);
        let s = 1.0 + k * t;
        let l = s.powf(a);
        let gauss = k * k * a * a * x * x * t / (4.0 * s) - k * a * x * x / 4.0;
        (PI * x / l).sin() * self.time_factor(t) * gauss.exp()
    }

    /// Initial datum on the reference grid `y_i = i / n`: `sin(πy) e^{−kαy²/4}`.
    pub fn initial_grid(&self, n: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..=n)
            .map(|i| self.value_unchecked(i as f64 / n as f64, 0.0))
            .collect();
        v[0] = 0.0;
        v[n] = 0.0;
        v
    }

    /// Physical `L²(0, l(t))` norm by composite Simpson quadrature with `n` panels.
    pub fn l2_norm(&self, t: f64, n: usize) -> f64 {
        let l = self.boundary(t);
        simpson(
            |x| {
                let u = self.value_unchecked(x, t);
                u * u
            },
            0.0,
            l,
            n,
        )
        .sqrt()
    }
}

/// Which side of the norm an envelope bounds, and its functional form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeKind {
    PolyUpper,
    PolyLower,
    StretchedUpper,
    StretchedLower,
}

impl EnvelopeKind {
    pub fn is_lower(self) -> bool {
        matches!(self, EnvelopeKind::PolyLower | EnvelopeKind::StretchedLower)
    }
}

/// `coefficient · (1 + k t)^{−poly_exponent} · exp(−stretch_rate · t^{stretch_exponent})`,
/// valid for `t ≥ valid_from`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayEnvelope {
    pub kind: EnvelopeKind,
    pub coefficient: f64,
    pub poly_exponent: f64,
    pub k: f64,
    pub stretch_rate: f64,
    pub stretch_exponent: f64,
    pub valid_from: f64,
}

impl DecayEnvelope {
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        evaluate_envelope(self, t)
    }
}

/// `(2/(kα))^{3/2} (√π − 1) / 8`: lower bound on the truncated Gaussian second moment.
pub fn gaussian_moment_constant(alpha: f64, k: f64) -> f64 {
    (2.0 / (k * alpha)).powf(1.5) * (PI.sqrt() - 1.0) / 8.0
}

/// Both tail inequalities of the Gaussian moment bound at time `t`.
fn moment_bound_holds(alpha: f64, k: f64, t: f64) -> bool {
    let y = (k * alpha / 2.0).sqrt() * (1.0 + k * t).powf(alpha) / 2.0;
    let boundary_term = -0.5 * y * (-y * y).exp();
    // ∫₀^y e^{-s²}/2 ds = (√π / 4) erf(y)
    let integral = 0.25 * PI.sqrt() * erf(y);
    boundary_term >= -0.125 && integral >= PI.sqrt() / 8.0
}

/// Smallest time on `{0, 0.1, …, 50}` from which the lower envelope applies.
pub fn lower_envelope_onset(alpha: f64, k: f64) -> Result<f64> {
    check_params(alpha, k)?;
    (0..=500)
        .map(|i| i as f64 * 0.1)
        .find(|&t| moment_bound_holds(alpha, k, t))
        .ok_or_else(|| invalid("alpha/k", "lower-envelope onset not reached by t = 50"))
}

/// Lower envelope for the closed-form solution, valid from `t0`.
#[allow(clippy::float_cmp)]
pub fn lower_envelope(alpha: f64, k: f64, t0: f64) -> Result<DecayEnvelope> {
    check_params(alpha, k)?;
    if !(t0.is_finite() && t0 >= 0.0) {
        return Err(invalid("t0", format!("must be >= 0, got {t0}")));
    }
    let c1 = gaussian_moment_constant(alpha, k);
    // √(4 C₁): square root of the moment constant after the sin ≥ 2θ/π step.
    let c_sqrt = 2.0 * c1.sqrt();
    let env = if alpha == 0.5 {
        DecayEnvelope {
            kind: EnvelopeKind::PolyLower,
            coefficient: c_sqrt,
            poly_exponent: PI2 / k + 1.5 * alpha,
            k,
            stretch_rate: 0.0,
            stretch_exponent: 0.0,
            valid_from: t0,
        }
    } else if alpha > 0.5 {
        DecayEnvelope {
            kind: EnvelopeKind::PolyLower,
            coefficient: c_sqrt * (PI2 / (k * (1.0 - 2.0 * alpha))).exp(),
            poly_exponent: alpha / 2.0,
            k,
            stretch_rate: 0.0,
            stretch_exponent: 0.0,
            valid_from: t0,
        }
    } else {
        let e = 1.0 - 2.0 * alpha;
        DecayEnvelope {
            kind: EnvelopeKind::StretchedLower,
            coefficient: c_sqrt,
            poly_exponent: alpha / 2.0,
            k,
            stretch_rate: PI2 * k.powf(-2.0 * alpha) / e,
            stretch_exponent: e,
            valid_from: t0,
        }
    };
    finite_coefficient(env)
}

fn finite_coefficient(env: DecayEnvelope) -> Result<DecayEnvelope> {
    if env.coefficient.is_finite() {
        Ok(env)
    } else {
        Err(Error::NonFinite(format!(
            "envelope coefficient overflows for k = {}, exponent {}",
            env.k, env.stretch_exponent
        )))
    }
}

/// Energy upper envelope for a datum with `‖u₀‖_{L²(0,1)} = initial_norm`.
pub fn upper_envelope(alpha: f64, k: f64, initial_norm: f64) -> Result<DecayEnvelope> {
    check_params(alpha, k)?;
    if !(initial_norm.is_finite() && initial_norm >= 0.0) {
        return Err(invalid("initial_norm", "must be finite and >= 0"));
    }
    let env = if alpha >= 0.5 {
        DecayEnvelope {
            kind: EnvelopeKind::PolyUpper,
            coefficient: initial_norm,
            poly_exponent: alpha / 2.0,
            k,
            stretch_rate: 0.0,
            stretch_exponent: 0.0,
            valid_from: 0.0,
        }
    } else {
        let e = 1.0 - 2.0 * alpha;
        let c = POINCARE_CONSTANT;
        DecayEnvelope {
            kind: EnvelopeKind::StretchedUpper,
            coefficient: initial_norm * (c / (k * e)).exp(),
            poly_exponent: 0.0,
            k,
            stretch_rate: c * k.powf(-2.0 * alpha) / e,
            stretch_exponent: e,
            valid_from: 0.0,
        }
    };
    finite_coefficient(env)
}

pub fn evaluate_envelope(env: &DecayEnvelope, t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= env.valid_from) {
        return Err(Error::InvalidTime {
            t,
            reason: "envelope evaluated before its onset time",
        });
    }
    if env.coefficient == 0.0 {
        return Ok(0.0);
    }
    let mut log_decay = 0.0;
    if env.poly_exponent != 0.0 {
        log_decay -= env.poly_exponent * (env.k * t).ln_1p();
    }
    if env.stretch_rate != 0.0 {
        log_decay -= env.stretch_rate * t.powf(env.stretch_exponent);
    }
    let decay = log_decay.exp();
    // a subnormal or infinite factor would lose the product; combine logs instead
    if decay.is_normal() {
        Ok(env.coefficient * decay)
    } else {
        Ok((env.coefficient.ln() + log_decay).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vanishes_at_left_endpoint() {
        let s = AnalyticSolution::new(0.5, 1.0).unwrap();
        assert_eq!(s.value(0.0, 5.0).unwrap(), 0.0);
    }

    #[test]
    fn half_exponent_trace_at_zero() {
        let s = AnalyticSolution::new(0.5, 1.0).unwrap();
        let v = s.value(0.5, 0.0).unwrap();
        assert!((v - (-0.03125f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn outside_domain_rejected() {
        let s = AnalyticSolution::new(1.0, 1.0).unwrap();
        assert!(matches!(s.value(2.5, 1.0), Err(Error::OutOfDomain { .. })));
        assert!(s.value(-0.1, 1.0).is_err());
        assert!(s.value(0.1, -1.0).is_err());
    }

    #[test]
    fn near_half_uses_general_branch_continuously() {
        let a = AnalyticSolution::new(0.5, 1.0).unwrap();
        let b = AnalyticSolution::new(0.5 + 1e-9, 1.0).unwrap();
        let (va, vb) = (a.time_factor(3.0), b.time_factor(3.0));
        assert!(((va - vb) / va).abs() < 1e-6);
    }

    #[test]
    fn lower_exponents() {
        let e = lower_envelope(0.5, PI2, 0.0).unwrap();
        assert!((e.poly_exponent - 1.75).abs() < 1e-15);
        assert_eq!(e.kind, EnvelopeKind::PolyLower);
        let e = lower_envelope(1.0, 1.0, 0.0).unwrap();
        assert_eq!(e.poly_exponent, 0.5);
        let e = lower_envelope(0.25, 1.0, 0.0).unwrap();
        assert_eq!(e.kind, EnvelopeKind::StretchedLower);
        assert_eq!(e.stretch_exponent, 0.5);
    }

    #[test]
    fn moment_constant_value() {
        // 2/(kα) = 4 here, so the constant is exactly √π − 1.
        let c1 = gaussian_moment_constant(0.5, 1.0);
        assert!((c1 - (PI.sqrt() - 1.0)).abs() < 1e-15, "{c1}");
        let c1 = gaussian_moment_constant(1.0, 2.0);
        assert!((c1 - (PI.sqrt() - 1.0) / 8.0).abs() < 1e-15, "{c1}");
    }

    #[test]
    fn upper_kinds() {
        let e = upper_envelope(1.0, 0.5, 1.0).unwrap();
        assert_eq!((e.kind, e.poly_exponent), (EnvelopeKind::PolyUpper, 0.5));
        let e = upper_envelope(0.25, 1.0, 1.0).unwrap();
        assert_eq!((e.kind, e.stretch_exponent), (EnvelopeKind::StretchedUpper, 0.5));
        let e = upper_envelope(0.5, 2.0, 1.0).unwrap();
        assert_eq!((e.kind, e.poly_exponent), (EnvelopeKind::PolyUpper, 0.25));
        assert!(upper_envelope(-1.0, 1.0, 1.0).is_err());
        assert!(lower_envelope(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn envelope_evaluation() {
        let poly = DecayEnvelope {
            kind: EnvelopeKind::PolyLower,
            coefficient: 1.0,
            poly_exponent: 0.5,
            k: 1.0,
            stretch_rate: 0.0,
            stretch_exponent: 0.0,
            valid_from: 0.0,
        };
        assert!((evaluate_envelope(&poly, 3.0).unwrap() - 0.5).abs() < 1e-15);
        let st = DecayEnvelope {
            kind: EnvelopeKind::StretchedUpper,
            coefficient: 1.0,
            poly_exponent: 0.0,
            k: 1.0,
            stretch_rate: 1.0,
            stretch_exponent: 0.5,
            valid_from: 0.0,
        };
        assert!((evaluate_envelope(&st, 4.0).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        let flat = DecayEnvelope {
            coefficient: 7.0,
            poly_exponent: 0.0,
            stretch_rate: 0.0,
            ..poly
        };
        assert_eq!(evaluate_envelope(&flat, 0.0).unwrap(), 7.0);
        let late = DecayEnvelope {
            valid_from: 2.0,
            ..poly
        };
        assert!(evaluate_envelope(&late, 1.0).is_err());
    }

    #[test]
    fn onset_is_where_both_tail_bounds_start() {
        let t0 = lower_envelope_onset(1.0, 0.5).unwrap();
        assert!(moment_bound_holds(1.0, 0.5, t0));
        assert!(t0 == 0.0 || !moment_bound_holds(1.0, 0.5, t0 - 0.1));
        for i in 0..100 {
            assert!(moment_bound_holds(1.0, 0.5, t0 + i as f64));
        }
    }
}
