//! Decay-model fits of norm histories and regime classification.
//!
//! Three models are fitted by least squares on `log ‖u‖`:
//! exponential `e^{−r t}`, polynomial `(1+kt)^{−γ}` and stretched `e^{−C₁ t^β}`.

use std::fmt;

use crate::error::{Error, Result};
use crate::pdesolver::DecayTrace;

/// Samples at or below this norm are treated as underflowed and skipped.
pub const NORM_FLOOR: f64 = 1e-280;
pub const MIN_SAMPLES: usize = 10;
/// Winners below this R² are reported as [`Regime::Undetermined`].
pub const MIN_R_SQUARED: f64 = 0.9;
/// R² gap under which the stronger regime wins.
pub const TIE_TOLERANCE: f64 = 0.005;
pub const BETA_RANGE: (f64, f64) = (0.05, 0.95);
/// A stretched fit whose β lands this close to a search bound is degenerate.
pub const BETA_EDGE_MARGIN: f64 = 0.01;
const GOLDEN_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Exponential,
    AnalogousExponential,
    Polynomial,
    Undetermined,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Exponential => "Exponential",
            Regime::AnalogousExponential => "AnalogousExponential",
            Regime::Polynomial => "Polynomial",
            Regime::Undetermined => "Undetermined",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Regime::Exponential,
            Regime::AnalogousExponential,
            Regime::Polynomial,
            Regime::Undetermined,
        ]
        .into_iter()
        .find(|r| r.as_str().eq_ignore_ascii_case(s))
        .ok_or_else(|| crate::error::invalid("regime", format!("unknown regime {s:?}")))
    }
}

/// One fitted model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelFit {
    /// `r`, `γ` or `C₁` depending on the model.
    pub rate: f64,
    pub intercept: f64,
    /// Stretched model only.
    pub beta: Option<f64>,
    pub r_squared: f64,
}

/// Classification result with all three candidate fits.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub regime: Regime,
    pub rate: f64,
    /// Set only for [`Regime::AnalogousExponential`].
    pub stretch_exponent: Option<f64>,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub exponential: ModelFit,
    pub polynomial: ModelFit,
    pub stretched: ModelFit,
}

struct Line {
    slope: f64,
    intercept: f64,
    r_squared: f64,
}

fn linear_fit(x: &[f64], y: &[f64]) -> Line {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r_squared = if sxx > 0.0 && syy > 0.0 {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Line {
        slope,
        intercept: my - slope * mx,
        r_squared,
    }
}

/// `(t, log ‖u‖)` for samples inside `window`, skipping underflowed norms.
fn log_samples(trace: &DecayTrace, window: (f64, f64)) -> Result<(Vec<f64>, Vec<f64>)> {
    let (a, b) = window;
    if !(a.is_finite() && b.is_finite() && a >= 0.0 && a < b) {
        return Err(Error::InvalidTrace(format!("bad window [{a}, {b}]")));
    }
    let mut ts = Vec::new();
    let mut ls = Vec::new();
    for s in &trace.samples {
        if s.t < a || s.t > b {
            continue;
        }
        if !s.norm.is_finite() || s.norm < 0.0 {
            return Err(Error::InvalidTrace(format!(
                "norm {} at t = {} is negative or non-finite",
                s.norm, s.t
            )));
        }
        if s.norm <= NORM_FLOOR {
            continue;
        }
        ts.push(s.t);
        ls.push(s.norm.ln());
    }
    if ts.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            found: ts.len(),
            needed: MIN_SAMPLES,
        });
    }
    Ok((ts, ls))
}

fn exponential_on(ts: &[f64], ls: &[f64]) -> ModelFit {
    let l = linear_fit(ts, ls);
    ModelFit {
        rate: -l.slope,
        intercept: l.intercept,
        beta: None,
        r_squared: l.r_squared,
    }
}

fn polynomial_on(ts: &[f64], ls: &[f64], k: f64) -> ModelFit {
    let xs: Vec<f64> = ts.iter().map(|t| (k * t).ln_1p()).collect();
    let l = linear_fit(&xs, ls);
    ModelFit {
        rate: -l.slope,
        intercept: l.intercept,
        beta: None,
        r_squared: l.r_squared,
    }
}

fn stretched_at(ts: &[f64], ls: &[f64], beta: f64) -> ModelFit {
    let xs: Vec<f64> = ts.iter().map(|t| t.powf(beta)).collect();
    let l = linear_fit(&xs, ls);
    ModelFit {
        rate: -l.slope,
        intercept: l.intercept,
        beta: Some(beta),
        r_squared: l.r_squared,
    }
}

fn stretched_on(ts: &[f64], ls: &[f64], beta_hint: Option<f64>) -> ModelFit {
    if let Some(b) = beta_hint {
        return stretched_at(ts, ls, b);
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = BETA_RANGE;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = stretched_at(ts, ls, c).r_squared;
    let mut fd = stretched_at(ts, ls, d).r_squared;
    while b - a > GOLDEN_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = stretched_at(ts, ls, c).r_squared;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = stretched_at(ts, ls, d).r_squared;
        }
    }
    stretched_at(ts, ls, 0.5 * (a + b))
}

/// Least-squares line through `(t, log ‖u‖)`; `rate = −slope`.
pub fn fit_exponential(trace: &DecayTrace, window: (f64, f64)) -> Result<ModelFit> {
    let (ts, ls) = log_samples(trace, window)?;
    Ok(exponential_on(&ts, &ls))
}

/// Least-squares line through `(log(1+kt), log ‖u‖)`; `rate = γ = −slope`.
pub fn fit_polynomial(trace: &DecayTrace, window: (f64, f64), k: f64) -> Result<ModelFit> {
    check_k(k)?;
    let (ts, ls) = log_samples(trace, window)?;
    Ok(polynomial_on(&ts, &ls, k))
}

/// Line through `(t^β, log ‖u‖)`; `rate = C₁`. Without a hint, β maximizes R²
/// over [`BETA_RANGE`] by golden-section search.
pub fn fit_stretched(
    trace: &DecayTrace,
    window: (f64, f64),
    beta_hint: Option<f64>,
) -> Result<ModelFit> {
    if let Some(b) = beta_hint {
        if !(b > 0.0 && b < 1.0) {
            return Err(crate::error::invalid("beta_hint", format!("{b} not in (0,1)")));
        }
    }
    let (ts, ls) = log_samples(trace, window)?;
    Ok(stretched_on(&ts, &ls, beta_hint))
}

fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(crate::error::invalid("k", format!("must be positive, got {k}")))
    }
}

/// `[T/5, T]` for a trace ending at `T`.
pub fn default_window(trace: &DecayTrace) -> Result<(f64, f64)> {
    let t = trace
        .t_final()
        .ok_or_else(|| Error::InvalidTrace("empty trace".into()))?;
    Ok((t / 5.0, t))
}

/// [`classify_window`] on [`default_window`].
pub fn classify(trace: &DecayTrace, k: f64) -> Result<DecayFit> {
    classify_window(trace, k, default_window(trace)?)
}

/// Fits all three models and picks the highest R², preferring the stronger
/// regime (exponential, then stretched, then polynomial) within [`TIE_TOLERANCE`].
/// Stretched fits with β at a search edge are not eligible.
pub fn classify_window(trace: &DecayTrace, k: f64, window: (f64, f64)) -> Result<DecayFit> {
    check_k(k)?;
    let (ts, ls) = log_samples(trace, window)?;
    let exponential = exponential_on(&ts, &ls);
    let polynomial = polynomial_on(&ts, &ls, k);
    let stretched = stretched_on(&ts, &ls, None);
    let beta = stretched.beta.unwrap_or(f64::NAN);
    let stretched_ok = beta > BETA_RANGE.0 + BETA_EDGE_MARGIN && beta < BETA_RANGE.1 - BETA_EDGE_MARGIN;

    let mut candidates = vec![(Regime::Exponential, exponential)];
    if stretched_ok {
        candidates.push((Regime::AnalogousExponential, stretched));
    }
    candidates.push((Regime::Polynomial, polynomial));
    let best = candidates
        .iter()
        .map(|(_, f)| f.r_squared)
        .fold(f64::NEG_INFINITY, f64::max);
    // Candidates are ordered strongest first.
    let (regime, fit) = candidates
        .into_iter()
        .find(|(_, f)| f.r_squared >= best - TIE_TOLERANCE)
        .expect("at least one candidate");

    let classified = best >= MIN_R_SQUARED && fit.rate > 0.0;
    let regime = if classified { regime } else { Regime::Undetermined };
    Ok(DecayFit {
        regime,
        rate: fit.rate,
        stretch_exponent: if regime == Regime::AnalogousExponential { fit.beta } else { None },
        r_squared: fit.r_squared,
        window,
        exponential,
        polynomial,
        stretched,
    })
}
