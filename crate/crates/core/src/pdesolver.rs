//! θ-scheme finite differences for the heat equation mapped onto the fixed
//! reference interval.
//!
//! With `x = l(t) y` and `w(y, t) = u(l(t) y, t)` the problem
//! `u_t = u_xx` on `(0, l(t))` becomes
//!
//! ```text
//! w_t = (l'(t)/l(t)) y w_y + l(t)^{-2} w_yy,   y ∈ (0, 1),
//! ```
//!
//! which for `l(t) = (1 + kt)^α` reads `w_t = kα y/(1+kt) w_y + (1+kt)^{-2α} w_yy`.
//! Each step solves `(I − θ dt L^{n+1}) w^{n+1} = (I + (1−θ) dt L^n) w^n` with the
//! coefficients frozen at the two stage times.

use log::warn;

use crate::domain::BoundaryCurve;
use crate::error::{invalid, Error, Result};
use crate::quadrature::trapezoid_by;
use crate::tridiag::Tridiagonal;

/// Norm above which a run is declared divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

/// Minimum number of grid cells.
pub const MIN_CELLS: usize = 8;

const COMPATIBILITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Advection {
    Centered,
    Upwind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub n_grid: usize,
    pub dt: f64,
    pub theta: f64,
    pub advection: Advection,
    pub t_final: f64,
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid < MIN_CELLS {
            return Err(invalid(
                "n_grid",
                format!("must be >= {MIN_CELLS}, got {}", self.n_grid),
            ));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt", format!("must be > 0, got {}", self.dt)));
        }
        if !(0.5..=1.0).contains(&self.theta) {
            return Err(invalid(
                "theta",
                format!("theta outside [0.5,1]: {}", self.theta),
            ));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(invalid(
                "t_final",
                format!("must be > 0, got {}", self.t_final),
            ));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n_grid as f64
    }

    /// Number of steps to reach `t_final` (at least one).
    pub fn n_steps(&self) -> usize {
        ((self.t_final / self.dt).round() as usize).max(1)
    }
}

/// Grid function on `y_i = i / N` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub values: Vec<f64>,
    pub curve: BoundaryCurve,
}

impl FieldState {
    pub fn new(curve: BoundaryCurve, t: f64, values: Vec<f64>) -> Result<Self> {
        let s = Self { t, values, curve };
        s.validate()?;
        Ok(s)
    }

    /// Samples `f(y)` on the grid; the left value is forced to zero.
    pub fn from_fn<F: Fn(f64) -> f64>(curve: BoundaryCurve, n: usize, f: F) -> Result<Self> {
        let mut values: Vec<f64> = (0..=n).map(|i| f(i as f64 / n as f64)).collect();
        if let Some(v) = values.first_mut() {
            *v = 0.0;
        }
        Self::new(curve, 0.0, values)
    }

    pub fn zeros(curve: BoundaryCurve, n: usize) -> Self {
        Self {
            t: 0.0,
            values: vec![0.0; n + 1],
            curve,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() < MIN_CELLS + 1 {
            return Err(Error::InvalidState(format!(
                "need at least {} nodes, got {}",
                MIN_CELLS + 1,
                self.values.len()
            )));
        }
        if !(self.t.is_finite() && self.t >= 0.0) {
            return Err(Error::InvalidState(format!("bad time {}", self.t)));
        }
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("state value at node {i}")));
        }
        if self.values[0] != 0.0 {
            return Err(Error::InvalidState(format!(
                "left boundary value must be 0, got {}",
                self.values[0]
            )));
        }
        Ok(())
    }

    pub fn n_grid(&self) -> usize {
        self.values.len() - 1
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n_grid() as f64
    }

    /// Current physical length `l(t)`.
    pub fn length(&self) -> f64 {
        self.curve.value_unchecked(self.t)
    }

    pub fn right_value(&self) -> f64 {
        self.values[self.n_grid()]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            t: self.t,
            values: self.values.iter().map(|v| c * v).collect(),
            curve: self.curve,
        }
    }

    pub fn energy(&self) -> f64 {
        energy(self)
    }

    pub fn physical_l2_norm(&self) -> f64 {
        physical_l2_norm(self)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `E(t) = ∫₀¹ w² dy` by composite trapezoid.
pub fn energy(state: &FieldState) -> f64 {
    trapezoid_by(&state.values, state.h(), |_, v| v * v)
}

/// `‖u‖_{L²(0,l(t))} = sqrt(l(t) ∫₀¹ w² dy)`.
pub fn physical_l2_norm(state: &FieldState) -> f64 {
    (state.length() * energy(state)).sqrt()
}

/// Coefficients `(lower, diag, upper)` of the discrete operator `L` at interior node `i`.
fn operator_row(i: usize, log_rate: f64, diffusion: f64, h: f64, adv: Advection) -> (f64, f64, f64) {
    let c = log_rate * i as f64 * h;
    let d = diffusion / (h * h);
    match adv {
        Advection::Centered => {
            let a = c / (2.0 * h);
            (d - a, -2.0 * d, d + a)
        }
        Advection::Upwind => {
            let a = c / h;
            if c >= 0.0 {
                (d, -2.0 * d - a, d + a)
            } else {
                (d - a, -2.0 * d + a, d)
            }
        }
    }
}

/// Reusable workspace for θ-steps on a fixed grid.
#[derive(Debug, Clone)]
pub struct Stepper {
    cfg: SchemeConfig,
    matrix: Tridiagonal,
    rhs: Vec<f64>,
    sol: Vec<f64>,
    scratch: Vec<f64>,
}

impl Stepper {
    pub fn new(cfg: SchemeConfig) -> Result<Self> {
        cfg.validate()?;
        let m = cfg.n_grid - 1;
        Ok(Self {
            cfg,
            matrix: Tridiagonal::zeros(m),
            rhs: vec![0.0; m],
            sol: vec![0.0; m],
            scratch: Vec::with_capacity(m),
        })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    /// Implicit-side matrix `I − θ dt L` assembled at time `t_next`.
    pub fn implicit_matrix(&mut self, curve: &BoundaryCurve, t_next: f64) -> &Tridiagonal {
        self.assemble(curve, t_next, self.cfg.dt);
        &self.matrix
    }

    fn assemble(&mut self, curve: &BoundaryCurve, t_next: f64, dt: f64) {
        let n = self.cfg.n_grid;
        let h = self.cfg.h();
        let (a, b) = (curve.log_rate(t_next), curve.value_unchecked(t_next).powi(-2));
        let s = self.cfg.theta * dt;
        for i in 1..n {
            let (lo, di, up) = operator_row(i, a, b, h, self.cfg.advection);
            let r = i - 1;
            self.matrix.lower[r] = -s * lo;
            self.matrix.diag[r] = 1.0 - s * di;
            self.matrix.upper[r] = -s * up;
        }
    }

    /// Advance `state` in place from `state.t` to `t_next` imposing `w_N = right_bc`.
    pub fn advance(&mut self, state: &mut FieldState, t_next: f64, right_bc: f64) -> Result<()> {
        if !right_bc.is_finite() {
            return Err(Error::NonFinite("right boundary value".into()));
        }
        let n = self.cfg.n_grid;
        if state.n_grid() != n {
            return Err(Error::InvalidState(format!(
                "state has {} cells, scheme expects {n}",
                state.n_grid()
            )));
        }
        let h = self.cfg.h();
        let dt = t_next - state.t;
        let theta = self.cfg.theta;
        let explicit = (1.0 - theta) * dt;
        let curve = state.curve;
        let (a0, b0) = (curve.log_rate(state.t), curve.value_unchecked(state.t).powi(-2));
        let w = &state.values;
        for i in 1..n {
            let mut r = w[i];
            if explicit != 0.0 {
                let (lo, di, up) = operator_row(i, a0, b0, h, self.cfg.advection);
                r += explicit * (lo * w[i - 1] + di * w[i] + up * w[i + 1]);
            }
            self.rhs[i - 1] = r;
        }
        self.assemble(&curve, t_next, dt);
        // known right value moves to the right-hand side: −(I − θ dt L)_{N−1,N} w_N
        self.rhs[n - 2] -= self.matrix.upper[n - 2] * right_bc;
        self.matrix
            .solve_into(&self.rhs, &mut self.sol, &mut self.scratch)?;
        let v = &mut state.values;
        v[1..n].copy_from_slice(&self.sol);
        v[0] = 0.0;
        v[n] = right_bc;
        state.t = t_next;
        Ok(())
    }
}

/// One θ-step of length `cfg.dt` with right boundary value `right_bc` at `t + dt`.
pub fn step(state: &FieldState, cfg: &SchemeConfig, right_bc: f64) -> Result<FieldState> {
    state.validate()?;
    let mut stepper = Stepper::new(*cfg)?;
    let mut next = state.clone();
    stepper.advance(&mut next, state.t + cfg.dt, right_bc)?;
    Ok(next)
}

/// One row of a [`DecayTrace`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub t: f64,
    pub l: f64,
    pub norm: f64,
    pub energy: f64,
    pub control: Option<f64>,
}

impl TraceSample {
    pub fn from_state(state: &FieldState, control: Option<f64>) -> Self {
        let e = energy(state);
        let l = state.length();
        Self {
            t: state.t,
            l,
            norm: (l * e).sqrt(),
            energy: e,
            control,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DecayTrace {
    pub samples: Vec<TraceSample>,
    /// Set when the run's boundary curve is not monotone.
    pub non_monotone_boundary: bool,
}

impl DecayTrace {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.norm).collect()
    }

    pub fn t_final(&self) -> Option<f64> {
        self.samples.last().map(|s| s.t)
    }

    /// Sample whose time is closest to `t`.
    pub fn nearest(&self, t: f64) -> Option<&TraceSample> {
        self.samples
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
    }
}

/// `n` logarithmically spaced times covering `[start, end]`.
pub fn log_spaced_times(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![end],
        _ => {
            let (a, b) = (start.ln(), end.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

/// `n + 1` uniformly spaced times on `[0, end]`.
pub fn uniform_times(end: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| end * i as f64 / n.max(1) as f64).collect()
}

/// Step indices at which the requested sample times are recorded (nearest grid time),
/// sorted and de-duplicated.
pub fn sample_steps(cfg: &SchemeConfig, sample_times: &[f64]) -> Result<Vec<usize>> {
    let n_steps = cfg.n_steps();
    let t_end = n_steps as f64 * cfg.dt;
    let mut steps = Vec::with_capacity(sample_times.len());
    for &s in sample_times {
        if !(s.is_finite() && s >= 0.0 && s <= cfg.t_final.max(t_end) * (1.0 + 1e-12)) {
            return Err(invalid(
                "sample_times",
                format!("{s} lies outside [0, {}]", cfg.t_final),
            ));
        }
        steps.push(((s / cfg.dt).round() as usize).min(n_steps));
    }
    steps.sort_unstable();
    steps.dedup();
    Ok(steps)
}

pub(crate) fn check_divergence(state: &FieldState) -> Result<()> {
    let norm = physical_l2_norm(state);
    if !norm.is_finite() || norm > DIVERGENCE_THRESHOLD {
        return Err(Error::Divergence { t: state.t, norm });
    }
    Ok(())
}

/// Imposes `w_N = value` at the initial time, warning on a compatibility mismatch.
pub(crate) fn enforce_compatibility(state: &mut FieldState, value: f64) {
    let n = state.n_grid();
    let mismatch = (state.values[n] - value).abs();
    if mismatch > COMPATIBILITY_TOL {
        warn!(
            "initial datum right value {} differs from boundary datum {} by {:e}; overwriting",
            state.values[n], value, mismatch
        );
    }
    state.values[n] = value;
}

/// Open-loop run with right boundary `w(1, t) = boundary_source(t)`.
pub fn simulate<S>(
    initial: FieldState,
    cfg: &SchemeConfig,
    boundary_source: S,
    sample_times: &[f64],
) -> Result<DecayTrace>
where
    S: FnMut(f64) -> f64,
{
    simulate_observed(initial, cfg, boundary_source, sample_times, |_| {})
}

/// [`simulate`] with a callback invoked on the initial state and after every step.
pub fn simulate_observed<S, O>(
    initial: FieldState,
    cfg: &SchemeConfig,
    mut boundary_source: S,
    sample_times: &[f64],
    mut observer: O,
) -> Result<DecayTrace>
where
    S: FnMut(f64) -> f64,
    O: FnMut(&FieldState),
{
    initial.validate()?;
    let mut stepper = Stepper::new(*cfg)?;
    let steps = sample_steps(cfg, sample_times)?;
    let mut state = initial;
    if state.n_grid() != cfg.n_grid {
        return Err(Error::InvalidState(format!(
            "initial datum has {} cells, scheme expects {}",
            state.n_grid(),
            cfg.n_grid
        )));
    }
    let t0 = state.t;
    let source0 = boundary_source(t0);
    enforce_compatibility(&mut state, source0);

    let mut trace = DecayTrace {
        samples: Vec::with_capacity(steps.len()),
        non_monotone_boundary: !state.curve.is_monotone(),
    };
    let mut next_sample = steps.iter().peekable();
    observer(&state);
    if next_sample.peek() == Some(&&0) {
        trace.samples.push(TraceSample::from_state(&state, None));
        next_sample.next();
    }
    for n in 1..=cfg.n_steps() {
        let t_next = t0 + n as f64 * cfg.dt;
        let bc = boundary_source(t_next);
        stepper.advance(&mut state, t_next, bc)?;
        check_divergence(&state)?;
        observer(&state);
        if next_sample.peek() == Some(&&n) {
            trace.samples.push(TraceSample::from_state(&state, None));
            next_sample.next();
        }
    }
    Ok(trace)
}
