//! Boundary feedback `U(t) = −∫₀^{l(t)} p(l(t), y) u(y, t) dy` and the closed loop.

use log::warn;

use crate::error::Result;
use crate::kernel::{forward_transform, p_kernel, KernelParams};
use crate::pdesolver::{
    check_divergence, enforce_compatibility, physical_l2_norm, sample_steps, DecayTrace,
    FieldState, SchemeConfig, Stepper, TraceSample,
};
use crate::quadrature::trapezoid;

/// Control value at one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlRecord {
    pub t: f64,
    pub u_value: f64,
    /// Backward difference `(U_n − U_{n−1}) / dt`; `None` on the first record.
    pub u_derivative: Option<f64>,
}

/// Feedback functional evaluated by trapezoid on the state's reference grid.
pub fn feedback(state: &FieldState, params: &KernelParams) -> Result<f64> {
    FeedbackGain::new(state, params)?.apply(state)
}

/// Trapezoid weights `l h p(l, l s_j)` of the feedback at a fixed boundary length.
#[derive(Debug, Clone)]
pub struct FeedbackGain {
    l: f64,
    weights: Vec<f64>,
}

impl FeedbackGain {
    pub fn new(state: &FieldState, params: &KernelParams) -> Result<Self> {
        let mut g = Self {
            l: f64::NAN,
            weights: vec![0.0; state.values.len()],
        };
        g.update(state.length(), params)?;
        Ok(g)
    }

    fn update(&mut self, l: f64, params: &KernelParams) -> Result<()> {
        #[allow(clippy::float_cmp)]
        if l == self.l {
            return Ok(());
        }
        let n = self.weights.len() - 1;
        let h = 1.0 / n as f64;
        for (j, wt) in self.weights.iter_mut().enumerate() {
            let y = if j == n { l } else { l * j as f64 * h };
            let end = if j == 0 || j == n { 0.5 } else { 1.0 };
            *wt = end * l * h * p_kernel(params, l, y)?;
        }
        self.l = l;
        Ok(())
    }

    pub fn apply(&self, state: &FieldState) -> Result<f64> {
        let s: f64 = self
            .weights
            .iter()
            .zip(&state.values)
            .map(|(w, v)| w * v)
            .sum();
        Ok(-s)
    }
}

/// Output of [`run_closed_loop`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoopRun {
    pub trace: DecayTrace,
    pub controls: Vec<ControlRecord>,
    /// States at the recorded sample times.
    pub snapshots: Vec<FieldState>,
}

/// Closed-loop run: each step imposes the feedback computed from the state at
/// the start of the step as the right boundary value at its end.
pub fn run_closed_loop(
    initial: FieldState,
    cfg: &SchemeConfig,
    params: &KernelParams,
    sample_times: &[f64],
) -> Result<ClosedLoopRun> {
    initial.validate()?;
    params.validate()?;
    if let Some((_, k)) = initial.curve.power_law_params() {
        if params.lambda <= k * k {
            warn!("lambda = {} does not exceed k^2 = {}", params.lambda, k * k);
        } else if params.lambda <= 25.0 * k * k {
            warn!(
                "lambda = {} is below 25 k^2 = {}; control regularity is not guaranteed",
                params.lambda,
                25.0 * k * k
            );
        }
    }
    let mut stepper = Stepper::new(*cfg)?;
    let steps = sample_steps(cfg, sample_times)?;
    let mut state = initial;
    let mut gain = FeedbackGain::new(&state, params)?;
    let u0 = gain.apply(&state)?;
    enforce_compatibility(&mut state, u0);

    let n_steps = cfg.n_steps();
    let mut controls = Vec::with_capacity(n_steps + 1);
    let mut trace = DecayTrace {
        samples: Vec::with_capacity(steps.len()),
        non_monotone_boundary: !state.curve.is_monotone(),
    };
    let mut snapshots = Vec::with_capacity(steps.len());
    let mut next_sample = steps.iter().peekable();
    let t0 = state.t;

    let mut u_prev: Option<f64> = None;
    for n in 0..=n_steps {
        gain.update(state.length(), params)?;
        let u = gain.apply(&state)?;
        controls.push(ControlRecord {
            t: state.t,
            u_value: u,
            u_derivative: u_prev.map(|p| (u - p) / cfg.dt),
        });
        u_prev = Some(u);
        if next_sample.peek() == Some(&&n) {
            trace.samples.push(TraceSample::from_state(&state, Some(u)));
            snapshots.push(state.clone());
            next_sample.next();
        }
        if n == n_steps {
            break;
        }
        let t_next = t0 + (n + 1) as f64 * cfg.dt;
        stepper.advance(&mut state, t_next, u)?;
        check_divergence(&state)?;
    }
    Ok(ClosedLoopRun {
        trace,
        controls,
        snapshots,
    })
}

/// Transformed norms against the target decay `‖w₀‖ e^{−λ t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetCheck {
    /// `max_t ‖w(t)‖ / (‖w(0)‖ e^{−λ t})`; zero for a zero run.
    pub worst_ratio: f64,
    /// `(t, ‖w(t)‖, ‖w(0)‖ e^{−λ t})` per snapshot.
    pub samples: Vec<(f64, f64, f64)>,
}

pub fn target_crosscheck(snapshots: &[FieldState], params: &KernelParams) -> Result<TargetCheck> {
    let mut samples = Vec::with_capacity(snapshots.len());
    let Some(first) = snapshots.first() else {
        return Ok(TargetCheck {
            worst_ratio: 0.0,
            samples,
        });
    };
    let w0 = physical_l2_norm(&forward_transform(first, params)?);
    let mut worst: f64 = 0.0;
    for s in snapshots {
        let w = physical_l2_norm(&forward_transform(s, params)?);
        let bound = w0 * (-params.lambda * (s.t - first.t)).exp();
        if w0 > 0.0 {
            worst = worst.max(w / bound);
        }
        samples.push((s.t, w, bound));
    }
    Ok(TargetCheck {
        worst_ratio: worst,
        samples,
    })
}

/// Discrete time norms of the control history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlRegularity {
    /// `(∫ U² dt)^{1/2}`
    pub u_l2: f64,
    /// `(∫ U'² dt)^{1/2}`
    pub du_l2: f64,
    /// `(∫ l(t) U'² dt)^{1/2}`
    pub weighted_du_l2: f64,
    /// Share of `∫ U²` accumulated over the second half of the horizon.
    pub u_tail_share: f64,
    /// Share of `∫ U'²` accumulated over the second half of the horizon.
    pub du_tail_share: f64,
}

impl ControlRegularity {
    pub fn is_finite(&self) -> bool {
        [self.u_l2, self.du_l2, self.weighted_du_l2]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// Trapezoid-in-time norms; `U'` by centered differences (one-sided at the ends).
/// `length` maps a record time to `l(t)`. Requires at least three equally spaced records.
pub fn control_regularity_diagnostics<L: Fn(f64) -> f64>(
    records: &[ControlRecord],
    length: L,
) -> Result<ControlRegularity> {
    if records.len() < 3 {
        return Err(crate::Error::TooFewSamples {
            found: records.len(),
            needed: 3,
        });
    }
    let n = records.len();
    let dt = (records[n - 1].t - records[0].t) / (n - 1) as f64;
    let u: Vec<f64> = records.iter().map(|r| r.u_value).collect();
    let du: Vec<f64> = (0..n)
        .map(|i| match i {
            0 => (u[1] - u[0]) / dt,
            i if i == n - 1 => (u[n - 1] - u[n - 2]) / dt,
            i => (u[i + 1] - u[i - 1]) / (2.0 * dt),
        })
        .collect();
    let u2: Vec<f64> = u.iter().map(|v| v * v).collect();
    let du2: Vec<f64> = du.iter().map(|v| v * v).collect();
    let wdu2: Vec<f64> = du2
        .iter()
        .zip(records)
        .map(|(d, r)| d * length(r.t))
        .collect();
    let half = n / 2;
    let tail = |f: &[f64]| {
        let total = trapezoid(f, dt);
        if total > 0.0 {
            trapezoid(&f[half..], dt) / total
        } else {
            0.0
        }
    };
    Ok(ControlRegularity {
        u_l2: trapezoid(&u2, dt).sqrt(),
        du_l2: trapezoid(&du2, dt).sqrt(),
        weighted_du_l2: trapezoid(&wdu2, dt).sqrt(),
        u_tail_share: tail(&u2),
        du_tail_share: tail(&du2),
    })
}
