//! Executes a [`RunConfig`] and serializes its trace and fit summary.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use heatgrow_core::analytic::AnalyticSolution;
use heatgrow_core::controller::{
    control_regularity_diagnostics, run_closed_loop, target_crosscheck, ControlRegularity,
};
use heatgrow_core::kernel::{kernel_bound_check, kernel_pde_residual, KernelParams};
use heatgrow_core::pdesolver::{log_spaced_times, simulate, uniform_times, DecayTrace, FieldState};
use heatgrow_core::stability::{classify, DecayFit};
use heatgrow_core::BoundaryCurve;

use crate::config::{InitialKind, RunConfig};
use crate::error::CliError;

pub const TRACE_HEADER: &str = "t,l_t,norm_u_phys,energy_ref,control_U";

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoopSummary {
    pub target_ratio: f64,
    pub regularity: ControlRegularity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub trace: DecayTrace,
    pub fit: DecayFit,
    pub closed_loop: Option<ClosedLoopSummary>,
}

/// Fitting-window samples plus a uniform coarse grid over the whole run.
pub fn sample_times(cfg: &RunConfig) -> Vec<f64> {
    let t = cfg.scheme.t_final;
    let mut times = log_spaced_times(t / 5.0, t, cfg.output.samples);
    times.extend(uniform_times(t, cfg.output.coarse_samples));
    times
}

pub fn initial_state(cfg: &RunConfig, curve: BoundaryCurve) -> Result<FieldState, CliError> {
    let n = cfg.scheme.n_grid;
    let state = match cfg.initial.kind {
        InitialKind::Analytic => {
            let (alpha, k) = curve
                .power_law_params()
                .ok_or_else(|| CliError::config("initial", "analytic datum needs a power law"))?;
            FieldState::new(curve, 0.0, AnalyticSolution::new(alpha, k)?.initial_grid(n))?
        }
        InitialKind::Sine => {
            let m = f64::from(cfg.initial.mode.unwrap_or(1));
            FieldState::from_fn(curve, n, |y| (m * std::f64::consts::PI * y).sin())?
        }
        InitialKind::Custom => {
            let path = cfg
                .initial
                .path
                .as_deref()
                .ok_or_else(|| CliError::config("initial", "initial.path missing"))?;
            let table = read_table(path)?;
            FieldState::from_fn(curve, n, |y| interpolate(&table, y))?
        }
    };
    Ok(state)
}

/// `y,value` rows with strictly increasing `y` covering `[0, 1]`; `#` starts a comment.
fn read_table(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let origin = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_owned(),
        source: e,
    })?;
    let mut rows: Vec<(f64, f64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || CliError::config(&origin, format!("line {}: expected `y,value`", i + 1));
        let (a, b) = line.split_once(',').ok_or_else(bad)?;
        let y: f64 = a.trim().parse().map_err(|_| bad())?;
        let v: f64 = b.trim().parse().map_err(|_| bad())?;
        if !(y.is_finite() && v.is_finite()) || rows.last().is_some_and(|&(p, _)| y <= p) {
            return Err(CliError::config(
                &origin,
                format!("line {}: y must be finite and strictly increasing", i + 1),
            ));
        }
        rows.push((y, v));
    }
    match (rows.first(), rows.last()) {
        (Some(&(a, _)), Some(&(b, _))) if a <= 0.0 && b >= 1.0 => Ok(rows),
        _ => Err(CliError::config(&origin, "table must cover y in [0, 1]")),
    }
}

fn interpolate(table: &[(f64, f64)], y: f64) -> f64 {
    let i = table.partition_point(|&(x, _)| x <= y).clamp(1, table.len() - 1);
    let ((x0, v0), (x1, v1)) = (table[i - 1], table[i]);
    v0 + (v1 - v0) * (y - x0) / (x1 - x0)
}

/// Runs the configured simulation without touching output files.
pub fn execute(cfg: &RunConfig) -> Result<ScenarioOutcome, CliError> {
    cfg.validate().map_err(|m| CliError::config("config", m))?;
    let curve = cfg.curve()?;
    let scheme = cfg.scheme_config();
    let initial = initial_state(cfg, curve)?;
    let times = sample_times(cfg);
    let (trace, closed_loop) = if cfg.controller.enabled {
        let params = cfg.kernel_params().map_err(|m| CliError::config("config", m))?;
        let run = run_closed_loop(initial, &scheme, &params, &times)?;
        let check = target_crosscheck(&run.snapshots, &params)?;
        let regularity = control_regularity_diagnostics(&run.controls, |t| {
            curve.value(t).unwrap_or(f64::NAN)
        })?;
        (
            run.trace,
            Some(ClosedLoopSummary {
                target_ratio: check.worst_ratio,
                regularity,
            }),
        )
    } else {
        (simulate(initial, &scheme, |_| 0.0, &times)?, None)
    };
    let fit = classify(&trace, cfg.curve.k)?;
    Ok(ScenarioOutcome {
        trace,
        fit,
        closed_loop,
    })
}

/// [`execute`], then writes the trace CSV and the summary named in the config.
pub fn run_scenario(cfg: &RunConfig) -> Result<ScenarioOutcome, CliError> {
    let outcome = execute(cfg)?;
    write_file(&cfg.output.trace, |w| write_trace(w, &outcome.trace))?;
    write_file(&cfg.output.summary, |w| write_summary(w, &outcome))?;
    Ok(outcome)
}

pub fn write_file<F>(path: &Path, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let io_err = |e| CliError::Io {
        path: path.to_owned(),
        source: e,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err)?;
    }
    let mut w = BufWriter::new(fs::File::create(path).map_err(io_err)?);
    f(&mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

/// Seventeen significant digits, so every value parses back to the same double.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trace(w: &mut dyn Write, trace: &DecayTrace) -> io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for s in &trace.samples {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_f64(s.t),
            fmt_f64(s.l),
            fmt_f64(s.norm),
            fmt_f64(s.energy),
            s.control.map(fmt_f64).unwrap_or_default()
        )?;
    }
    Ok(())
}

pub fn write_summary(w: &mut dyn Write, o: &ScenarioOutcome) -> io::Result<()> {
    let f = &o.fit;
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    writeln!(w, "regime={}", f.regime)?;
    writeln!(w, "rate={}", fmt_f64(f.rate))?;
    writeln!(w, "beta={}", opt(f.stretch_exponent))?;
    writeln!(w, "r_squared={}", fmt_f64(f.r_squared))?;
    writeln!(w, "window_start={}", fmt_f64(f.window.0))?;
    writeln!(w, "window_end={}", fmt_f64(f.window.1))?;
    writeln!(w, "boundary_monotone={}", !o.trace.non_monotone_boundary)?;
    for (name, m) in [
        ("exponential", &f.exponential),
        ("polynomial", &f.polynomial),
        ("stretched", &f.stretched),
    ] {
        writeln!(w, "{name}_rate={}", fmt_f64(m.rate))?;
        writeln!(w, "{name}_r_squared={}", fmt_f64(m.r_squared))?;
    }
    writeln!(w, "stretched_beta={}", opt(f.stretched.beta))?;
    if let Some(c) = &o.closed_loop {
        let r = &c.regularity;
        writeln!(w, "target_ratio={}", fmt_f64(c.target_ratio))?;
        writeln!(w, "control_l2={}", fmt_f64(r.u_l2))?;
        writeln!(w, "control_derivative_l2={}", fmt_f64(r.du_l2))?;
        writeln!(w, "weighted_control_derivative_l2={}", fmt_f64(r.weighted_du_l2))?;
        writeln!(w, "control_tail_share={}", fmt_f64(r.u_tail_share))?;
        writeln!(w, "control_derivative_tail_share={}", fmt_f64(r.du_tail_share))?;
    }
    Ok(())
}

/// Parses a summary file back into `key → value` pairs, in file order.
pub fn parse_summary(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_owned(), v.to_owned()))
        .collect()
}

/// One row of the kernel check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelCheckRow {
    pub lambda: f64,
    pub l: f64,
    pub p_max: f64,
    pub q_max: f64,
    pub bound: f64,
    pub residual_coarse: f64,
    pub residual_fine: f64,
}

impl KernelCheckRow {
    pub const HEADER: &'static str =
        "lambda,l,p_max,q_max,bound,bound_holds,residual_h64,residual_h128,residual_order";

    pub fn residual_order(&self) -> f64 {
        (self.residual_coarse / self.residual_fine).log2()
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            fmt_f64(self.lambda),
            fmt_f64(self.l),
            fmt_f64(self.p_max),
            fmt_f64(self.q_max),
            fmt_f64(self.bound),
            self.p_max <= self.bound && self.q_max <= self.bound,
            fmt_f64(self.residual_coarse),
            fmt_f64(self.residual_fine),
            fmt_f64(self.residual_order()),
        )
    }
}

/// Bound on the triangle of side `l`, plus the residual on the unit triangle at
/// resolutions 64 and 128.
pub fn kernel_check(params: &KernelParams, l: f64) -> Result<KernelCheckRow, CliError> {
    let b = kernel_bound_check(params, l)?;
    let coarse = kernel_pde_residual(params, 64)?;
    let fine = kernel_pde_residual(params, 128)?;
    Ok(KernelCheckRow {
        lambda: params.lambda,
        l,
        p_max: b.p_max,
        q_max: b.q_max,
        bound: b.bound,
        residual_coarse: coarse.p_residual.max(coarse.q_residual),
        residual_fine: fine.p_residual.max(fine.q_residual),
    })
}
