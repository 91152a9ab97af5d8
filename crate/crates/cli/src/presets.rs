//! Named configurations for the reference experiments.

use std::path::PathBuf;

use crate::config::{
    AdvectionKind, ControllerSection, CurveKind, CurveSection, InitialKind, InitialSection,
    OutputSection, RunConfig, SchemeSection,
};
use crate::error::CliError;

pub const PRESET_NAMES: [&str; 4] = ["thm11", "thm12", "closedloop", "kernelcheck"];

/// `λ` values and interval lengths swept by the `kernelcheck` preset.
pub const KERNEL_CHECK_LAMBDAS: [f64; 3] = [1.0, 6.5, 25.0];
pub const KERNEL_CHECK_LENGTHS: [f64; 3] = [1.0, 2.0, 5.0];

fn power_law(
    name: &str,
    alpha: f64,
    k: f64,
    dt: f64,
    t_final: f64,
    lambda: Option<f64>,
) -> RunConfig {
    RunConfig {
        curve: CurveSection {
            kind: CurveKind::PowerLaw,
            alpha: Some(alpha),
            k,
        },
        scheme: SchemeSection {
            n_grid: 400,
            dt,
            theta: 1.0,
            advection: AdvectionKind::Centered,
            t_final,
        },
        controller: ControllerSection {
            enabled: lambda.is_some(),
            lambda,
            ..ControllerSection::default()
        },
        initial: InitialSection {
            kind: InitialKind::Analytic,
            mode: None,
            path: None,
        },
        output: OutputSection {
            trace: PathBuf::from(format!("{name}_trace.csv")),
            summary: PathBuf::from(format!("{name}_summary.txt")),
            samples: 200,
            coarse_samples: 100,
        },
    }
}

pub fn preset(name: &str) -> Result<RunConfig, CliError> {
    let cfg = match name {
        "thm11" => power_law(name, 1.0, 0.5, 0.005, 100.0, None),
        "thm12" => power_law(name, 0.25, 1.0, 0.005, 200.0, None),
        "closedloop" => power_law(name, 1.0, 0.5, 1e-3, 10.0, Some(6.5)),
        // the closed-loop geometry; the kernel sweep itself uses the constants above
        "kernelcheck" => power_law(name, 1.0, 0.5, 1e-3, 10.0, Some(6.5)),
        _ => {
            return Err(CliError::config(
                "preset",
                format!(
                    "unknown preset {name:?}; available: {}",
                    PRESET_NAMES.join(", ")
                ),
            ))
        }
    };
    Ok(cfg)
}
