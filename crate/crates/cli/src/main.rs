use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use heatgrow_cli::presets::{preset, KERNEL_CHECK_LAMBDAS, KERNEL_CHECK_LENGTHS};
use heatgrow_cli::scenario::{kernel_check, run_scenario, write_file, KernelCheckRow};
use heatgrow_cli::sweep::{sweep, Grid};
use heatgrow_cli::{CliError, RunConfig};
use heatgrow_core::kernel::KernelParams;

/// Heat flow on a growing interval: open- and closed-loop runs with decay fits.
#[derive(Parser)]
#[command(name = "heatgrow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run { config: PathBuf },
    /// Run a named preset (thm11, thm12, closedloop, kernelcheck).
    Preset {
        name: String,
        /// Directory receiving the preset's config and outputs.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Sweep a base config over a parameter grid, e.g. `alpha=0.25,0.5,1;k=1`.
    Sweep {
        config: PathBuf,
        #[arg(long, default_value = "")]
        grid: String,
        /// Table destination.
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
    },
    /// Kernel bound on the triangle of side `l` and PDE residual at `lambda`.
    KernelCheck {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        l: f64,
    },
}

fn print_summary(path: &Path) {
    if let Ok(text) = std::fs::read_to_string(path) {
        print!("{text}");
    }
}

fn rebase(cfg: &mut RunConfig, dir: &Path) {
    cfg.output.trace = dir.join(&cfg.output.trace);
    cfg.output.summary = dir.join(&cfg.output.summary);
}

fn kernel_table(rows: &[KernelCheckRow]) -> String {
    let mut s = format!("{}\n", KernelCheckRow::HEADER);
    for r in rows {
        s.push_str(&r.csv());
        s.push('\n');
    }
    s
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            run_scenario(&cfg)?;
            print_summary(&cfg.output.summary);
        }
        Command::Preset { name, out } => {
            let mut cfg = preset(&name)?;
            write_file(&out.join(format!("{name}.toml")), |w| {
                w.write_all(cfg.to_text().as_bytes())
            })?;
            if name == "kernelcheck" {
                let mut rows = Vec::new();
                for lambda in KERNEL_CHECK_LAMBDAS {
                    let params = KernelParams::new(lambda)?;
                    for l in KERNEL_CHECK_LENGTHS {
                        rows.push(kernel_check(&params, l)?);
                    }
                }
                let table = kernel_table(&rows);
                write_file(&out.join("kernelcheck.csv"), |w| w.write_all(table.as_bytes()))?;
                print!("{table}");
            } else {
                rebase(&mut cfg, &out);
                run_scenario(&cfg)?;
                print_summary(&cfg.output.summary);
            }
        }
        Command::Sweep { config, grid, out } => {
            let cfg = RunConfig::load(&config)?;
            let grid = Grid::parse(&grid)?;
            let table = sweep(&cfg, &grid)?;
            write_file(&out, |w| w.write_all(table.as_bytes()))?;
            print!("{table}");
        }
        Command::KernelCheck { lambda, l } => {
            let params = KernelParams::new(lambda)?;
            if !(l > 0.0 && l.is_finite()) {
                return Err(CliError::config("kernel-check", format!("--l must be positive, got {l}")));
            }
            print!("{}", kernel_table(&[kernel_check(&params, l)?]));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
