//! Run configuration: flat sections of `key = value` lines.
//!
//! ```text
//! [curve]
//! kind = "power_law"
//! alpha = 1.0
//! k = 0.5
//!
//! [scheme]
//! n_grid = 400
//! dt = 0.005
//! theta = 1.0
//! advection = "centered"
//! t_final = 100.0
//!
//! [controller]
//! enabled = false
//!
//! [initial]
//! kind = "analytic"
//!
//! [output]
//! trace = "trace.csv"
//! summary = "summary.txt"
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use heatgrow_core::kernel::KernelParams;
use heatgrow_core::pdesolver::{Advection, SchemeConfig};
use heatgrow_core::BoundaryCurve;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    PowerLaw,
    LogGrowth,
    Sinusoidal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSection {
    pub kind: CurveKind,
    /// Required for `power_law`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Growth rate; required for `power_law` and used by the polynomial fit for every kind.
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdvectionKind {
    Centered,
    Upwind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    pub n_grid: usize,
    pub dt: f64,
    pub theta: f64,
    pub advection: AdvectionKind,
    pub t_final: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSection {
    pub enabled: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_terms")]
    pub max_terms: usize,
}

fn default_tol() -> f64 {
    KernelParams::DEFAULT_TOL
}

fn default_max_terms() -> usize {
    KernelParams::DEFAULT_MAX_TERMS
}

impl Default for ControllerSection {
    fn default() -> Self {
        Self {
            enabled: false,
            lambda: None,
            tol: default_tol(),
            max_terms: default_max_terms(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    /// Closed-form datum `sin(πy) e^{−kαy²/4}`.
    Analytic,
    /// `sin(mode · π y)`.
    Sine,
    /// Two-column `y,value` table, linearly interpolated onto the grid.
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub kind: InitialKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub trace: PathBuf,
    pub summary: PathBuf,
    /// Log-spaced samples over the fitting window `[T/5, T]`.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Additional uniformly spaced samples over `[0, T]`.
    #[serde(default = "default_coarse_samples")]
    pub coarse_samples: usize,
}

fn default_samples() -> usize {
    200
}

fn default_coarse_samples() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub curve: CurveSection,
    pub scheme: SchemeSection,
    #[serde(default)]
    pub controller: ControllerSection,
    pub initial: InitialSection,
    pub output: OutputSection,
}

impl RunConfig {
    /// Parses and validates. `origin` names the source in diagnostics.
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config {
            origin: origin.to_owned(),
            message: e.to_string(),
        })?;
        cfg.validate().map_err(|message| CliError::Config {
            origin: origin.to_owned(),
            message,
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_owned(),
            source: e,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("RunConfig serializes")
    }

    /// Checks every field against the invariants of the types it builds.
    pub fn validate(&self) -> Result<(), String> {
        self.curve().map_err(|e| format!("curve: {e}"))?;
        if !(self.curve.k > 0.0 && self.curve.k.is_finite()) {
            return Err(format!("curve.k: must be positive, got {}", self.curve.k));
        }
        self.scheme_config()
            .validate()
            .map_err(|e| format!("scheme: {e}"))?;
        if self.controller.enabled {
            self.kernel_params()?
                .validate()
                .map_err(|e| format!("controller: {e}"))?;
        }
        match self.initial.kind {
            InitialKind::Sine if self.initial.mode.is_none_or(|m| m == 0) => {
                return Err("initial.mode: required and positive for kind = \"sine\"".into())
            }
            InitialKind::Custom if self.initial.path.is_none() => {
                return Err("initial.path: required for kind = \"custom\"".into())
            }
            InitialKind::Analytic if self.curve.kind != CurveKind::PowerLaw => {
                return Err("initial.kind: \"analytic\" requires curve.kind = \"power_law\"".into())
            }
            _ => {}
        }
        if self.output.samples < 10 {
            return Err(format!(
                "output.samples: at least 10 needed for fitting, got {}",
                self.output.samples
            ));
        }
        Ok(())
    }

    pub fn curve(&self) -> heatgrow_core::Result<BoundaryCurve> {
        match self.curve.kind {
            CurveKind::PowerLaw => {
                let alpha = self.curve.alpha.ok_or_else(|| {
                    heatgrow_core::Error::InvalidParameter {
                        name: "alpha",
                        reason: "required for kind = \"power_law\"".into(),
                    }
                })?;
                BoundaryCurve::power_law(alpha, self.curve.k)
            }
            CurveKind::LogGrowth => Ok(BoundaryCurve::LogGrowth),
            CurveKind::Sinusoidal => Ok(BoundaryCurve::Sinusoidal),
        }
    }

    pub fn scheme_config(&self) -> SchemeConfig {
        let s = &self.scheme;
        SchemeConfig {
            n_grid: s.n_grid,
            dt: s.dt,
            theta: s.theta,
            advection: match s.advection {
                AdvectionKind::Centered => Advection::Centered,
                AdvectionKind::Upwind => Advection::Upwind,
            },
            t_final: s.t_final,
        }
    }

    /// Kernel parameters when the controller block names a `lambda`.
    pub fn kernel_params(&self) -> Result<KernelParams, String> {
        let lambda = self
            .controller
            .lambda
            .ok_or_else(|| "controller.lambda: required when controller.enabled = true".to_owned())?;
        Ok(KernelParams {
            lambda,
            tol: self.controller.tol,
            max_terms: self.controller.max_terms,
        })
    }
}
