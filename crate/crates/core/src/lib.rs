//! Heat flow on a growing interval `(0, l(t))`: reference-coordinate solver,
//! closed-form oracle and decay envelopes, backstepping boundary feedback and
//! decay-regime classification.

pub mod analytic;
pub mod controller;
pub mod domain;
pub mod error;
pub mod kernel;
pub mod pdesolver;
pub mod quadrature;
pub mod stability;
pub mod tridiag;

pub use analytic::{AnalyticSolution, DecayEnvelope, EnvelopeKind};
pub use controller::{
    feedback, run_closed_loop, target_crosscheck, ClosedLoopRun, ControlRecord, ControlRegularity,
};
pub use domain::BoundaryCurve;
pub use error::{Error, Result};
pub use kernel::{forward_transform, inverse_transform, p_kernel, q_kernel, KernelParams};
pub use pdesolver::{
    simulate, Advection, DecayTrace, FieldState, SchemeConfig, Stepper, TraceSample,
};
pub use stability::{classify, classify_window, DecayFit, ModelFit, Regime};
