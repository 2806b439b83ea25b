//! Log-periodic power-law (LPPL) fitting with sloppiness analysis.
//!
//! The crate fits
//!
//! ```text
//! f(t) = A + B (t_c - t)^alpha [1 + C cos(omega ln(t_c - t) + phi)]
//! ```
//!
//! to daily price series by damped least squares over the nonlinear
//! parameters (the linear ones are projected out exactly at every step),
//! quantifies how ill-determined the result is through the eigenvalue
//! spectrum of the objective's Hessian, and measures how the crash-time
//! estimate t_c sharpens as a window expands toward it via a seeded,
//! bit-reproducible Monte Carlo over AR(1)-noise replicas.
//!
//! ```
//! use lppl::{eval_lppl, lm_fit, FitConfig, LpplParams, Nonlinear, PriceSeries, Scale};
//!
//! let truth = LpplParams {
//!     a: 100.0, b: -10.0, c: 0.05, t_c: 90.0, alpha: 0.5, omega: 7.0, phi: 1.0,
//! };
//! let values: Vec<f64> = (0..80).map(|t| eval_lppl(&truth, t as f64).unwrap()).collect();
//! let series = PriceSeries::new(0, values, Scale::Raw).unwrap();
//! let fit = lm_fit(&series, Nonlinear::of(&truth), &FitConfig::default()).unwrap();
//! assert!(fit.converged && fit.s < 1e-12);
//! ```
//!
//! All numeric types are generic over the scalar (`f64` by default through
//! type-parameter defaults; `*32` aliases cover `f32`).

pub mod error;
pub mod fitter;
pub mod linalg;
pub mod mc;
pub mod model;
pub mod num;
pub mod objective;
pub mod rng;
pub mod sloppy;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use fitter::{lm_fit, lm_fit_traced, multistart_fit, FitConfig, FitResult, InitRanges};
pub use mc::{
    confidence_window, default_window_ends, gaussianity_check, run_mc, run_mc_with_estimates,
    GaussianityCheck, McConfig, McRow, McSummary,
};
pub use model::{
    distance_to_critical, eval_lppl, eval_power_law, grad_lppl, LpplParams, ModelKind, Nonlinear,
    PriceSeries, Scale, NONLINEAR_IDX, PARAM_NAMES,
};
pub use num::Scalar;
pub use objective::{HessianMatrix, LinearFit, Objective};
pub use rng::CounterRng;
pub use sloppy::{
    eigendecompose, rolling_track, sloppiness_report, EigenTrack, SloppinessReport,
    MAJOR_COMPONENT_THRESHOLD,
};
pub use synth::{ar1_generate, make_series, Ar1Config, SynthSpec};

/// Single-precision aliases for the headline types.
pub type LpplParams32 = model::LpplParams<f32>;
pub type Nonlinear32 = model::Nonlinear<f32>;
pub type PriceSeries32 = model::PriceSeries<f32>;
pub type FitResult32 = fitter::FitResult<f32>;
pub type SloppinessReport32 = sloppy::SloppinessReport<f32>;
pub type SynthSpec32 = synth::SynthSpec<f32>;
pub type McSummary32 = mc::McSummary<f32>;
