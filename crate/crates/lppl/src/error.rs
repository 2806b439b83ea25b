//! Error vocabulary shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The model was evaluated at or past the critical time.
    #[error("t = {t} is not before the critical time t_c = {t_c}")]
    Domain { t: f64, t_c: f64 },

    /// The fit window leaves no degrees of freedom.
    #[error("window [{t0}, {t1}] has no degrees of freedom for {n} parameters")]
    DegenerateWindow { t0: i64, t1: i64, n: usize },

    /// The linear normal equations are too ill-conditioned to solve.
    #[error("design condition {cond:e} exceeds the solvable limit")]
    DegenerateDesign { cond: f64 },

    /// |B| is numerically zero, so C = C2/B cannot be recovered.
    #[error("B = {b:e} is numerically zero; C is undefined")]
    BZero { b: f64 },

    /// An optimizer start violated a precondition.
    #[error("invalid initial point: {0}")]
    InitInvalid(String),

    /// Eigendecomposition input was not symmetric.
    #[error("asymmetric at ({i}, {j}): |a_ij - a_ji| = {delta:e}")]
    NotSymmetric { i: usize, j: usize, delta: f64 },

    /// Jacobi rotation sweeps hit their limit without converging.
    #[error("eigen iteration stalled")]
    EigenStalled,

    /// Every fit at a window end failed; nothing to summarize.
    #[error("no usable fits at window end {window_end}")]
    SummaryEmpty { window_end: i64 },

    /// A statistic was requested on too small a sample.
    #[error("{got} samples where at least {need} are required")]
    TooFewSamples { got: usize, need: usize },

    /// A configuration value is out of range or inconsistent.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
