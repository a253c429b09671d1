use thiserror::Error;

/// Errors produced by the toolkit's numerical routines and parsers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("charge-basis cutoff {cutoff} not converged: doubling it moves E1-E0 by {delta_ghz:.3e} GHz")]
    CutoffNotConverged { cutoff: usize, delta_ghz: f64 },

    #[error("root bracket failure on [{lo}, {hi}]: f(lo) = {f_lo:.6e}, f(hi) = {f_hi:.6e}")]
    BracketFailure { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("segment length {segment} exceeds trace length {trace}")]
    SegmentTooLong { segment: usize, trace: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("fit did not converge after {iterations} iterations (last residual norm {residual_norm:.6e})")]
    FitNotConverged {
        iterations: usize,
        residual_norm: f64,
        /// Residual norm per iteration, for diagnostics.
        history: Vec<f64>,
    },

    #[error("ODE step size underflow at t = {t:.6e} (x = {x:.6e}, step = {step:.6e})")]
    StepSizeUnderflow { t: f64, x: f64, step: f64 },

    #[error("non-positive values in recovery trace; subtract the steady-state background first")]
    NonPositiveTrace,

    #[error("impedance table [{table_lo:.3e}, {table_hi:.3e}] Hz does not cover the band [{band_lo:.3e}, {band_hi:.3e}] Hz")]
    BandNotCovered {
        table_lo: f64,
        table_hi: f64,
        band_lo: f64,
        band_hi: f64,
    },

    #[error("singular input: {0}")]
    SingularInput(String),

    #[error("csv parse error at line {line}: {message}")]
    CsvParse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
