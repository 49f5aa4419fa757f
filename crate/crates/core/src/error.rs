use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("non-finite value in field `{0}`")]
    NonFinite(String),

    #[error("field support reaches the boundary band (amplitude {amplitude:.3e} relative to peak)")]
    SupportTouchesBoundary { amplitude: f64 },

    #[error("field support escapes the destination box (amplitude {amplitude:.3e} relative to peak)")]
    SupportEscapes { amplitude: f64 },

    #[error("field support exceeds radius {radius} (amplitude {amplitude:.3e} relative to peak)")]
    SupportExceeds { radius: f64, amplitude: f64 },

    #[error("Poisson source has nonzero mean {mean:.3e} (L2 norm {norm:.3e})")]
    NonzeroMean { mean: f64, norm: f64 },

    #[error("insufficient padding: source amplitude {amplitude:.3e} in the guard band")]
    InsufficientPadding { amplitude: f64 },

    #[error("CFL violation at t = {t}: dt = {dt:.4e} exceeds limit {limit:.4e}")]
    CflViolation { t: f64, dt: f64, limit: f64 },

    #[error("A0 is not positive definite at t = {t} (min pivot {min_eigen:.3e})")]
    NotPositiveDefinite { t: f64, min_eigen: f64 },

    #[error("NaN detected in the solution at t = {0}")]
    NanDetected(f64),

    #[error("time {t} is not before the shock time {t_shock}")]
    BeyondShock { t: f64, t_shock: f64 },

    #[error("Newton iteration failed to converge at x = {0}")]
    NewtonFailure(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index constraint violated: {0}")]
    ConstraintViolated(String),

    #[error("negative value {value:.3e} in `{field}`")]
    Negative { field: &'static str, value: f64 },

    #[error("background collapsed (R = {r:.3e}) at t = {t}")]
    Collapse { t: f64, r: f64 },

    #[error("energy inequality unsatisfiable at t = {0}")]
    Unsatisfiable(f64),

    #[error("solve aborted: {0}")]
    Aborted(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
