use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("defective mode {index}: |v^T v| = {norm:e} is below the isotropy threshold")]
    DefectiveMode { index: usize, norm: f64 },

    #[error("degenerate mode {index}: decay rate {gamma:e} is not positive")]
    DegenerateMode { index: usize, gamma: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("no emission: detected intensity {0:e} is not positive")]
    NoEmission(f64),

    #[error("resonance singularity in mode {mode}: denominator {denominator:e}")]
    ResonanceSingularity { mode: usize, denominator: f64 },

    #[error("drive too strong: |omega0| = {omega0:e} exceeds guard {limit:e}")]
    DriveTooStrong { omega0: f64, limit: f64 },

    #[error("integration unstable at t = {time}: {reason} (dt = {dt:e})")]
    StepSize { time: f64, dt: f64, reason: String },

    #[error("steady state not reached after t = {time}: residual {residual:e}, slowest decay rate {slowest_gamma:e}")]
    Convergence { time: f64, residual: f64, slowest_gamma: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Config(_) | Error::Json(_) | Error::DriveTooStrong { .. } => 2,
            Error::Io(_) | Error::Csv(_) => 1,
            _ => 3,
        }
    }
}
