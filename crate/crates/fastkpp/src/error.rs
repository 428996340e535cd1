use thiserror::Error;

/// Errors produced by the laboratory. The CLI maps these onto exit codes:
/// config-class errors exit 2, numeric-class errors exit 3; audit failures
/// are reported via `OrderingReport` values, not errors, and exit 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("operation requires the {required} regime, got {actual}")]
    Regime { required: &'static str, actual: String },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("time step underflow at t = {t:.6e} (dt = {dt:.3e})")]
    Stiffness { t: f64, dt: f64 },

    #[error("no admissible delta: sigma = {sigma} too close to sigma* = {sigma_star}")]
    Schedule { sigma: f64, sigma_star: f64 },

    #[error("barrier certificate failed: C_r0({xi:.6e}) = {value:.6e}")]
    FeasibilityViolation { xi: f64, value: f64 },

    #[error("not enough samples in the fit window: need {need}, have {have}")]
    InsufficientSamples { need: usize, have: usize },

    #[error("shooting classification inconclusive at c = {c} after {steps} steps")]
    Inconclusive { c: f64, steps: u64 },

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code for the CLI: 2 for config-class errors, 3 for numeric ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ParameterDomain(_)
            | Error::Regime { .. }
            | Error::Domain(_)
            | Error::Config { .. }
            | Error::Precondition(_)
            | Error::Schedule { .. } => 2,
            _ => 3,
        }
    }
}
