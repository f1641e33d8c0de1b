//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("ill-posed deconvolution: {0}")]
    IllPosedDeconvolution(String),
    #[error("deconvolution residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },
    #[error("not a valid accelerant: {0}")]
    NotAValidAccelerant(String),
    #[error("non-contractive Weyl estimate |phi| = {phi_abs}: increase L or Im z")]
    NonContractiveEstimate { phi_abs: f64 },
    #[error("Moebius map pole: phi too close to 1 (|1 - phi| = {defect:.3e})")]
    MobiusPole { defect: f64 },
    #[error("spectral parameter within {distance:.3e} of a pole")]
    Pole { distance: f64 },
    #[error("truncation: integrand tail {tail:.3e} above tolerance, suggest a_max >= {suggested_a:.3e}")]
    Truncation { tail: f64, suggested_a: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid pseudo-exponential parameters: identity defect {defect:.3e}")]
    InvalidGbdtParams { defect: f64 },
    #[error("differentiation needs at least {needed} grid points, got {got}")]
    Differentiation { needed: usize, got: usize },
    #[error("singular matrix in {0}")]
    Singular(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable kind, used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::GridMismatch(_) => "grid-mismatch",
            Error::Parameter(_) => "parameter",
            Error::Domain(_) => "domain",
            Error::IllPosedDeconvolution(_) => "deconvolution",
            Error::ResidualTooLarge { .. } => "deconvolution",
            Error::NotAValidAccelerant(_) => "positivity",
            Error::NonContractiveEstimate { .. } => "weyl",
            Error::MobiusPole { .. } => "weyl",
            Error::Pole { .. } => "pole",
            Error::Truncation { .. } => "truncation",
            Error::Precondition(_) => "precondition",
            Error::InvalidGbdtParams { .. } => "parameter",
            Error::Differentiation { .. } => "parameter",
            Error::Singular(_) => "internal",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
