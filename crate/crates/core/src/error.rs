use thiserror::Error;

/// Errors raised by the simulation and solver routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("truncation leakage {leakage:.3e} exceeds tolerance {tol:.3e} at n_max = {n_max}")]
    Truncation { leakage: f64, tol: f64, n_max: usize },

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("degenerate quantity: {0}")]
    Degenerate(String),

    #[error("found {found} roots below the scan ceiling but band {wanted} was requested (k = {k:.6e} 1/m)")]
    RootCount { found: usize, wanted: usize, k: f64 },

    #[error("band edge: {0}")]
    BandEdge(String),

    #[error("degenerate null space: two smallest singular values {smallest:.3e} and {second:.3e}")]
    DegenerateNullspace { smallest: f64, second: f64 },

    #[error("quadrature refinement changed the result by {change:.3e} (relative)")]
    Quadrature { change: f64 },

    #[error("empty frequency window: {0}")]
    EmptyWindow(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// `true` for errors caused by bad input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::InvalidParameter { .. } | Error::UnknownPreset(_))
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::Truncation { .. } => "truncation",
            Error::Convergence(_) => "convergence",
            Error::Degenerate(_) => "degenerate",
            Error::RootCount { .. } => "root_count",
            Error::BandEdge(_) => "band_edge",
            Error::DegenerateNullspace { .. } => "degenerate_nullspace",
            Error::Quadrature { .. } => "quadrature",
            Error::EmptyWindow(_) => "empty_window",
            Error::UnknownPreset(_) => "unknown_preset",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
