use thiserror::Error;

/// Errors raised by the library. Each variant belongs to one [`ErrorCategory`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("mass distribution has an atom at the origin")]
    AtomAtOrigin,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("atom on the circle |z| = {radius}; try r = {suggestion}")]
    AtomOnCircle { radius: f64, suggestion: f64 },
    #[error("tail test diverges for every genus up to {p_max}")]
    GenusOverflow { p_max: u32 },
    #[error("proximate order fit failed: {0}")]
    FitFailure(String),
    #[error("{excluded} of {total} quadrature nodes hit -inf")]
    UnreliableQuadrature { excluded: usize, total: usize },
    #[error("{what} did not converge (residual {residual:e})")]
    NoConvergence { what: String, residual: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Input,
    Numeric,
    Infeasible,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidInput(_)
            | Error::AtomAtOrigin
            | Error::InsufficientData(_)
            | Error::Domain(_)
            | Error::Unsupported(_)
            | Error::AtomOnCircle { .. } => ErrorCategory::Input,
            Error::GenusOverflow { .. }
            | Error::FitFailure(_)
            | Error::UnreliableQuadrature { .. }
            | Error::NoConvergence { .. }
            | Error::Numerical(_) => ErrorCategory::Numeric,
            Error::Infeasible(_) => ErrorCategory::Infeasible,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
