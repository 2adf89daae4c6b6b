use thiserror::Error;

/// Errors raised across the library. Each variant maps to one of the CLI
/// exit-code classes via [`Error::class`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrices do not commute: ||AB - BA||_F = {residual:.3e} exceeds {bound:.3e}")]
    NotCommuting { residual: f64, bound: f64 },

    #[error("degenerate spectrum: eigenvalues {0} and {1} are closer than the distinctness tolerance")]
    DegenerateSpectrum(String, String),

    #[error("no principal real logarithm: eigenvalue {0} lies on the closed negative real axis")]
    NoRealLogarithm(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("linear program infeasible: {0}")]
    Infeasible(String),

    #[error("linear program unbounded: {0}")]
    Unbounded(String),

    #[error("simplex iteration limit {limit} reached (best objective so far {best_objective:.6e})")]
    IterationLimit { limit: usize, best_objective: f64 },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("eigen-solver failure: {0}")]
    EigenSolver(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Coarse classification used for process exit codes and FFI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    Precondition,
    Numerical,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Parse => 2,
            ErrorClass::Precondition => 3,
            ErrorClass::Numerical => 4,
        }
    }
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse(_) | Error::Io(_) => ErrorClass::Parse,
            Error::InvalidInput(_)
            | Error::Dimension(_)
            | Error::NotCommuting { .. }
            | Error::DegenerateSpectrum(..)
            | Error::NoRealLogarithm(_)
            | Error::Precondition(_)
            | Error::Infeasible(_)
            | Error::Unbounded(_) => ErrorClass::Precondition,
            Error::IterationLimit { .. }
            | Error::Overflow(_)
            | Error::EigenSolver(_)
            | Error::Numerical(_) => ErrorClass::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
