use thiserror::Error;

/// Errors shared across the toolkit.
///
/// The CLI maps these onto exit codes: domain/estimation failures exit 1,
/// I/O failures exit 2, validation and format failures exit 3.
#[derive(Debug, Error)]
pub enum Error {
    /// Inputs outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally invalid data (bad parameters, unsorted tags, bad channel).
    #[error("validation error: {0}")]
    Validation(String),

    /// A byte stream that is not in the expected format.
    #[error("format error: {0}")]
    Format(String),

    /// A stream whose payload does not match what its header promises.
    #[error("corrupt stream: {0}")]
    Corrupt(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// An estimator that cannot produce a result from the given data.
    #[error("estimation error: {0}")]
    Estimation(String),

    /// A model fit that did not converge; carries the best residual seen.
    #[error("fit did not converge (best residual {residual})")]
    FitDiverged { residual: f64 },

    /// A quantity that is undefined for the given inputs (e.g. QBER with no
    /// sifted events, a g2 normalization with empty reference peaks).
    #[error("undefined result: {0}")]
    Undefined(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI surface.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Estimation(_) | Error::FitDiverged { .. } | Error::Undefined(_) => 1,
            Error::Io(_) => 2,
            Error::Validation(_) | Error::Format(_) | Error::Corrupt(_) => 3,
        }
    }
}
