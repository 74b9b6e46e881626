use std::path::PathBuf;

/// Errors raised by the solvers, the oracles and the experiment runner.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("inadmissible state {state:?}: {context}")]
    Inadmissible { state: Vec<f64>, context: String },

    #[error("no positive wave speed in field; nothing to advance")]
    ZeroWaveSpeed,

    #[error("quadrature node count mismatch: expected {expected}, got {got}")]
    NodeCountMismatch { expected: usize, got: usize },

    #[error("dual solve failed in cell {cell}, element {element} after {iterations} iterations (residual {residual:.3e}): {reason}")]
    DualSolve {
        cell: usize,
        element: usize,
        iterations: usize,
        residual: f64,
        reason: String,
    },

    #[error("Riemann problem generates vacuum")]
    Vacuum,

    #[error("config line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("config field `{field}`: {message}")]
    ConfigValidation { field: String, message: String },

    #[error("zero reference norm in relative error")]
    ZeroReferenceNorm,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn inadmissible<const N: usize>(
        state: &crate::euler::ConservedState<N>,
        context: impl Into<String>,
    ) -> Self {
        Error::Inadmissible {
            state: state.0.to_vec(),
            context: context.into(),
        }
    }
}
