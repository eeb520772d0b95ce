use thiserror::Error;

/// Errors raised by model construction, training and evaluation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("{0} class is empty")]
    EmptyClass(&'static str),

    #[error("dimension mismatch: expected {expected} score columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "training stopped after {iterations} iterations: complete or near-complete separation \
         between same-origin and different-origin training scores makes the unpenalized \
         weights diverge; retry with a ridge penalty (e.g. 0.001)"
    )]
    Separation { iterations: usize },

    #[error(
        "ill-conditioned training problem: score columns are collinear or constant; \
         retry with a ridge penalty"
    )]
    IllConditioned,

    #[error("training did not converge after {iterations} iterations (gradient max-norm {grad_norm:e})")]
    NonConvergence { iterations: usize, grad_norm: f64 },

    #[error("cross-validation fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures of the numerical optimizer, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Separation { .. } | Error::IllConditioned | Error::NonConvergence { .. } => true,
            Error::Fold { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}
