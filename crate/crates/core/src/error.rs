use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:e}, threshold {threshold:e})")]
    NonPositiveDefinite { min_eigenvalue: f64, threshold: f64 },

    #[error("matrix is not symmetric (residual {residual:e})")]
    SymmetryViolation { residual: f64 },

    #[error("unknown tableau `{0}`")]
    UnknownTableau(String),

    #[error("invalid tableau: {0}")]
    InvalidTableau(String),

    #[error("stage norm {norm} exceeds the admissible limit {limit}; reduce the step size")]
    StepTooLarge { norm: f64, limit: f64 },

    #[error("geodesic midpoint undefined (|E + y| = {0:e})")]
    MidpointUndefined(f64),

    #[error("tangent vector is not spacelike (<v,v> = {0:e})")]
    NonSpacelikeTangent(f64),

    #[error("vector field leaves the tangent space (normal component {0:e})")]
    NonTangentField(f64),

    #[error("fixed-point stage iteration did not converge after {iterations} iterations (last change {change:e})")]
    FixedPointDivergence { iterations: usize, change: f64 },

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Self {
        Error::AtStep {
            step,
            source: Box::new(self),
        }
    }

    /// The underlying error with any step context removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            other => other,
        }
    }
}
