use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not skew-symmetric (‖S + Sᵀ‖ = {asymmetry:e})")]
    NotSkew { asymmetry: f64 },

    #[error("rotation angle {angle} rad is too close to π")]
    NearPi { angle: f64 },

    #[error("not a rotation matrix: {0}")]
    NotARotation(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("invalid initial condition: {0}")]
    InvalidInitialCondition(String),

    #[error("string element{} has collapsed (length {length:e} m)", element_label(*.element))]
    CollapsedElement { element: Option<usize>, length: f64 },

    #[error("mass matrix is not positive definite")]
    MassMatrixNotPositiveDefinite,

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NewtonNotConverged { iterations: usize, residual: f64 },

    #[error("fixed-point iteration did not converge after {iterations} iterations (last change {change:e})")]
    FixedPointNotConverged { iterations: usize, change: f64 },

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Self {
        match self {
            e @ Error::AtStep { .. } => e,
            e => Error::AtStep {
                step,
                source: Box::new(e),
            },
        }
    }

    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}

fn element_label(element: Option<usize>) -> String {
    element.map(|e| format!(" {e}")).unwrap_or_default()
}
