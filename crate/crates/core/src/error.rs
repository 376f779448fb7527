use thiserror::Error;

use crate::geometry::Vec3;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Invalid or inconsistent configuration (unknown names, bad parameters,
    /// missing optional model components).
    #[error("configuration error: {0}")]
    Config(String),

    /// A field evaluator was called at a point outside its domain.
    #[error("field evaluated outside its domain at {point}: {reason}")]
    Domain { point: Vec3, reason: String },

    /// A quadrature node hit a domain error.
    #[error("quadrature node {node}: {source}")]
    AtNode {
        node: usize,
        #[source]
        source: Box<Error>,
    },

    /// Fixed-point iteration did not reach the requested tolerance.
    #[error("fixed-point iteration diverged after {iters} iterations (residual {residual:e})")]
    Divergence { iters: usize, residual: f64 },

    /// Two records could not be compared at a common time.
    #[error("time mismatch: record ends at {record_t}, reference at {reference_t}")]
    Alignment { record_t: f64, reference_t: f64 },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Strips node annotations down to the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtNode { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_divergence(&self) -> bool {
        matches!(self.root(), Error::Divergence { .. })
    }

    pub fn is_config(&self) -> bool {
        matches!(self.root(), Error::Config(_))
    }
}
