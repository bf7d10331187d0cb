use thiserror::Error;

/// Errors shared across the numerical modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: best estimate {estimate}, error bound {bound} exceeds tolerance {tol}")]
    Accuracy {
        estimate: f64,
        bound: f64,
        tol: f64,
    },

    #[error("unsupported dimension n = {0} (supported: 1, 2, 3)")]
    UnsupportedDimension(usize),

    #[error("unsupported branch: {0}")]
    UnsupportedBranch(String),

    #[error("evaluation points coincide (Green function singularity)")]
    Singularity,

    #[error("iteration failed to converge: {0}")]
    Convergence(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("construction failed: {0}")]
    ConstructionFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
