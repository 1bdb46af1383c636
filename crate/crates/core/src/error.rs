use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite evaluation at x = {x}")]
    Evaluation { x: f64 },

    #[error("non-finite evaluation at z = {z}")]
    ComplexEvaluation { z: Complex64 },

    #[error("evaluation too close to pole #{index} at {pole}")]
    PoleEvaluation { index: usize, pole: Complex64 },

    #[error("ill-posed least-squares problem: effective rank {rank} of {cols} columns")]
    IllPosed { rank: usize, cols: usize },

    #[error("t = {t} lies on the branch cut [-1, 1]")]
    BranchCut { t: Complex64 },

    #[error("pole placement failed, poles land inside the polygon at corners {corners:?}")]
    BasisConstruction { corners: Vec<usize> },

    #[error("z = {z} is not strictly inside the domain")]
    Domain { z: Complex64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
