use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid basis: {0}")]
    Basis(String),

    #[error("evaluation at {z} is outside the function's domain: {reason}")]
    Domain { z: Complex64, reason: &'static str },

    #[error("sample vectors do not match the node set ({got} values, {expected} nodes)")]
    NodeMismatch { got: usize, expected: usize },

    #[error(
        "numerical breakdown orthonormalizing member {index}: residual norm ratio {ratio:.3e}"
    )]
    Breakdown { index: usize, ratio: f64 },

    #[error("area quadrature did not converge after {refinements} refinements (last change {change:.3e})")]
    NonConvergence { refinements: usize, change: f64 },

    #[error("unknown reference case `{0}`")]
    UnknownCase(String),

    #[error("map normalization failed: {0}")]
    Normalization(String),

    #[error("point {0} lies inside the domain")]
    InsideDomain(Complex64),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
