//! Bergman kernel method for conformal maps of Jordan domains, with bases
//! augmented by pole and corner singular functions.

pub mod analysis;
pub mod basis;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod kernel;
pub mod orthonormal;
pub mod quadrature;
pub mod reference;

pub use num_complex::Complex64;

pub use error::{Error, Result};
