//! Numerical laboratory for sampling and interpolation in de Branges spaces
//! whose phase derivative is a doubling measure.

pub mod construct;
pub mod error;
pub mod hb;
pub mod kernels;
pub mod numerics;
pub mod regularity;
pub mod sequences;
pub mod suite;

pub use error::{Error, Result};
