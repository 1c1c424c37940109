//! Exact counting of primitive integer points near plane curves, and an
//! executable version of the approximate determinant method.

pub mod counting;
pub mod detmethod;
pub mod experiments;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod lattice;
pub mod poly;
pub mod thue;

pub use error::{Error, Result};
