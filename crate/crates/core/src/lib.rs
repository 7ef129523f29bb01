//! Exact billiard dynamics on the Koch snowflake prefractal tables.
//!
//! Geometry lives on the triangular lattice with arbitrary-precision
//! rational coordinates; see [`lattice`].

pub mod addressing;
pub mod boundary;
pub mod dynamics;
pub mod error;
pub mod formulas;
pub mod lattice;
pub mod ternary;

pub use error::{Error, Result};
pub use lattice::Rational;
