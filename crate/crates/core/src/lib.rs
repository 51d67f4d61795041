//! Exact symbolic kernel for generalized complex geometry on a single
//! coordinate chart.
//!
//! Everything is linear algebra over `ℚ(i)(x_1, …, x_m)`, so every identity is
//! checked with zero tolerance: an expression either reduces to the zero
//! rational function or it does not.

pub mod algebroid;
pub mod builtins;
pub mod courant;
pub mod error;
pub mod gcs;
pub mod linalg;
pub mod multivector;
pub mod report;
pub mod scalars;
pub mod spinor;

pub use error::{Error, Result};
