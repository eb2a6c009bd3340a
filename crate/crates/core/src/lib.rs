//! Finite-instance computations for metric cotype on the discrete torus.

pub mod check;
pub mod cotype;
pub mod embeddings;
pub mod error;
pub mod field;
pub mod harmonic;
pub mod metric;
pub mod numeric;
pub mod search;
pub mod smoothing;

pub use error::{Error, Result};
