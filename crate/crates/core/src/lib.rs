//! Weighted ℓ1 sparse recovery with prior support information, together with
//! a local (prior-support restricted) recovery guarantee and five global
//! guarantees it is compared against.

pub mod bounds;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod matrix;
pub mod solver;
pub mod support;

pub use error::{Error, Result};
