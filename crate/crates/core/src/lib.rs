//! Exact and numerical engine for the twisted index pairing of the standard Podleś sphere.

pub mod algebra;
pub mod cocycles;
pub mod error;
pub mod ktheory;
pub mod peterweyl;
pub mod scalars;
pub mod spectral;
pub mod text;

pub use error::{Error, Result};
