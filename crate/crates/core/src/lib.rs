//! Exact rational Khovanov homology of link diagrams, with Lee homology, the
//! Rasmussen invariant and exact-sequence checks, aimed at torus links,
//! cables of knots and twisted Whitehead doubles.

pub mod cube;
pub mod diagrams;
pub mod error;
pub mod exactla;
pub mod homology;
pub mod lee;
pub mod skein;
pub mod tangle;
pub mod verify;

pub use error::{Error, Result};
