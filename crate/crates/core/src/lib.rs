//! Spectral structure of direct sums of self-adjoint quasi-differential
//! operators on multi-interval systems.

pub mod catalog;
pub mod error;
pub mod expansion;
pub mod ordered_rep;
pub mod quasidiff;
pub mod realset;
pub mod schema;
pub mod vectorop;

pub use error::{Error, Result};
