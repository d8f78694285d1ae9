//! Exact construction and verification of matrix bispectral Darboux
//! transformations.

pub mod airy;
pub mod error;
pub mod exact;
pub mod job;
pub mod latex;
pub mod linalg;
pub mod matpoly;
pub mod ore;
pub mod rank1;
pub mod report;

pub use error::{Error, Result};
