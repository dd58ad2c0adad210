//! Beta-adic van der Corput and Halton sequences built on linear-recurrence
//! numeration systems, with tools to check their measure-theoretic properties
//! and to measure their uniformity.

pub mod cli;
pub mod error;
pub mod mapping;
pub mod measure;
pub mod numeration;
pub mod odometer;
pub mod precision;
pub mod sequence;

pub use error::{Error, Result};
