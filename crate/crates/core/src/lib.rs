//! Norms of elementary operators on matrix algebras, with numerical
//! certificates.

pub mod cli;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod haagerup;
pub mod jordan;
pub mod linalg;
pub mod optim;

pub use error::{Error, Result};
