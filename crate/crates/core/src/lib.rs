pub mod cli;
pub mod error;
pub mod group;
pub mod kernels;
pub mod linalg;
pub mod reconstruct;
pub mod relative;
pub mod report;
pub mod spectral;

pub use error::{Error, Result};
