//! Gaussian processes with general variance functions and their fractal geometry.

pub mod dimension;
pub mod error;
pub mod fit;
pub mod hitting;
pub mod metric;
pub mod profiles;
pub mod quad;
pub mod runner;
pub mod sets;
pub mod simulation;
pub mod text;

pub use error::{Error, Result};
pub use profiles::VarianceProfile;
