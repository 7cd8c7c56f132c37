pub mod distribution;
pub mod error;
pub mod experiments;
pub mod fusion;
pub mod lie;
pub mod linalg;
pub mod propagation;
pub mod rng;
pub mod sde;

pub use error::{Error, Result};
