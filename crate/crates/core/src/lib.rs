//! Convolution t-norms on the lattice L of normal convex membership functions.

pub mod cli;
pub mod convolution;
pub mod error;
pub mod inference;
pub mod membership;
pub mod order;
pub mod scalar_ops;
pub mod verify;

pub use error::{Error, Result};
