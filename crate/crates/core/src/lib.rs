//! Approximation algorithms for covering integer programs.

pub mod derandomize;
pub mod error;
pub mod instance;
pub mod kclp;
pub mod knapsack;
pub mod rounding;
pub mod tails;
pub mod verify;

pub use error::{Error, Result};
