//! Brute-force oracles and Monte-Carlo harnesses.

mod chernoff;
mod exact;
mod separation;
mod trials;

pub use chernoff::{chernoff_check, normalized_bound, unnormalized_bound, unscaled_bound, ChernoffReport};
pub use exact::{exact_ilp, ExactSolution};
pub use separation::{kc_separation, SeparationReport};
pub use trials::{trial_harness, TrialAlgorithm, TrialStats};
