//! Randomized rounding with alteration.

mod alpha;
mod coins;
mod contract;
pub(crate) mod fix;
mod threshold;

pub use alpha::{choose_alpha, AlphaChoice, Regime, L1_FIX_CONSTANT};
pub use coins::Coins;
pub use contract::{contract_round_fix, contract_round_fix_with, shift_to_multiplicity};
pub use fix::{fix_row, fix_row_with, round_and_fix, round_and_fix_with};
pub use threshold::{median_threshold, rank_delta_threshold, RowThreshold, ThresholdMode};

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowRepair {
    pub row: usize,
    pub theta: f64,
    /// Sparse patch `(column, multiplicity)`.
    pub patch: Vec<(usize, u64)>,
    /// The patch is the whole row at its caps because the capped knapsack
    /// rounding could not certify a cheaper one.
    pub fallback: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundingOutcome {
    pub z: Vec<u64>,
    pub cost_round: f64,
    pub cost_fix: f64,
    pub fixed_rows: Vec<RowRepair>,
    /// Rows left uncovered by the randomized step.
    pub failed_rows: Vec<usize>,
    pub seed: u64,
}

impl RoundingOutcome {
    pub fn cost(&self) -> f64 {
        self.cost_round + self.cost_fix
    }
}
