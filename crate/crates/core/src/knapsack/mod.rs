//! Single-constraint covering (minimum knapsack) solvers.

mod exact;
pub(crate) mod fptas;
mod greedy;
mod round;

pub use exact::kc_exact;
pub use fptas::kc_fptas;
pub use greedy::kc_greedy;
pub use round::kc_round;

use crate::error::{Error, Result};
use crate::instance::Mult;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Relative coverage slack inside the knapsack solvers.
pub(crate) const KC_TOL: f64 = 1e-12;

pub(crate) fn kc_covers(coverage: f64, demand: f64) -> bool {
    coverage >= demand * (1.0 - KC_TOL)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KcItem {
    pub id: usize,
    pub cost: f64,
    pub size: f64,
    pub cap: Mult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnapsackCoverProblem {
    items: Vec<KcItem>,
    demand: f64,
}

impl KnapsackCoverProblem {
    pub fn new(items: Vec<KcItem>, demand: f64) -> Result<Self> {
        if !(demand > 0.0 && demand.is_finite()) {
            return Err(Error::Domain(format!("demand must be positive, got {demand}")));
        }
        for it in &items {
            if !(it.cost >= 0.0 && it.cost.is_finite()) {
                return Err(Error::Domain(format!("item {} has cost {}", it.id, it.cost)));
            }
            if !(it.size > 0.0 && it.size.is_finite()) {
                return Err(Error::Domain(format!("item {} has size {}", it.id, it.size)));
            }
            if it.cap == Mult::Finite(0) {
                return Err(Error::Domain(format!("item {} has cap 0", it.id)));
            }
        }
        let p = KnapsackCoverProblem { items, demand };
        if !p.items.iter().any(|it| it.cap.is_unbounded()) {
            let reach: f64 = p.items.iter().map(|it| it.size * it.cap.finite().unwrap() as f64).sum();
            if !kc_covers(reach, demand) {
                return Err(Error::Infeasible(format!(
                    "items reach {reach} but demand is {demand}"
                )));
            }
        }
        Ok(p)
    }

    pub fn items(&self) -> &[KcItem] {
        &self.items
    }

    pub fn demand(&self) -> f64 {
        self.demand
    }

    /// Largest multiplicity of item `k` that can matter: `min(cap, ⌈B/s⌉)`.
    pub fn useful_cap(&self, k: usize) -> u64 {
        let it = &self.items[k];
        let need = (self.demand / it.size * (1.0 - KC_TOL)).ceil().max(1.0) as u64;
        it.cap.min_with(need)
    }

    pub fn solution(&self, mult: Vec<u64>) -> KnapsackSolution {
        let cost = self.items.iter().zip(&mult).map(|(it, &k)| it.cost * k as f64).sum();
        let coverage = self.items.iter().zip(&mult).map(|(it, &k)| it.size * k as f64).sum();
        KnapsackSolution { mult, cost, coverage }
    }

    pub fn fractional_cost(&self, y: &[f64]) -> f64 {
        self.items.iter().zip(y).map(|(it, &v)| it.cost * v).sum()
    }

    /// Item positions in ascending cost/size ratio, ties by id.
    pub(crate) fn ratio_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.items.len()).collect();
        order.sort_by(|&a, &b| ratio_cmp(&self.items[a], &self.items[b]));
        order
    }
}

pub(crate) fn ratio_cmp(a: &KcItem, b: &KcItem) -> Ordering {
    (a.cost / a.size)
        .total_cmp(&(b.cost / b.size))
        .then(a.id.cmp(&b.id))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnapsackSolution {
    /// Multiplicity per item, in item order.
    pub mult: Vec<u64>,
    pub cost: f64,
    pub coverage: f64,
}

#[cfg(test)]
pub(crate) fn unit_items(costs: &[f64], sizes: &[f64], cap: Mult) -> Vec<KcItem> {
    costs
        .iter()
        .zip(sizes)
        .enumerate()
        .map(|(id, (&cost, &size))| KcItem { id, cost, size, cap })
        .collect()
}
