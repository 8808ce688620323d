use crate::error::{Error, Result};
use crate::instance::{covers, CoveringInstance};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowThreshold {
    pub row: usize,
    pub theta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ThresholdMode {
    Median,
    RankDelta(f64),
}

impl ThresholdMode {
    /// Fraction of the demand carried by coefficients at or above θ.
    pub fn upper_share(self) -> f64 {
        match self {
            ThresholdMode::Median => 0.5,
            ThresholdMode::RankDelta(d) => d,
        }
    }
}

/// Largest support coefficient θ with `Σ_{A_ij ≥ θ} A_ij x_j ≥ share·b_i`.
/// Then the coefficients at or below θ carry at least `(1 − share)·b_i`.
fn split_threshold(inst: &CoveringInstance, i: usize, x: &[f64], share: f64) -> Result<RowThreshold> {
    if x.len() != inst.n() {
        return Err(Error::Dimension { expected: inst.n(), got: x.len() });
    }
    let bi = inst.b()[i];
    let mut mass: Vec<(f64, f64)> = inst
        .row(i)
        .iter()
        .filter(|&&(j, _)| x[j] > 0.0)
        .map(|&(j, a)| (a, a * x[j]))
        .collect();
    let total: f64 = mass.iter().map(|e| e.1).sum();
    if !covers(total, bi) {
        return Err(Error::Precondition(format!(
            "row {} is covered to {total}, demand {bi}",
            i + 1
        )));
    }
    mass.sort_by(|a, b| b.0.total_cmp(&a.0));
    let target = share * bi;
    let mut acc = 0.0;
    let mut k = 0;
    while k < mass.len() {
        let a = mass[k].0;
        while k < mass.len() && mass[k].0 == a {
            acc += mass[k].1;
            k += 1;
        }
        if covers(acc, target) {
            return Ok(RowThreshold { row: i, theta: a });
        }
    }
    Ok(RowThreshold { row: i, theta: mass.last().map_or(0.0, |e| e.0) })
}

pub fn median_threshold(inst: &CoveringInstance, i: usize, x: &[f64]) -> Result<RowThreshold> {
    split_threshold(inst, i, x, 0.5)
}

pub fn rank_delta_threshold(inst: &CoveringInstance, i: usize, x: &[f64], delta: f64) -> Result<RowThreshold> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::Domain(format!("delta must lie in (0, 1/2], got {delta}")));
    }
    split_threshold(inst, i, x, delta)
}

pub(crate) fn threshold(inst: &CoveringInstance, i: usize, x: &[f64], mode: ThresholdMode) -> Result<RowThreshold> {
    split_threshold(inst, i, x, mode.upper_share())
}
