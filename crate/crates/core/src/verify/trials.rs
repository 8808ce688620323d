use crate::derandomize::derandomized_round;
use crate::error::{Error, Result};
use crate::instance::{covers, CoveringInstance};
use crate::rounding::{contract_round_fix_with, round_and_fix_with, RoundingOutcome, ThresholdMode};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TrialAlgorithm {
    /// Multiplicities are unconstrained; feasibility means `Az ≥ b`.
    RoundAndFix { alpha: f64, mode: ThresholdMode },
    /// `z ≤ d` and `(1+ε)Az ≥ b` (plain `Az ≥ b` at ε = 0).
    ContractRoundFix { alpha: f64, eps: f64 },
    Derandomized { alpha: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub trials: usize,
    pub baseline: f64,
    pub mean_ratio: f64,
    pub std_ratio: f64,
    pub max_ratio: f64,
    pub feasibility_failures: usize,
    /// Fraction of trials in which row i was left uncovered by the
    /// randomized step.
    pub row_failure_rates: Vec<f64>,
}

impl TrialStats {
    pub fn max_row_failure_rate(&self) -> f64 {
        self.row_failure_rates.iter().cloned().fold(0.0, f64::max)
    }
}

fn run_once(inst: &CoveringInstance, x: &[f64], algo: TrialAlgorithm, seed: u64) -> Result<RoundingOutcome> {
    match algo {
        TrialAlgorithm::RoundAndFix { alpha, mode } => round_and_fix_with(inst, x, alpha, mode, seed, None),
        TrialAlgorithm::ContractRoundFix { alpha, eps } => contract_round_fix_with(inst, x, alpha, eps, seed),
        TrialAlgorithm::Derandomized { alpha } => derandomized_round(inst, x, alpha).map(|(o, _)| o),
    }
}

fn feasible(inst: &CoveringInstance, z: &[u64], algo: TrialAlgorithm) -> bool {
    let (scale, capped) = match algo {
        TrialAlgorithm::RoundAndFix { .. } => (1.0, false),
        TrialAlgorithm::ContractRoundFix { eps, .. } => (1.0 + eps, true),
        TrialAlgorithm::Derandomized { .. } => (1.0, false),
    };
    (0..inst.m()).all(|i| covers(scale * inst.row_dot_int(i, z), inst.b()[i]))
        && (!capped || (0..inst.n()).all(|j| inst.d()[j].admits(z[j])))
}

/// Runs `trials` independent roundings with seeds `seed..seed+trials` and
/// reports cost ratios against `⟨c,x⟩`. Any infeasible output is an error.
pub fn trial_harness(
    inst: &CoveringInstance,
    x: &[f64],
    algo: TrialAlgorithm,
    trials: usize,
    seed: u64,
) -> Result<TrialStats> {
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    if x.len() != inst.n() {
        return Err(Error::Dimension { expected: inst.n(), got: x.len() });
    }
    let baseline = inst.cost(x);
    if !(baseline > 0.0) {
        return Err(Error::Domain(format!("baseline cost must be positive, got {baseline}")));
    }
    let outcomes: Vec<Result<RoundingOutcome>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_once(inst, x, algo, seed.wrapping_add(t)))
        .collect();

    let mut ratios = Vec::with_capacity(trials);
    let mut failures = vec![0usize; inst.m()];
    let mut infeasible = 0usize;
    for (t, out) in outcomes.into_iter().enumerate() {
        let out = out?;
        if !feasible(inst, &out.z, algo) {
            infeasible += 1;
            log::error!("trial {t} (seed {}) produced an infeasible vector", out.seed);
            continue;
        }
        for &i in &out.failed_rows {
            failures[i] += 1;
        }
        ratios.push(inst.cost_int(&out.z) / baseline);
    }
    if infeasible > 0 {
        return Err(Error::Certificate(format!("{infeasible} of {trials} trials were infeasible")));
    }
    let k = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / k;
    let var = if ratios.len() > 1 {
        ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    Ok(TrialStats {
        trials,
        baseline,
        mean_ratio: mean,
        std_ratio: var.sqrt(),
        max_ratio: ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        feasibility_failures: 0,
        row_failure_rates: failures.iter().map(|&f| f as f64 / trials as f64).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Mult;

    fn identity(k: usize) -> CoveringInstance {
        CoveringInstance::new(vec![1.0; k], vec![1.0; k], vec![Mult::Finite(1); k], (0..k).map(|i| (i, i, 1.0)))
            .unwrap()
    }

    #[test]
    fn derandomized_has_no_spread() {
        let inst = identity(5);
        let s = trial_harness(&inst, &[1.0; 5], TrialAlgorithm::Derandomized { alpha: 2.0 }, 20, 7).unwrap();
        assert_eq!(s.std_ratio, 0.0);
        assert_eq!(s.feasibility_failures, 0);
    }

    #[test]
    fn identity_rounds_to_ones() {
        let inst = identity(4);
        let algo = TrialAlgorithm::RoundAndFix { alpha: 1.0, mode: ThresholdMode::Median };
        let s = trial_harness(&inst, &[1.0; 4], algo, 50, 0).unwrap();
        assert_eq!((s.mean_ratio, s.max_ratio), (1.0, 1.0));
        assert!(s.row_failure_rates.iter().all(|&r| r == 0.0));
    }
}
