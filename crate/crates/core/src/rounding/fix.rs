use super::threshold::threshold;
use super::{AlphaChoice, Coins, Regime, RoundingOutcome, RowRepair, RowThreshold, ThresholdMode};
use crate::error::{Error, Result};
use crate::instance::{covers, CoveringInstance, Mult};
use crate::knapsack::{kc_round, KcItem, KnapsackCoverProblem};

/// Repairs row `i` on its own: scale the heavy part of `x` (coefficients at
/// least θ) so it covers the row, then round that knapsack cover.
pub fn fix_row(inst: &CoveringInstance, i: usize, x: &[f64], th: &RowThreshold) -> Result<Vec<(usize, u64)>> {
    fix_row_with(inst, i, x, th, ThresholdMode::Median, None)
}

/// `fix_row` with the heavy part scaled by `1/share` and optional caps.
pub fn fix_row_with(
    inst: &CoveringInstance,
    i: usize,
    x: &[f64],
    th: &RowThreshold,
    mode: ThresholdMode,
    caps: Option<&[u64]>,
) -> Result<Vec<(usize, u64)>> {
    let scale = 1.0 / mode.upper_share();
    let heavy: Vec<(usize, f64)> = inst
        .row(i)
        .iter()
        .filter(|&&(j, a)| a >= th.theta && x[j] > 0.0)
        .cloned()
        .collect();
    let items = heavy
        .iter()
        .map(|&(j, a)| KcItem {
            id: j,
            cost: inst.c()[j],
            size: a,
            cap: caps.map_or(Mult::Unbounded, |c| Mult::Finite(c[j])),
        })
        .collect();
    let y: Vec<f64> = heavy.iter().map(|&(j, _)| scale * x[j]).collect();
    let p = KnapsackCoverProblem::new(items, inst.b()[i])?;
    let sol = kc_round(&p, &y)?;
    Ok(heavy
        .iter()
        .zip(&sol.mult)
        .filter(|(_, &k)| k > 0)
        .map(|(&(j, _), &k)| (j, k))
        .collect())
}

pub fn round_and_fix(inst: &CoveringInstance, x: &[f64], alpha: &AlphaChoice, seed: u64) -> Result<RoundingOutcome> {
    let mode = match alpha.regime {
        Regime::L1Small => ThresholdMode::RankDelta(alpha.delta_small),
        _ => ThresholdMode::Median,
    };
    round_and_fix_with(inst, x, alpha.alpha, mode, seed, None)
}

pub(crate) fn check_fractional(inst: &CoveringInstance, x: &[f64]) -> Result<()> {
    if x.len() != inst.n() {
        return Err(Error::Dimension { expected: inst.n(), got: x.len() });
    }
    if let Some(j) = x.iter().position(|&v| !(v >= 0.0 && v.is_finite())) {
        return Err(Error::Domain(format!("x[{}] = {} is not a nonnegative number", j + 1, x[j])));
    }
    for i in 0..inst.m() {
        let cov = inst.row_dot(i, x);
        if !covers(cov, inst.b()[i]) {
            return Err(Error::Precondition(format!(
                "row {} is covered to {cov}, demand {}",
                i + 1,
                inst.b()[i]
            )));
        }
    }
    Ok(())
}

/// Repairs every row that `z` leaves uncovered and merges the patches by
/// coordinate-wise max. Repairs look only at `x`, not at what `z` already
/// contributes.
pub(crate) fn alter(
    inst: &CoveringInstance,
    x: &[f64],
    z: &mut [u64],
    mode: ThresholdMode,
    caps: Option<&[u64]>,
) -> Result<(Vec<usize>, Vec<RowRepair>)> {
    let failed: Vec<usize> = (0..inst.m())
        .filter(|&i| !covers(inst.row_dot_int(i, z), inst.b()[i]))
        .collect();
    let mut repairs = Vec::with_capacity(failed.len());
    for &i in &failed {
        let th = threshold(inst, i, x, mode)?;
        let (patch, fallback) = match fix_row_with(inst, i, x, &th, mode, caps) {
            Ok(p) => (p, false),
            Err(e @ (Error::Certificate(_) | Error::Precondition(_) | Error::Infeasible(_))) => {
                let Some(caps) = caps else { return Err(e) };
                (inst.row(i).iter().map(|&(j, _)| (j, caps[j])).collect(), true)
            }
            Err(e) => return Err(e),
        };
        for &(j, k) in &patch {
            z[j] = z[j].max(k);
        }
        repairs.push(RowRepair { row: i, theta: th.theta, patch, fallback });
    }
    Ok((failed, repairs))
}

pub fn round_and_fix_with(
    inst: &CoveringInstance,
    x: &[f64],
    alpha: f64,
    mode: ThresholdMode,
    seed: u64,
    caps: Option<&[u64]>,
) -> Result<RoundingOutcome> {
    check_fractional(inst, x)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let mut coins = Coins::new(seed, 0);
    let mut z: Vec<u64> = x
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let s = alpha * v;
            let base = s.floor();
            base as u64 + coins.flip(j, s - base) as u64
        })
        .collect();
    let cost_round = inst.cost_int(&z);
    let (failed_rows, fixed_rows) = alter(inst, x, &mut z, mode, caps)?;
    let report = inst.check_cover(&z)?;
    if !report.violated_rows.is_empty() {
        return Err(Error::Certificate(format!(
            "alteration left rows {:?} uncovered",
            report.violated_rows.iter().map(|r| r.row + 1).collect::<Vec<_>>()
        )));
    }
    Ok(RoundingOutcome {
        cost_fix: inst.cost_int(&z) - cost_round,
        z,
        cost_round,
        fixed_rows,
        failed_rows,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_gap_example, NormMode};
    use crate::rounding::median_threshold;

    #[test]
    fn single_coefficient_patch() {
        let inst = CoveringInstance::new(vec![3.0], vec![1.0], vec![Mult::Unbounded], vec![(0, 0, 1.0)]).unwrap();
        let th = median_threshold(&inst, 0, &[1.0]).unwrap();
        assert_eq!(fix_row(&inst, 0, &[1.0], &th).unwrap(), vec![(0, 1)]);
    }

    #[test]
    fn heavy_support_patch() {
        let inst = CoveringInstance::new(
            vec![1.0, 2.0, 1.5],
            vec![1.0],
            vec![Mult::Unbounded; 3],
            vec![(0, 0, 0.2), (0, 1, 0.9), (0, 2, 0.5)],
        )
        .unwrap();
        let x = [2.0, 0.5, 0.6];
        let th = median_threshold(&inst, 0, &x).unwrap();
        let patch = fix_row(&inst, 0, &x, &th).unwrap();
        assert!(patch.iter().all(|&(j, _)| j == 1 || j == 2));
        let cov: f64 = patch.iter().map(|&(j, k)| inst.row(0).iter().find(|e| e.0 == j).unwrap().1 * k as f64).sum();
        assert!(cov >= 1.0);
        let cost: f64 = patch.iter().map(|&(j, k)| inst.c()[j] * k as f64).sum();
        let bound = 4.0 / th.theta * inst.row(0).iter().map(|&(j, a)| inst.c()[j] * a * x[j]).sum::<f64>();
        assert!(cost <= bound);
        for &(j, k) in &patch {
            assert!(k as f64 <= (4.0 * x[j]).ceil());
        }
    }

    #[test]
    fn integral_x_unchanged() {
        let inst = gen_gap_example(10.0).unwrap().normalize(NormMode::Unit).unwrap();
        let out = round_and_fix_with(&inst, &[1.0, 0.0], 1.0, ThresholdMode::Median, 3, None).unwrap();
        assert_eq!(out.z, vec![1, 0]);
        assert_eq!(out.cost_fix, 0.0);
    }

    #[test]
    fn gap_point_always_fixed() {
        let inst = gen_gap_example(10.0).unwrap().normalize(NormMode::Unit).unwrap();
        for seed in 0..64 {
            let out = round_and_fix_with(&inst, &[0.1, 1.0], 4.0, ThresholdMode::Median, seed, None).unwrap();
            assert!(inst.check_cover(&out.z).unwrap().violated_rows.is_empty());
        }
    }
}
