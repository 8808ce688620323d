use super::fix::round_and_fix_with;
use super::{AlphaChoice, Regime, RoundingOutcome, RowRepair, ThresholdMode};
use crate::error::{Error, Result};
use crate::instance::{CoveringInstance, Mult};

/// Rounds a point satisfying the knapsack-cover inequalities while keeping
/// `z ≤ d`. Columns with `αx_j ≥ d_j` are set to `d_j`; the rows still short
/// by more than `ε/(1+ε)` of their demand are rescaled to unit demand and
/// rounded with [`round_and_fix_with`] on the remaining columns.
pub fn contract_round_fix(
    inst: &CoveringInstance,
    x: &[f64],
    alpha: &AlphaChoice,
    eps: f64,
    seed: u64,
) -> Result<RoundingOutcome> {
    if eps == 0.0 && matches!(alpha.regime, Regime::L1 | Regime::L1Bmin | Regime::L1Small) {
        return Err(Error::Regime(
            "l1 regimes cannot keep z <= d without relaxing coverage; use eps > 0".into(),
        ));
    }
    contract_round_fix_with(inst, x, alpha.alpha, eps, seed)
}

pub fn contract_round_fix_with(
    inst: &CoveringInstance,
    x: &[f64],
    alpha: f64,
    eps: f64,
    seed: u64,
) -> Result<RoundingOutcome> {
    let n = inst.n();
    if x.len() != n {
        return Err(Error::Dimension { expected: n, got: x.len() });
    }
    if !(eps >= 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("eps must lie in [0, 1], got {eps}")));
    }
    let caps = inst.effective_caps();
    for j in 0..n {
        if !(x[j] >= 0.0) || !Mult::Finite(caps[j]).admits_f64(x[j]) {
            return Err(Error::Precondition(format!("x[{}] = {} is outside [0, d]", j + 1, x[j])));
        }
    }
    let in_s: Vec<bool> = (0..n).map(|j| alpha * x[j] >= caps[j] as f64 * (1.0 - 1e-12)).collect();
    let mut z: Vec<u64> = (0..n).map(|j| if in_s[j] { caps[j] } else { 0 }).collect();

    let keep = eps / (1.0 + eps);
    let mut rows = Vec::new();
    for i in 0..inst.m() {
        let bi = inst.b()[i];
        let r = bi - inst.row_dot_int(i, &z);
        if r > keep * bi && r > 1e-9 * bi.max(1.0) {
            rows.push((i, r));
        }
    }

    let cols: Vec<usize> = (0..n).filter(|&j| !in_s[j]).collect();
    let mut local = vec![usize::MAX; n];
    for (k, &j) in cols.iter().enumerate() {
        local[j] = k;
    }
    let mut entries = Vec::new();
    for (k, &(i, r)) in rows.iter().enumerate() {
        let mut mass = 0.0;
        for &(j, a) in inst.row(i) {
            if !in_s[j] {
                let a2 = (a / r).min(1.0);
                mass += a2 * x[j];
                entries.push((k, local[j], a2));
            }
        }
        if mass < 1.0 - 1e-9 {
            return Err(Error::Certificate(format!(
                "x violates the knapsack-cover inequality of row {} (residual coverage {mass})",
                i + 1
            )));
        }
    }

    let cost_fixed = inst.cost_int(&z);
    if rows.is_empty() {
        return Ok(RoundingOutcome {
            z,
            cost_round: cost_fixed,
            cost_fix: 0.0,
            fixed_rows: Vec::new(),
            failed_rows: Vec::new(),
            seed,
        });
    }
    let sub = CoveringInstance::new(
        cols.iter().map(|&j| inst.c()[j]).collect(),
        vec![1.0; rows.len()],
        cols.iter().map(|&j| Mult::Finite(caps[j])).collect(),
        entries,
    )?;
    let sub_x: Vec<f64> = cols.iter().map(|&j| x[j]).collect();
    let sub_caps: Vec<u64> = cols.iter().map(|&j| caps[j]).collect();
    let out = round_and_fix_with(&sub, &sub_x, alpha, ThresholdMode::Median, seed, Some(&sub_caps))?;
    for (k, &j) in cols.iter().enumerate() {
        z[j] = out.z[k];
    }
    if let Some(j) = (0..n).find(|&j| z[j] > caps[j]) {
        return Err(Error::Certificate(format!("column {} exceeds its multiplicity", j + 1)));
    }
    Ok(RoundingOutcome {
        z,
        cost_round: cost_fixed + out.cost_round,
        cost_fix: out.cost_fix,
        fixed_rows: out
            .fixed_rows
            .into_iter()
            .map(|r| RowRepair {
                row: rows[r.row].0,
                theta: r.theta,
                patch: r.patch.into_iter().map(|(k, v)| (cols[k], v)).collect(),
                fallback: r.fallback,
            })
            .collect(),
        failed_rows: out.failed_rows.into_iter().map(|k| rows[k].0).collect(),
        seed,
    })
}

/// `z′ = ⌈(1+ε)z⌉` coordinate-wise.
pub fn shift_to_multiplicity(z: &[u64], eps: f64) -> Vec<u64> {
    z.iter()
        .map(|&v| ((1.0 + eps) * v as f64 - 1e-9).ceil().max(0.0) as u64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::gen_gap_example;

    #[test]
    fn gap_example_contracts() {
        let inst = gen_gap_example(10.0).unwrap();
        for alpha in [1.0, 2.5, 7.0] {
            let out = contract_round_fix_with(&inst, &[1.0, 0.0], alpha, 0.0, 1).unwrap();
            assert_eq!(out.z, vec![1, 0]);
            assert_eq!(out.cost(), 1.0);
        }
    }

    #[test]
    fn x_equal_to_d_is_deterministic() {
        let inst = CoveringInstance::new(
            vec![1.0, 2.0],
            vec![3.0],
            vec![Mult::Finite(2), Mult::Finite(3)],
            vec![(0, 0, 1.0), (0, 1, 0.5)],
        )
        .unwrap();
        let out = contract_round_fix_with(&inst, &[2.0, 3.0], 1.0, 0.0, 9).unwrap();
        assert_eq!(out.z, vec![2, 3]);
        assert!(out.fixed_rows.is_empty());
    }

    #[test]
    fn kc_violation_detected() {
        let inst = gen_gap_example(10.0).unwrap();
        let e = contract_round_fix_with(&inst, &[0.1, 1.0], 2.0, 0.0, 1).unwrap_err();
        assert!(matches!(e, Error::Certificate(_)));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift_to_multiplicity(&[2, 3, 0], 0.5), vec![3, 5, 0]);
        assert_eq!(shift_to_multiplicity(&[10], 0.1), vec![11]);
    }

    #[test]
    fn l1_without_eps_rejected() {
        let inst = gen_gap_example(10.0).unwrap();
        let a = AlphaChoice::fixed(Regime::L1, 3.0, 0.0, 0.0).unwrap();
        assert!(matches!(contract_round_fix(&inst, &[1.0, 0.0], &a, 0.0, 1), Err(Error::Regime(_))));
    }
}
