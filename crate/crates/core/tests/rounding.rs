mod common;

use cip_core::instance::{CoveringInstance, Mult, NormMode};
use cip_core::rounding::{
    choose_alpha, contract_round_fix, fix_row, median_threshold, rank_delta_threshold, round_and_fix,
    round_and_fix_with, shift_to_multiplicity, AlphaChoice, Regime, ThresholdMode,
};
use proptest::prelude::*;

fn one_row(coeffs: &[f64]) -> CoveringInstance {
    let n = coeffs.len();
    CoveringInstance::new(
        vec![1.0; n],
        vec![1.0],
        vec![Mult::Unbounded; n],
        coeffs.iter().enumerate().map(|(j, &a)| (0, j, a)),
    )
    .unwrap()
}

fn l0(inst: &CoveringInstance) -> AlphaChoice {
    let mut stats = inst.normalize(NormMode::Unit).unwrap().sparsity_stats();
    stats.delta0 = stats.delta0.max(2);
    choose_alpha(&stats, Regime::L0, 0.0).unwrap()
}

#[test]
fn median_threshold_example() {
    let inst = one_row(&[0.2, 0.9, 0.5]);
    assert_eq!(median_threshold(&inst, 0, &[2.0, 0.5, 0.6]).unwrap().theta, 0.5);
}

#[test]
fn rank_threshold_example() {
    let inst = one_row(&[0.1, 0.1, 0.8]);
    let th = rank_delta_threshold(&inst, 0, &[5.0, 5.0, 0.1], 0.05).unwrap();
    assert_eq!(th.theta, 0.8);
}

#[test]
fn shift_examples() {
    assert_eq!(shift_to_multiplicity(&[1, 2, 0], 0.5), vec![2, 3, 0]);
    assert_eq!(shift_to_multiplicity(&[4, 3], 0.0), vec![4, 3]);
    assert_eq!(shift_to_multiplicity(&[10], 0.1), vec![11]);
}

#[test]
fn l1_regimes_need_slack_to_respect_caps() {
    let inst = common::general(3);
    let x: Vec<f64> = inst.effective_caps().iter().map(|&d| d as f64).collect();
    let l1 = AlphaChoice::fixed(Regime::L1, 3.0, 0.0, 0.0).unwrap();
    assert!(contract_round_fix(&inst, &x, &l1, 0.0, 1).is_err());
    let l0 = AlphaChoice::fixed(Regime::L0, 3.0, 0.0, 0.0).unwrap();
    let out = contract_round_fix(&inst, &x, &l0, 0.0, 1).unwrap();
    assert!(common::covers_exactly(&inst, &out.z, 1.0));
}

#[test]
fn uncovered_point_is_rejected() {
    let inst = one_row(&[0.5, 0.5]);
    let alpha = AlphaChoice::fixed(Regime::L0, 2.0, 0.0, 0.0).unwrap();
    assert!(round_and_fix(&inst, &[0.5, 0.4], &alpha, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn thresholds_split_the_row(seed in any::<u64>(), delta in 0.01f64..0.5) {
        let mut r = common::rng(seed);
        let inst = common::general(seed).normalize(NormMode::Unit).unwrap();
        let x = common::skewed_cover(&inst, &mut r, 3);
        for i in 0..inst.m() {
            for (th, share) in [
                (median_threshold(&inst, i, &x).unwrap(), 0.5),
                (rank_delta_threshold(&inst, i, &x, delta).unwrap(), delta),
            ] {
                prop_assert!(inst.row(i).iter().any(|&(_, a)| a == th.theta));
                let upper: f64 = inst.row(i).iter().filter(|e| e.1 >= th.theta).map(|&(j, a)| a * x[j]).sum();
                let lower: f64 = inst.row(i).iter().filter(|e| e.1 <= th.theta).map(|&(j, a)| a * x[j]).sum();
                prop_assert!(upper >= share * (1.0 - 1e-12));
                prop_assert!(lower >= (1.0 - share) * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn row_patch_is_cheap_and_bounded(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let inst = common::general(seed).normalize(NormMode::Unit).unwrap();
        let x = common::skewed_cover(&inst, &mut r, 2);
        for i in 0..inst.m() {
            let th = median_threshold(&inst, i, &x).unwrap();
            let patch = fix_row(&inst, i, &x, &th).unwrap();
            let cost: f64 = patch.iter().map(|&(j, k)| inst.c()[j] * k as f64).sum();
            let budget: f64 = inst.row(i).iter().map(|&(j, a)| inst.c()[j] * a * x[j]).sum::<f64>() * 4.0 / th.theta;
            prop_assert!(cost <= budget * (1.0 + 1e-12));
            let cov: f64 = patch.iter().map(|&(j, k)| {
                let a = inst.row(i).iter().find(|e| e.0 == j).unwrap().1;
                prop_assert!(a >= th.theta);
                prop_assert!(k as f64 <= (4.0 * x[j]).ceil());
                Ok(a * k as f64)
            }).sum::<Result<f64, TestCaseError>>()?;
            prop_assert!(cov >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn round_and_fix_covers_within_the_rounding_envelope(seed in any::<u64>(), extra in 0.0f64..4.0) {
        let mut r = common::rng(seed);
        let inst = common::general(seed);
        let x = common::skewed_cover(&inst, &mut r, 2);
        let alpha = AlphaChoice::fixed(Regime::L0, 4.0 + extra, 0.0, 0.0).unwrap();
        let out = round_and_fix(&inst, &x, &alpha, seed).unwrap();
        prop_assert!(common::covers_exactly(&inst, &out.z, 1.0));
        for (j, &v) in out.z.iter().enumerate() {
            prop_assert!(v as f64 <= (alpha.alpha * x[j]).ceil());
        }
        prop_assert!((out.cost() - inst.cost_int(&out.z)).abs() <= 1e-9 * out.cost().max(1.0));
        prop_assert_eq!(&round_and_fix(&inst, &x, &alpha, seed).unwrap(), &out);
    }

    #[test]
    fn rank_mode_also_covers(seed in any::<u64>(), delta in 0.01f64..0.5) {
        let mut r = common::rng(seed);
        let inst = common::general(seed);
        let x = common::skewed_cover(&inst, &mut r, 2);
        let out = round_and_fix_with(&inst, &x, 1.5, ThresholdMode::RankDelta(delta), seed, None).unwrap();
        prop_assert!(common::covers_exactly(&inst, &out.z, 1.0));
    }

    #[test]
    fn contraction_respects_caps(seed in any::<u64>(), eps in prop::sample::select(vec![0.0, 0.1, 0.5])) {
        let mut r = common::rng(seed);
        let inst = common::general(seed);
        let x = common::random_kc_point(&inst, &mut r);
        let alpha = l0(&inst);
        let out = contract_round_fix(&inst, &x, &alpha, eps, seed).unwrap();
        prop_assert!(common::within_caps(&inst, &out.z));
        prop_assert!(common::covers_exactly(&inst, &out.z, 1.0 + eps));
        // the (1+ε) shift restores full coverage
        let shifted = shift_to_multiplicity(&out.z, eps);
        prop_assert!(inst.check_cover(&shifted).unwrap().violated_rows.is_empty());
        prop_assert!(shifted.iter().zip(&out.z).all(|(&s, &z)| s >= z && s as f64 <= (1.0 + eps) * z as f64 + 1.0));
        prop_assert_eq!(&contract_round_fix(&inst, &x, &alpha, eps, seed).unwrap(), &out);
    }
}
