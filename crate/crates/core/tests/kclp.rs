use cip_core::instance::{gen_gap_example, gen_random, CoveringInstance, GenParams, Mult};
use cip_core::kclp::{solve_kclp, solve_kclp_with, BackendKind, KcLpOptions};
use cip_core::verify::{exact_ilp, kc_separation};
use proptest::prelude::*;

fn small(seed: u64) -> CoveringInstance {
    let m = 2 + (seed % 4) as usize;
    let n = 4 + (seed % 7) as usize;
    let mut p = GenParams::new(seed, m, n, 0.5);
    p.d_max = Some(1 + seed % 3);
    gen_random(&p).unwrap()
}

#[test]
fn gap_candidate_passes_separation() {
    let g = gen_gap_example(10.0).unwrap();
    let r = solve_kclp(&g, 0.1, BackendKind::Naive, false).unwrap();
    let rep = kc_separation(&g, &r.x, 0.1).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert!(r.primal_cost >= 0.9);
    assert!(r.lambda_bumps >= 1);
}

#[test]
fn both_backends_meet_the_contract() {
    for seed in 0..12 {
        let inst = small(seed);
        let opt = exact_ilp(&inst).unwrap().cost;
        for backend in [BackendKind::Naive, BackendKind::Accelerated] {
            let r = solve_kclp(&inst, 0.1, backend, false).unwrap();
            let rep = kc_separation(&inst, &r.x, 0.1).unwrap();
            assert!(rep.pass, "seed {seed} {backend}: {rep:?}");
            assert!(r.primal_cost <= opt * (1.0 + 1e-9), "seed {seed} {backend}: {} > {opt}", r.primal_cost);
            assert!(r.dual_lower_bound <= r.primal_cost / (1.0 - 0.1) + 1e-9);
        }
    }
}

#[test]
fn backends_agree_on_bumps_and_transcript() {
    for seed in 100..106 {
        let inst = small(seed);
        let run = |backend| {
            let opts = KcLpOptions { transcript: true, ..KcLpOptions::new(0.2, backend) };
            solve_kclp_with(&inst, &opts).unwrap()
        };
        let a = run(BackendKind::Naive);
        let b = run(BackendKind::Accelerated);
        assert_eq!(a.bump_iterations, b.bump_iterations, "seed {seed}");
        assert_eq!(a.transcript, b.transcript, "seed {seed}");
        assert_eq!(a.x, b.x, "seed {seed}");
        let audited = solve_kclp(&inst, 0.2, BackendKind::Accelerated, true).unwrap();
        assert_eq!(audited.x, b.x);
    }
}

#[test]
fn unbounded_columns_use_effective_caps() {
    let inst = CoveringInstance::new(
        vec![1.0, 3.0],
        vec![2.5],
        vec![Mult::Unbounded, Mult::Finite(1)],
        [(0, 0, 1.0), (0, 1, 2.5)],
    )
    .unwrap();
    let r = solve_kclp(&inst, 0.1, BackendKind::Accelerated, true).unwrap();
    assert!(r.x[0] <= 3.0);
    assert!(kc_separation(&inst, &r.x, 0.1).unwrap().pass);
    assert!(r.primal_cost <= exact_ilp(&inst).unwrap().cost + 1e-9);
}

#[test]
fn iteration_budget_is_enforced() {
    let inst = small(3);
    let opts = KcLpOptions { max_iterations: Some(2), ..KcLpOptions::new(0.1, BackendKind::Naive) };
    let err = solve_kclp_with(&inst, &opts).unwrap_err();
    assert!(matches!(err, cip_core::Error::NonTermination(_)));
}

#[test]
fn rejects_bad_eps() {
    let g = gen_gap_example(4.0).unwrap();
    assert!(solve_kclp(&g, 0.0, BackendKind::Naive, false).is_err());
    assert!(solve_kclp(&g, 1.5, BackendKind::Naive, false).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn output_is_capped_and_separated(seed in 0u64..10_000, eps in prop::sample::select(vec![0.1, 0.25, 0.5])) {
        let inst = small(seed);
        let r = solve_kclp(&inst, eps, BackendKind::Accelerated, false).unwrap();
        let caps = inst.effective_caps();
        prop_assert!(r.x.iter().zip(&caps).all(|(&v, &d)| v >= 0.0 && v <= d as f64));
        prop_assert!(kc_separation(&inst, &r.x, eps).unwrap().pass);
        prop_assert!(r.lambda_final >= r.lambda_init);
        prop_assert!(r.bump_iterations.windows(2).all(|w| w[0] <= w[1]));
    }
}
