use super::accel::Accelerated;
use super::audit::Audit;
use super::naive::Naive;
use super::oracle::{item_cost, Answer, Backend, QueryParams, Weights};
use super::prep::{Prepared, ELL_BITS, RATE_BITS};
use super::{BackendKind, KcLpOptions, KcLpResult, PickRecord};
use crate::error::{Error, Result};
use crate::instance::{CoveringInstance, Mult};
use crate::knapsack::{kc_greedy, KcItem, KnapsackCoverProblem};
use std::time::Instant;

/// The weights run at this fraction of the requested accuracy so that the
/// primal/dual gap fits inside the (1−ε) scaling of the output.
pub(crate) const WORKING_SHARE: f64 = 0.33333333333333;

fn pow2_ceil(v: f64) -> f64 {
    2f64.powi(v.log2().ceil() as i32)
}

/// Smallest greedy answer over all pairs at the initial weights, divided by
/// 4 so that it sits below every pair's optimum.
fn initial_lambda(pr: &Prepared, ws: &Weights) -> Result<f64> {
    let mut best = f64::INFINITY;
    for (p, pair) in pr.pairs.iter().enumerate() {
        let row = &pr.rows[pair.row];
        let items = row
            .iter()
            .enumerate()
            .map(|(q, &(j, a))| KcItem {
                id: j as usize,
                cost: item_cost(pr, ws, p, q),
                size: a * pr.caps[j as usize] as f64,
                cap: Mult::Finite(1),
            })
            .collect();
        let sol = kc_greedy(&KnapsackCoverProblem::new(items, pair.demand)?)?;
        best = best.min(sol.cost);
    }
    if !(best > 0.0 && best.is_finite()) {
        return Err(Error::Certificate(format!("initial threshold {best} is not positive")));
    }
    Ok(best / 4.0)
}

struct Candidate {
    x: Vec<f64>,
    cost: f64,
}

fn keep(c: Candidate, best: &mut Option<Candidate>) {
    if best.as_ref().map_or(true, |b| c.cost < b.cost) {
        *best = Some(c);
    }
}

/// `x_j = min((1−ε)(1+ε')·w_j/Λ_j, D_j)` where ε' is the working accuracy
/// and Λ_j is the smallest certified pair optimum over the rows containing j
/// (never below λ). Each pair's optimum is at least its bound, so
/// `(1+ε')w/Λ` meets every knapsack-cover inequality of those rows and the
/// (1−ε) factor spends the allowed slack.
fn candidate(inst: &CoveringInstance, pr: &Prepared, ws: &Weights, eps: f64, lambda: f64, lower: &[f64]) -> Candidate {
    let row_bound: Vec<f64> = pr
        .row_pairs
        .iter()
        .map(|r| lower[r.clone()].iter().fold(f64::INFINITY, |a, &l| a.min(l.max(lambda))))
        .collect();
    let mut x = pr.base_x.clone();
    let shift = (1.0 - eps).ln() + pr.eps.ln_1p();
    for (jl, &j) in pr.cols.iter().enumerate() {
        let bound = pr.col_pos[jl].iter().map(|&(i, _)| row_bound[i as usize]).fold(f64::INFINITY, f64::min);
        let v = (ws.ell_f64(jl) - pr.cost[jl].ln() + shift - bound.ln()).exp();
        x[j] = v.min(pr.caps[jl] as f64);
    }
    let cost = inst.cost(&x);
    Candidate { x, cost }
}

pub(crate) fn run(inst: &CoveringInstance, opts: &KcLpOptions) -> Result<KcLpResult> {
    let start = Instant::now();
    if !(opts.eps > 0.0 && opts.eps <= 0.5) {
        return Err(Error::Domain(format!("eps must lie in (0, 1/2], got {}", opts.eps)));
    }
    let pr = Prepared::new(inst, opts.eps * WORKING_SHARE)?;
    let mut ws = Weights::new(pr.n());
    if pr.pairs.is_empty() {
        let cost = inst.cost(&pr.base_x);
        return Ok(KcLpResult::trivial(opts, pr.base_x.clone(), cost, start.elapsed()));
    }
    match (opts.backend, opts.audit) {
        (_, true) => {
            let mut b = Audit::new(&pr, &ws);
            b.accel.list_prefixes = true;
            drive(inst, &pr, &mut ws, &mut b, opts, start)
        }
        (BackendKind::Naive, false) => drive(inst, &pr, &mut ws, &mut Naive, opts, start),
        (BackendKind::Accelerated, false) => {
            let mut b = Accelerated::new(&pr);
            b.list_prefixes = opts.transcript;
            drive(inst, &pr, &mut ws, &mut b, opts, start)
        }
    }
}

fn drive<B: Backend>(
    inst: &CoveringInstance,
    pr: &Prepared,
    ws: &mut Weights,
    backend: &mut B,
    opts: &KcLpOptions,
    start: Instant,
) -> Result<KcLpResult> {
    let eps = pr.eps;
    let n = pr.n().max(1) as f64;
    let budget = opts
        .max_iterations
        .unwrap_or((10.0 * n * n.ln().max(1.0) / (eps * eps)) as u64 + 10);
    let lambda_init = initial_lambda(pr, ws)?;
    let mut lambda = lambda_init;
    let mut beta = pow2_ceil(lambda);
    backend.rebuild(pr, ws, beta)?;

    let np = pr.pairs.len();
    let mut lower = vec![0.0f64; np];
    let mut cursor = 0usize;
    let mut active: Option<usize> = None;
    let mut iterations = 0u64;
    let mut oracle_calls = 0u64;
    let mut flushes = 0u64;
    let mut rebuilds = 0u64;
    let mut bumps = Vec::new();
    let mut dual_fx: u128 = 0;
    let mut transcript = Vec::new();
    let mut best: Option<Candidate> = None;

    loop {
        if cursor == np {
            if let Some(a) = active.take() {
                backend.flush(pr, ws, a)?;
                flushes += 1;
            }
            lambda *= 1.0 + eps;
            bumps.push(iterations);
            keep(candidate(inst, pr, ws, opts.eps, lambda, &lower), &mut best);
            cursor = 0;
            let nb = pow2_ceil(lambda);
            if nb != beta {
                beta = nb;
                backend.rebuild(pr, ws, beta)?;
                rebuilds += 1;
            }
            continue;
        }
        let p = cursor;
        let park = |active: &mut Option<usize>, backend: &mut B, ws: &mut Weights, flushes: &mut u64| -> Result<()> {
            if *active == Some(p) {
                backend.flush(pr, ws, p)?;
                *flushes += 1;
                *active = None;
            }
            Ok(())
        };
        if lower[p] > (1.0 + eps) * lambda {
            park(&mut active, backend, ws, &mut flushes)?;
            cursor += 1;
            continue;
        }
        let qp = QueryParams::new(eps, beta, lambda);
        oracle_calls += 1;
        let ans: Answer = match backend.query(pr, ws, p, &qp)? {
            None => {
                lower[p] = lower[p].max(qp.value(qp.threshold_fx));
                park(&mut active, backend, ws, &mut flushes)?;
                cursor += 1;
                continue;
            }
            Some(a) if a.value_fx > qp.threshold_fx => {
                lower[p] = lower[p].max(qp.value(a.value_fx) / (1.0 + eps));
                park(&mut active, backend, ws, &mut flushes)?;
                cursor += 1;
                continue;
            }
            Some(a) => a,
        };

        if active != Some(p) {
            if let Some(a) = active.take() {
                backend.flush(pr, ws, a)?;
                flushes += 1;
            }
            backend.activate(pr, ws, p)?;
            active = Some(p);
        }
        if ans.g_max == 0 {
            return Err(Error::Certificate(format!("pick on pair {p} has no positive load rate")));
        }
        let delta = pr.eps_fx / ans.g_max;
        if delta == 0 {
            return Err(Error::Certificate(format!("step underflow on pair {p}")));
        }
        iterations += 1;
        if iterations > budget {
            return Err(Error::NonTermination(format!(
                "{iterations} picks exceed the budget {budget} (lambda {lambda:.6e}, {} bumps)",
                bumps.len()
            )));
        }
        dual_fx += delta;
        if opts.transcript {
            let pair = &pr.pairs[p];
            let row = &pr.rows[pair.row];
            let col = |q: u32| pr.cols[row[q as usize].0 as usize];
            transcript.push(PickRecord {
                iteration: iterations,
                row: pr.orig_rows[pair.row],
                alpha: if pair.floor { 0.0 } else { pair.alpha },
                value: qp.value(ans.value_fx),
                delta: delta as f64 / 2f64.powi(RATE_BITS),
                expensive: ans.exp.iter().map(|&q| col(q)).collect(),
                cheap: ans.cheap.iter().map(|&q| col(q)).collect(),
            });
        }
        if backend.apply(pr, ws, p, &ans, delta)? {
            break;
        }
    }
    if let Some(a) = active.take() {
        backend.flush(pr, ws, a)?;
        flushes += 1;
    }
    keep(candidate(inst, pr, ws, opts.eps, lambda, &lower), &mut best);
    let best = best.expect("a candidate is always recorded at the stop");

    let max_ell = (0..pr.n()).map(|j| ws.ell_f64(j)).fold(0.0, f64::max);
    let max_load = max_ell / pr.eta;
    let dual_value = dual_fx as f64 / 2f64.powi(RATE_BITS) * pr.cost_scale;
    Ok(KcLpResult {
        x: best.x,
        primal_cost: best.cost,
        dual_value,
        dual_lower_bound: dual_value / max_load.max(1.0),
        max_load,
        iterations,
        oracle_calls,
        lambda_bumps: bumps.len() as u64,
        bump_iterations: bumps,
        lambda_init,
        lambda_final: lambda,
        backend: opts.backend,
        audited: opts.audit,
        flush_count: flushes,
        rebuild_count: rebuilds,
        log_weights: (0..pr.n()).map(|j| ws.ell[j] as f64 / 2f64.powi(ELL_BITS)).collect(),
        transcript,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
