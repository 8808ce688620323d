//! Knapsack-cover LP solver: multiplicative weights on the dual packing LP
//! with a thresholded round-robin over (row, α) knapsack oracles.

mod accel;
mod audit;
mod naive;
mod oracle;
mod prep;
mod solver;
mod treap;

use crate::error::{Error, Result};
use crate::instance::{CoveringInstance, Mult};
use crate::knapsack::{KcItem, KnapsackCoverProblem};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Naive,
    Accelerated,
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendKind::Naive => "naive",
            BackendKind::Accelerated => "accelerated",
        })
    }
}

impl FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(BackendKind::Naive),
            "accelerated" | "accel" => Ok(BackendKind::Accelerated),
            _ => Err(Error::Domain(format!("unknown backend '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KcLpOptions {
    pub eps: f64,
    pub backend: BackendKind,
    /// Run the naive backend in lockstep and fail on any disagreement.
    pub audit: bool,
    /// Record every pick.
    pub transcript: bool,
    /// Overrides the default pick budget `10·n·ln n/ε² + 10`.
    pub max_iterations: Option<u64>,
}

impl KcLpOptions {
    pub fn new(eps: f64, backend: BackendKind) -> Self {
        KcLpOptions { eps, backend, audit: false, transcript: false, max_iterations: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PickRecord {
    pub iteration: u64,
    pub row: usize,
    /// 0 for the catch-all pair below the α grid.
    pub alpha: f64,
    pub value: f64,
    pub delta: f64,
    pub expensive: Vec<usize>,
    pub cheap: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KcLpResult {
    pub x: Vec<f64>,
    pub primal_cost: f64,
    /// Accumulated dual objective (before scaling to feasibility).
    pub dual_value: f64,
    /// Dual objective scaled by the largest load; a lower bound on the
    /// KC-LP optimum.
    pub dual_lower_bound: f64,
    pub max_load: f64,
    pub iterations: u64,
    pub oracle_calls: u64,
    pub lambda_bumps: u64,
    /// Pick count at each threshold increase.
    pub bump_iterations: Vec<u64>,
    /// Thresholds in the solver's cost units (cheapest column costs 1).
    pub lambda_init: f64,
    pub lambda_final: f64,
    pub backend: BackendKind,
    pub audited: bool,
    pub flush_count: u64,
    pub rebuild_count: u64,
    /// Final ℓ_j of the columns the solver worked on.
    pub log_weights: Vec<f64>,
    pub transcript: Vec<PickRecord>,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub eps: f64,
    pub backend: BackendKind,
    pub iterations: u64,
    pub lambda_bumps: u64,
    pub primal_cost: f64,
    pub dual_value: f64,
    pub wall_ms: f64,
    pub flush_count: u64,
    pub rebuild_count: u64,
}

impl KcLpResult {
    fn trivial(opts: &KcLpOptions, x: Vec<f64>, cost: f64, wall: Duration) -> Self {
        KcLpResult {
            x,
            primal_cost: cost,
            dual_value: 0.0,
            dual_lower_bound: 0.0,
            max_load: 0.0,
            iterations: 0,
            oracle_calls: 0,
            lambda_bumps: 0,
            bump_iterations: Vec::new(),
            lambda_init: 0.0,
            lambda_final: 0.0,
            backend: opts.backend,
            audited: opts.audit,
            flush_count: 0,
            rebuild_count: 0,
            log_weights: Vec::new(),
            transcript: Vec::new(),
            wall_ms: wall.as_secs_f64() * 1e3,
        }
    }

    pub fn report(&self, eps: f64) -> RunReport {
        RunReport {
            eps,
            backend: self.backend,
            iterations: self.iterations,
            lambda_bumps: self.lambda_bumps,
            primal_cost: self.primal_cost,
            dual_value: self.dual_value,
            wall_ms: self.wall_ms,
            flush_count: self.flush_count,
            rebuild_count: self.rebuild_count,
        }
    }
}

/// Powers of 1+ε in `[1/((1+ε)C), (1+ε)C]`, ascending.
pub fn alpha_grid(c: f64, eps: f64) -> Result<Vec<f64>> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0, 1], got {eps}")));
    }
    if !(c >= 1.0 && c.is_finite()) {
        return Err(Error::Domain(format!("coefficient range must be at least 1, got {c}")));
    }
    let r = 1.0 + eps;
    let top = ((r * c).ln() / r.ln() + 1e-9).floor() as i32;
    Ok((-top..=top).map(|k| r.powi(k)).collect())
}

/// Knapsack-cover subproblem of row i at residual-demand guess α: choose the
/// items kept out of the contracted set, each at most once, so that they
/// still carry `η_i + α`, paying `(w_j/α)·min(A_ij, α)` for each.
pub fn kc_subproblem(inst: &CoveringInstance, w: &[f64], i: usize, alpha: f64) -> Result<KnapsackCoverProblem> {
    if w.len() != inst.n() {
        return Err(Error::Dimension { expected: inst.n(), got: w.len() });
    }
    if i >= inst.m() {
        return Err(Error::Dimension { expected: inst.m(), got: i + 1 });
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let caps = inst.effective_caps();
    let row = inst.row(i);
    let reach: f64 = row.iter().map(|&(j, a)| a * caps[j] as f64).sum();
    let excess = reach - inst.b()[i];
    if excess < -1e-9 * inst.b()[i].max(1.0) {
        return Err(Error::Infeasible(format!("row {} has negative excess {excess}", i + 1)));
    }
    let items = row
        .iter()
        .map(|&(j, a)| KcItem { id: j, cost: w[j] / alpha * a.min(alpha), size: a * caps[j] as f64, cap: Mult::Finite(1) })
        .collect();
    KnapsackCoverProblem::new(items, excess.max(0.0) + alpha)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightStep {
    /// Dual step size `ε/(η·max_j A_{S,i,j}/c_j)`.
    pub delta: f64,
    pub dual_increment: f64,
    /// `(column, multiplier)` for each item of the pick.
    pub multipliers: Vec<(usize, f64)>,
}

/// Multiplicative update for a pick `(i, K)` where K are the items kept out
/// of the contracted set `S`: each `j ∈ K` gets `exp(ε·r_j/max r)` with
/// `r_j = min(A_ij, b_S)/c_j`.
pub fn weight_update(
    inst: &CoveringInstance,
    w: &mut [f64],
    i: usize,
    kept: &[usize],
    eps: f64,
    eta: f64,
) -> Result<WeightStep> {
    if w.len() != inst.n() {
        return Err(Error::Dimension { expected: inst.n(), got: w.len() });
    }
    if kept.is_empty() {
        return Err(Error::Precondition("degenerate pick: no items outside the contracted set".into()));
    }
    let caps = inst.effective_caps();
    let row = inst.row(i);
    let coef = |j: usize| row.iter().find(|e| e.0 == j).map(|e| e.1);
    for &j in kept {
        if coef(j).is_none() {
            return Err(Error::Precondition(format!("column {} is not in row {}", j + 1, i + 1)));
        }
    }
    let contracted: f64 = row.iter().filter(|e| !kept.contains(&e.0)).map(|&(j, a)| a * caps[j] as f64).sum();
    let b_s = (inst.b()[i] - contracted).max(0.0);
    if b_s <= 0.0 {
        return Err(Error::Precondition("the contracted set already covers the row".into()));
    }
    let ratio = |j: usize| coef(j).unwrap().min(b_s) / inst.c()[j];
    let r_max = kept.iter().map(|&j| ratio(j)).fold(0.0, f64::max);
    let delta = eps / (eta * r_max);
    let multipliers: Vec<(usize, f64)> = kept.iter().map(|&j| (j, (eps * ratio(j) / r_max).exp())).collect();
    for &(j, m) in &multipliers {
        w[j] *= m;
    }
    Ok(WeightStep { delta, dual_increment: delta * b_s, multipliers })
}

/// `x_j = min(w_j/λ, d_j)`.
pub fn primal_extract(w: &[f64], lambda: f64, d: &[u64]) -> Result<Vec<f64>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("threshold must be positive, got {lambda}")));
    }
    if w.len() != d.len() {
        return Err(Error::Dimension { expected: d.len(), got: w.len() });
    }
    Ok(w.iter().zip(d).map(|(&v, &cap)| (v / lambda).min(cap as f64)).collect())
}

pub fn solve_kclp(inst: &CoveringInstance, eps: f64, backend: BackendKind, audit: bool) -> Result<KcLpResult> {
    solve_kclp_with(inst, &KcLpOptions { audit, ..KcLpOptions::new(eps, backend) })
}

pub fn solve_kclp_with(inst: &CoveringInstance, opts: &KcLpOptions) -> Result<KcLpResult> {
    solver::run(inst, opts)
}
