//! Instance preprocessing and the fixed (pair, item) tables shared by both
//! oracle backends.

use super::alpha_grid;
use crate::error::{Error, Result};
use crate::instance::{covers, CoveringInstance};
use crate::knapsack::fptas::{to_fx, SIZE_BITS};
use std::ops::Range;

/// Fractional bits of the log-weights ℓ_j.
pub(crate) const ELL_BITS: i32 = 96;
/// Fractional bits of the per-item load rates g_j and of the step δ.
pub(crate) const RATE_BITS: i32 = 48;

/// Largest exponent a weight may reach before `f64` loses it.
const MAX_EXPONENT: f64 = 600.0;

#[derive(Clone, Debug)]
pub(crate) struct Pair {
    /// Row in the reduced instance.
    pub row: usize,
    pub alpha: f64,
    /// Catch-all pair for residual demands below the smallest grid value;
    /// every item counts fully (â = 1).
    pub floor: bool,
    pub demand: f64,
    pub tol_fx: u128,
    /// Offset of this pair's items in the flat tables.
    pub off: usize,
}

/// Reduced, normalized instance: zero-cost columns are fixed at their caps,
/// covered rows dropped, every remaining row scaled to demand 1 and costs
/// scaled so the cheapest remaining column costs 1.
#[derive(Clone, Debug)]
pub(crate) struct Prepared {
    pub eps: f64,
    pub eta: f64,
    /// Original column of each reduced column.
    pub cols: Vec<usize>,
    pub cost: Vec<f64>,
    pub cost_scale: f64,
    pub caps: Vec<u64>,
    /// Reduced rows as (reduced column, normalized coefficient).
    pub rows: Vec<Vec<(u32, f64)>>,
    pub orig_rows: Vec<usize>,
    /// For each reduced column, its (row, position in row).
    pub col_pos: Vec<Vec<(u32, u32)>>,
    pub pairs: Vec<Pair>,
    pub row_pairs: Vec<Range<usize>>,
    pub hat: Vec<f64>,
    pub size_fx: Vec<u128>,
    pub g_fx: Vec<u128>,
    pub step_fx: u128,
    pub k_eta: u32,
    pub pw: Vec<f64>,
    pub eps_fx: u128,
    /// x for the original instance before the solver fills in reduced columns.
    pub base_x: Vec<f64>,
}

impl Prepared {
    pub fn new(inst: &CoveringInstance, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 0.5) {
            return Err(Error::Domain(format!("eps must lie in (0, 1/2], got {eps}")));
        }
        let caps_all = inst.effective_caps();
        let n_all = inst.n();
        let free: Vec<bool> = inst.c().iter().map(|&c| c == 0.0).collect();
        let mut base_x = vec![0.0; n_all];
        for j in 0..n_all {
            if free[j] {
                base_x[j] = caps_all[j] as f64;
            }
        }

        let mut kept_rows = Vec::new();
        for i in 0..inst.m() {
            let b = inst.b()[i];
            let fixed: f64 = inst.row(i).iter().filter(|e| free[e.0]).map(|&(j, a)| a * caps_all[j] as f64).sum();
            if !covers(fixed, b) {
                kept_rows.push((i, b - fixed));
            }
        }

        let mut local = vec![u32::MAX; n_all];
        let mut cols = Vec::new();
        for &(i, _) in &kept_rows {
            for &(j, _) in inst.row(i) {
                if !free[j] && local[j] == u32::MAX {
                    local[j] = 0;
                }
            }
        }
        for j in 0..n_all {
            if local[j] == 0 {
                local[j] = cols.len() as u32;
                cols.push(j);
            }
        }
        let n = cols.len();
        let cost_scale = cols.iter().map(|&j| inst.c()[j]).fold(f64::INFINITY, f64::min);
        let cost: Vec<f64> = cols.iter().map(|&j| inst.c()[j] / cost_scale).collect();
        let caps: Vec<u64> = cols.iter().map(|&j| caps_all[j]).collect();

        let mut rows = Vec::with_capacity(kept_rows.len());
        let mut orig_rows = Vec::with_capacity(kept_rows.len());
        let mut col_pos = vec![Vec::new(); n];
        for &(i, r) in &kept_rows {
            let mut row = Vec::new();
            for &(j, a) in inst.row(i) {
                if !free[j] {
                    let jl = local[j];
                    col_pos[jl as usize].push((rows.len() as u32, row.len() as u32));
                    row.push((jl, a.min(r) / r));
                }
            }
            let reach: f64 = row.iter().map(|&(j, a)| a * caps[j as usize] as f64).sum();
            if !covers(reach, 1.0) {
                return Err(Error::Infeasible(format!("row {} cannot be covered within d", i + 1)));
            }
            rows.push(row);
            orig_rows.push(i);
        }

        let eta = (n.max(1) as f64).ln().max(1.0) / eps;
        if eta * (1.0 + eps) + 2.0 > MAX_EXPONENT {
            return Err(Error::Domain(format!(
                "eps = {eps} is too small for {n} columns: weights would overflow"
            )));
        }
        let step_fx = to_fx(eps.ln_1p(), ELL_BITS);
        let k_eta = to_fx(eta, ELL_BITS).div_ceil(step_fx) as u32;
        let mut pw = Vec::with_capacity(k_eta as usize + 8);
        let mut v = 1.0f64;
        for _ in 0..k_eta + 8 {
            pw.push(v);
            v *= 1.0 + eps;
        }

        let mut pairs = Vec::new();
        let mut row_pairs = Vec::with_capacity(rows.len());
        let mut hat = Vec::new();
        let mut size_fx = Vec::new();
        let mut g_fx = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            let a_min = row.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
            let excess = (row.iter().map(|&(j, a)| a * caps[j as usize] as f64).sum::<f64>() - 1.0).max(0.0);
            let mut alphas: Vec<(f64, bool)> = vec![(1e-3 * a_min.min(1e-7), true)];
            alphas.extend(
                alpha_grid(1.0 / a_min, eps)?
                    .into_iter()
                    .filter(|&a| a <= 1.0 + 1e-12)
                    .map(|a| (a, false)),
            );
            let start = pairs.len();
            for (alpha, floor) in alphas {
                let demand = excess + alpha;
                let tol = (1e-3 * alpha / demand).min(1e-12);
                pairs.push(Pair { row: i, alpha, floor, demand, tol_fx: to_fx(tol, SIZE_BITS), off: hat.len() });
                for &(j, a) in row {
                    let h = if floor { 1.0 } else { a.min(alpha) / alpha };
                    let s = a * caps[j as usize] as f64;
                    hat.push(h);
                    size_fx.push(to_fx(s.min(demand) / demand, SIZE_BITS).max(1));
                    g_fx.push(to_fx(eta * h / cost[j as usize], RATE_BITS));
                }
            }
            row_pairs.push(start..pairs.len());
        }

        Ok(Prepared {
            eps,
            eta,
            cols,
            cost,
            cost_scale,
            caps,
            rows,
            orig_rows,
            col_pos,
            pairs,
            row_pairs,
            hat,
            size_fx,
            g_fx,
            step_fx,
            k_eta,
            pw,
            eps_fx: to_fx(eps, ELL_BITS),
            base_x,
        })
    }

    pub fn n(&self) -> usize {
        self.cols.len()
    }

    /// `(1+ε)^k`, clamped to the table.
    pub fn pow(&self, k: u32) -> f64 {
        self.pw[(k as usize).min(self.pw.len() - 1)]
    }
}
