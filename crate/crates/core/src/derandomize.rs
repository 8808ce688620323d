//! Deterministic rounding for normalized instances (b = 1) by conditional
//! expectations over a pessimistic estimator.
//!
//! With `p_j = αx_j − ⌊αx_j⌋`, `t_i = α(Ax)_i` and `u_i = t_i/2`, each row
//! carries two product-form bounds on the probability that it stays uncovered:
//!
//! ```text
//! ΦA_i = t_i · Π_j t_i^{−A_ij⌊αx_j⌋} · E[t_i^{−A_ij y_j}]
//! ΦB_i = u_i^{1/θ_i} · Π_{A_ij ≤ θ_i} u_i^{−(A_ij/θ_i)⌊αx_j⌋} · E[u_i^{−(A_ij/θ_i) y_j}]
//! ```
//!
//! and `Φ = ⟨c,⌊αx⌋⟩ + ⟨c,y⟩ + Σ_i (4/θ_i) min(ΦA_i, ΦB_i) Σ_j c_j A_ij x_j`.
//! Each bound is a conditional expectation of a quantity that is at least 1
//! whenever the row is uncovered, so their minimum is concave in the
//! remaining randomness and the minimum over the two choices of any
//! coordinate never exceeds the current value.

use crate::error::{Error, Result};
use crate::instance::CoveringInstance;
use crate::rounding::fix::{alter, check_fractional};
use crate::rounding::{median_threshold, RoundingOutcome, ThresholdMode};
use crate::tails::lower_tail;
use serde::{Deserialize, Serialize};

/// Relative slack allowed when asserting that Φ did not increase.
const MONOTONE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
struct RowState {
    theta: f64,
    weight: f64,
    ln_t: f64,
    ln_u: f64,
    use_b: bool,
    log_a: f64,
    log_b: f64,
}

impl RowState {
    fn phi(&self) -> f64 {
        self.log_a.min(self.log_b).exp()
    }
}

#[derive(Clone, Debug)]
pub struct EstimatorState {
    alpha: f64,
    base: Vec<u64>,
    p: Vec<f64>,
    fixed: Vec<Option<u8>>,
    rows: Vec<RowState>,
    c: Vec<f64>,
    linear: f64,
}

/// `ln E[r^{−a y}]` for `y ~ Bernoulli(p)` given `ln r`.
fn ln_factor(p: f64, a: f64, ln_r: f64) -> f64 {
    (p * (-a * ln_r).exp_m1()).ln_1p()
}

impl EstimatorState {
    pub fn new(inst: &CoveringInstance, x: &[f64], alpha: f64) -> Result<Self> {
        check_fractional(inst, x)?;
        if inst.b().iter().any(|&b| b != 1.0) {
            return Err(Error::Precondition("derandomized rounding needs unit demands".into()));
        }
        if !(alpha >= 1.0 && alpha.is_finite()) {
            return Err(Error::Precondition(format!("alpha must be at least 1, got {alpha}")));
        }
        let base: Vec<u64> = x.iter().map(|&v| (alpha * v).floor() as u64).collect();
        let p: Vec<f64> = x.iter().zip(&base).map(|(&v, &b)| alpha * v - b as f64).collect();
        let c = inst.c().to_vec();
        let mut rows = Vec::with_capacity(inst.m());
        for i in 0..inst.m() {
            let theta = median_threshold(inst, i, x)?.theta;
            let mu = inst.row_dot(i, x);
            let ln_t = (alpha * mu).ln();
            let ln_u = (alpha * mu / 2.0).ln();
            let use_b = ln_u > 0.0;
            let mut log_a = ln_t;
            let mut log_b = if use_b { ln_u / theta } else { f64::INFINITY };
            for &(j, a) in inst.row(i) {
                log_a += -a * base[j] as f64 * ln_t + ln_factor(p[j], a, ln_t);
                if use_b && a <= theta {
                    let s = a / theta;
                    log_b += -s * base[j] as f64 * ln_u + ln_factor(p[j], s, ln_u);
                }
            }
            let weight = 4.0 / theta * inst.row(i).iter().map(|&(j, a)| c[j] * a * x[j]).sum::<f64>();
            rows.push(RowState { theta, weight, ln_t, ln_u, use_b, log_a, log_b });
        }
        let linear = c.iter().zip(&base).map(|(c, &b)| c * b as f64).sum::<f64>()
            + c.iter().zip(&p).map(|(c, p)| c * p).sum::<f64>();
        Ok(EstimatorState { alpha, base, p, fixed: vec![None; x.len()], rows, c, linear })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Row estimate `min(ΦA_i, ΦB_i)` at the current partial assignment.
    pub fn row_phi(&self, i: usize) -> f64 {
        self.rows[i].phi()
    }

    pub fn row_phi_a(&self, i: usize) -> f64 {
        self.rows[i].log_a.exp()
    }

    pub fn phi_total(&self) -> f64 {
        let mut sum = Neumaier::default();
        sum.add(self.linear);
        for r in &self.rows {
            sum.add(r.weight * r.phi());
        }
        sum.value()
    }

    /// Row log-bounds after fixing `y_j = v`, without committing.
    fn row_after(&self, r: &RowState, j: usize, a: f64, v: u8) -> (f64, f64) {
        let pj = self.p[j];
        let log_a = r.log_a - ln_factor(pj, a, r.ln_t) - a * v as f64 * r.ln_t;
        let log_b = if r.use_b && a <= r.theta {
            let s = a / r.theta;
            r.log_b - ln_factor(pj, s, r.ln_u) - s * v as f64 * r.ln_u
        } else {
            r.log_b
        };
        (log_a, log_b)
    }

    /// Change of Φ if `y_j` were fixed to `v`.
    fn delta(&self, inst: &CoveringInstance, j: usize, v: u8) -> f64 {
        let mut d = Neumaier::default();
        d.add(self.c[j] * (v as f64 - self.p[j]));
        for &(i, a) in inst.col(j) {
            let r = &self.rows[i];
            let (la, lb) = self.row_after(r, j, a, v);
            d.add(r.weight * (la.min(lb).exp() - r.phi()));
        }
        d.value()
    }

    fn commit(&mut self, inst: &CoveringInstance, j: usize, v: u8) {
        for &(i, a) in inst.col(j) {
            let (la, lb) = self.row_after(&self.rows[i], j, a, v);
            self.rows[i].log_a = la;
            self.rows[i].log_b = lb;
        }
        self.linear += self.c[j] * (v as f64 - self.p[j]);
        self.p[j] = v as f64;
        self.fixed[j] = Some(v);
    }

    fn rounded(&self) -> Vec<u64> {
        self.base
            .iter()
            .zip(&self.fixed)
            .map(|(&b, f)| b + f.unwrap_or(0) as u64)
            .collect()
    }
}

#[derive(Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerandTrace {
    pub phi_initial: f64,
    /// Φ after each coordinate fix, in index order.
    pub phi_trace: Vec<f64>,
    pub phi_final: f64,
}

pub fn derandomized_round(inst: &CoveringInstance, x: &[f64], alpha: f64) -> Result<(RoundingOutcome, DerandTrace)> {
    let mut st = EstimatorState::new(inst, x, alpha)?;
    let phi_initial = st.phi_total();
    let mut running = Neumaier::default();
    running.add(phi_initial);
    let mut phi = phi_initial;
    let mut phi_trace = Vec::with_capacity(inst.n());
    for j in 0..inst.n() {
        let (v, d) = if st.p[j] > 0.0 {
            let d0 = st.delta(inst, j, 0);
            let d1 = st.delta(inst, j, 1);
            if d1 < d0 {
                (1, d1)
            } else {
                (0, d0)
            }
        } else {
            (0, 0.0)
        };
        st.commit(inst, j, v);
        running.add(d);
        let next = running.value();
        if next > phi + MONOTONE_TOL * phi.abs().max(1.0) {
            return Err(Error::Certificate(format!(
                "estimator increased from {phi} to {next} at column {}",
                j + 1
            )));
        }
        phi = next;
        phi_trace.push(next);
    }
    let direct = st.phi_total();
    if (direct - phi).abs() > MONOTONE_TOL * direct.abs().max(1.0) {
        return Err(Error::Certificate(format!(
            "running estimator {phi} drifted from its direct value {direct}"
        )));
    }
    let mut z = st.rounded();
    let cost_round = inst.cost_int(&z);
    let (failed_rows, fixed_rows) = alter(inst, x, &mut z, ThresholdMode::Median, None)?;
    let cost = inst.cost_int(&z);
    if cost > phi * (1.0 + MONOTONE_TOL) + MONOTONE_TOL {
        return Err(Error::Certificate(format!("rounded cost {cost} exceeds the estimator {phi}")));
    }
    if !inst.check_cover(&z)?.violated_rows.is_empty() {
        return Err(Error::Certificate("alteration left rows uncovered".into()));
    }
    Ok((
        RoundingOutcome { z, cost_round, cost_fix: cost - cost_round, fixed_rows, failed_rows, seed: 0 },
        DerandTrace { phi_initial, phi_trace, phi_final: phi },
    ))
}

/// The row bound `ΦA_i` before any coordinate is fixed, evaluated with the
/// Chernoff closed form `exp(1 + ln(αμ) − αμ)` instead of the exact product;
/// the product never exceeds it.
pub fn phi_a_closed_form(alpha: f64, mu: f64) -> f64 {
    lower_tail(1.0, alpha * mu, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Mult, NormMode};

    #[test]
    fn single_row_value() {
        let inst = CoveringInstance::new(vec![1.0], vec![1.0], vec![Mult::Unbounded], vec![(0, 0, 1.0)]).unwrap();
        let st = EstimatorState::new(&inst, &[1.0], 2.0).unwrap();
        assert!((st.row_phi_a(0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn deterministic_when_integral() {
        let inst = CoveringInstance::new(
            vec![1.0, 2.0],
            vec![1.0, 1.0],
            vec![Mult::Unbounded; 2],
            vec![(0, 0, 1.0), (1, 1, 0.5), (1, 0, 0.5)],
        )
        .unwrap();
        let (out, trace) = derandomized_round(&inst, &[1.0, 1.0], 1.0).unwrap();
        assert_eq!(out.z, vec![1, 1]);
        assert!(out.fixed_rows.is_empty());
        assert_eq!(trace.phi_trace.len(), 2);
    }

    #[test]
    fn monotone_and_dominating() {
        let inst = crate::instance::gen_random(&crate::instance::GenParams::new(5, 6, 8, 0.5))
            .unwrap()
            .normalize(NormMode::Unit)
            .unwrap();
        let min_row = (0..inst.m()).map(|i| inst.row_dot(i, &[1.0; 8])).fold(f64::INFINITY, f64::min);
        let x = vec![1.05 / min_row; 8];
        let (out, trace) = derandomized_round(&inst, &x, 3.0).unwrap();
        let mut prev = trace.phi_initial;
        for &v in &trace.phi_trace {
            assert!(v <= prev * (1.0 + 1e-9));
            prev = v;
        }
        assert!(out.cost() <= trace.phi_initial * (1.0 + 1e-9));
        assert!(inst.check_cover(&out.z).unwrap().violated_rows.is_empty());
    }

    #[test]
    fn closed_form_dominates_product() {
        let inst = CoveringInstance::new(
            vec![1.0; 3],
            vec![1.0],
            vec![Mult::Unbounded; 3],
            vec![(0, 0, 0.4), (0, 1, 0.7), (0, 2, 1.0)],
        )
        .unwrap();
        let x = [0.5, 0.6, 0.5];
        let st = EstimatorState::new(&inst, &x, 3.0).unwrap();
        let mu = inst.row_dot(0, &x);
        assert!(st.row_phi_a(0) <= phi_a_closed_form(3.0, mu) * (1.0 + 1e-12));
    }
}
