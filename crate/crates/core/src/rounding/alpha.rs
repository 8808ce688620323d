use crate::error::{Error, Result};
use crate::instance::SparsityStats;
use crate::tails::{basic_tail, median_tail};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    L0,
    L1,
    L1Bmin,
    L1Small,
    Bicriteria,
}

/// Additive constant in the expected-cost bound `(α + C)⟨c,x⟩` for the ℓ1
/// regimes: a row fails with probability at most θ_i/Δ1 and repairing it costs
/// at most (4/θ_i)Σ_j c_j A_ij x_j, which sums to at most 4⟨c,x⟩.
pub const L1_FIX_CONSTANT: f64 = 4.0;

const GAMMA_STEP: f64 = 0.25;
const THETA_STEP: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaChoice {
    pub regime: Regime,
    pub alpha: f64,
    pub delta_small: f64,
    pub eps: f64,
    pub constants_used: BTreeMap<String, f64>,
}

impl AlphaChoice {
    /// A caller-supplied α (for sweeps); no calibration is recorded.
    pub fn fixed(regime: Regime, alpha: f64, delta_small: f64, eps: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
        }
        let mut constants_used = BTreeMap::new();
        constants_used.insert("override".into(), 1.0);
        Ok(AlphaChoice { regime, alpha, delta_small, eps, constants_used })
    }
}

/// θ values at which the calibration condition is checked: a 10⁻³ grid on
/// (0, 1] plus both ends and the interior stationary point of the
/// θ-dependent part.
fn theta_scan(stationary: f64) -> Vec<f64> {
    let steps = (1.0 / THETA_STEP).round() as usize;
    let mut thetas: Vec<f64> = (1..=steps).map(|k| k as f64 * THETA_STEP).collect();
    thetas.push(f64::MIN_POSITIVE.max(1e-12));
    if stationary > 0.0 && stationary < 1.0 {
        thetas.push(stationary);
    }
    thetas
}

/// Smallest γ on the 0.25 grid such that `α = base + γ` satisfies, for every
/// scanned θ, `median_tail(α, θ/s) ≤ θ/Δ1`, i.e.
/// `α ≥ 2(θ/s) ln Δ1 + 2(θ/s) ln(1/θ) + 2 ln(α/2) + 2` with `s = b_min`.
fn calibrate(base: f64, log_delta1: f64, b_min: f64) -> (f64, f64, f64) {
    let stationary = (log_delta1 - 1.0).exp();
    let thetas = theta_scan(stationary);
    let holds = |alpha: f64| -> Option<f64> {
        if alpha <= 2.0 {
            return None;
        }
        let mut worst: f64 = 0.0;
        for &t in &thetas {
            let log_ratio = (median_tail(alpha, t / b_min)).ln() - (t.ln() - log_delta1);
            if log_ratio > 1e-12 {
                return None;
            }
            worst = worst.max(log_ratio);
        }
        Some(worst)
    };
    let mut gamma = 0.0f64;
    if base < 2.0 {
        gamma = ((2.0 - base) / GAMMA_STEP).ceil() * GAMMA_STEP;
    }
    loop {
        if let Some(worst) = holds(base + gamma) {
            return (gamma, base + gamma, worst);
        }
        gamma += GAMMA_STEP;
    }
}

pub fn choose_alpha(stats: &SparsityStats, regime: Regime, eps: f64) -> Result<AlphaChoice> {
    let mut constants_used = BTreeMap::new();
    let finish = |alpha: f64, delta_small: f64, eps: f64, consts: BTreeMap<String, f64>| AlphaChoice {
        regime,
        alpha,
        delta_small,
        eps,
        constants_used: consts,
    };
    match regime {
        Regime::L0 => {
            let d0 = stats.delta0 as f64;
            if stats.delta0 < 2 {
                return Err(Error::Regime(format!("L0 needs delta0 >= 2, got {}", stats.delta0)));
            }
            let alpha = d0.ln() + d0.ln().ln() + 4.0;
            constants_used.insert("additive".into(), 4.0);
            constants_used.insert("row_failure_bound".into(), basic_tail(alpha));
            constants_used.insert("row_failure_target".into(), 1.0 / (2.0 * d0));
            Ok(finish(alpha, 0.0, 0.0, constants_used))
        }
        Regime::L1 | Regime::Bicriteria | Regime::L1Bmin => {
            let (d1, b_min, eps_out) = match regime {
                Regime::Bicriteria => {
                    if !(eps > 0.0 && eps <= 1.0) {
                        return Err(Error::Regime(format!("bicriteria needs eps in (0, 1], got {eps}")));
                    }
                    (stats.delta1 / eps, 1.0, eps)
                }
                Regime::L1Bmin => (stats.delta1, stats.b_min, 0.0),
                _ => (stats.delta1, 1.0, 0.0),
            };
            if !(d1 > 1.0) {
                return Err(Error::Regime(format!("l1 regimes need delta1 > 1, got {d1}")));
            }
            if !(b_min >= 1.0) {
                return Err(Error::Regime(format!("b_min must be at least 1, got {b_min}")));
            }
            let l = d1.ln() / b_min;
            let base = l + l.ln();
            let (gamma, alpha, worst) = calibrate(base, d1.ln(), b_min);
            constants_used.insert("gamma".into(), gamma);
            constants_used.insert("worst_log_tail_ratio".into(), worst);
            constants_used.insert("fix_constant".into(), L1_FIX_CONSTANT);
            Ok(finish(alpha, 0.0, eps_out, constants_used))
        }
        Regime::L1Small => {
            let d1 = stats.delta1;
            if !(d1 > 0.0 && d1 < 1.0) {
                return Err(Error::Regime(format!("small regime needs delta1 < 1, got {d1}")));
            }
            let delta = 2.0 * (d1 * (1.0 / d1).ln()).sqrt();
            if !(delta < 0.5) {
                return Err(Error::Regime(format!(
                    "small regime needs delta = 2 sqrt(delta1 ln(1/delta1)) < 1/2, got {delta}"
                )));
            }
            let alpha = (1.0 + delta + delta * delta / 2.0) / (1.0 - delta);
            constants_used.insert("delta".into(), delta);
            Ok(finish(alpha, delta, 0.0, constants_used))
        }
    }
}
