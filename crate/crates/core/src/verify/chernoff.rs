use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `exp{β + β ln(μ/β) − μ}` for variables in [0, 1].
pub fn normalized_bound(mu: f64, beta: f64) -> f64 {
    (beta + beta * (mu / beta).ln() - mu).exp()
}

/// `exp{(1/γ)(1 + ln μ − μ)}`: threshold 1, variables in [0, γ].
pub fn unscaled_bound(gamma: f64, mu: f64) -> f64 {
    ((1.0 + mu.ln() - mu) / gamma).exp()
}

/// `normalized_bound(μ, β)^{1/γ}`: variables in [0, γ].
pub fn unnormalized_bound(gamma: f64, mu: f64, beta: f64) -> f64 {
    normalized_bound(mu, beta).powf(1.0 / gamma)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChernoffReport {
    pub gamma: f64,
    pub mu: f64,
    pub beta: f64,
    pub variables: usize,
    pub p: f64,
    pub samples: usize,
    pub bound: f64,
    pub estimate: f64,
    pub slack: f64,
    pub pass: bool,
}

const CHUNK: usize = 4096;

/// Samples `Σ X_i` for `X_i = γ·Bernoulli(p)` with `⌈2μ/γ⌉` variables and
/// `E[Σ X] = μ`, estimates `P[Σ X < β]` and compares it with the closed form.
pub fn chernoff_check(gamma: f64, mu: f64, beta: f64, samples: usize, seed: u64) -> Result<ChernoffReport> {
    if !(gamma > 0.0 && gamma.is_finite() && beta > 0.0 && mu >= beta && mu.is_finite()) {
        return Err(Error::Domain(format!(
            "need gamma > 0 and 0 < beta <= mu, got gamma={gamma} mu={mu} beta={beta}"
        )));
    }
    if samples == 0 {
        return Err(Error::Domain("samples must be positive".into()));
    }
    let variables = (2.0 * mu / gamma).ceil().max(1.0) as usize;
    let p = mu / (variables as f64 * gamma);
    let chunks = samples.div_ceil(CHUNK);
    let below: usize = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let count = CHUNK.min(samples - k * CHUNK);
            (0..count)
                .filter(|_| {
                    let hits = (0..variables).filter(|_| rng.gen::<f64>() < p).count();
                    (hits as f64) * gamma < beta
                })
                .count()
        })
        .sum();
    let estimate = below as f64 / samples as f64;
    let bound = unnormalized_bound(gamma, mu, beta);
    let slack = 3.0 * (bound.min(1.0) * (1.0 - bound.min(1.0)) / samples as f64).sqrt();
    Ok(ChernoffReport {
        gamma,
        mu,
        beta,
        variables,
        p,
        samples,
        bound,
        estimate,
        slack,
        pass: estimate <= bound + slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let b = unscaled_bound(1.0, 10.0);
        assert!((b - (-6.697f64).exp()).abs() < 1e-5);
        assert!((normalized_bound(10.0, 1.0) - b).abs() < 1e-15);
        assert_eq!(normalized_bound(4.0, 4.0), 1.0);
        let half = unnormalized_bound(0.5, 10.0, 1.0);
        assert!((half / (b * b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_tail_below_bound() {
        let r = chernoff_check(1.0, 10.0, 1.0, 20_000, 3).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(chernoff_check(1.0, 1.0, 2.0, 10, 1).is_err());
    }
}
