//! Closed-form lower-tail bounds for sums of independent bounded variables.
//!
//! Every caller (α calibration, the pessimistic estimator, the Monte-Carlo
//! checks) evaluates the bounds through these functions so that they agree
//! bit for bit.

/// `P[Σ X < β] ≤ exp((β − μ + β ln(μ/β)) / γ)` for independent `X ∈ [0, γ]`
/// with `E[Σ X] = μ ≥ β > 0`.
pub fn lower_tail(gamma: f64, mu: f64, beta: f64) -> f64 {
    (lower_tail_exponent(mu, beta) / gamma).exp()
}

/// `β − μ + β ln(μ/β)`, never positive when `μ ≥ β`.
pub fn lower_tail_exponent(mu: f64, beta: f64) -> f64 {
    beta - mu + beta * (mu / beta).ln()
}

/// Failure bound of a row after scaling by α when every coefficient is at most 1:
/// `exp(1 + ln α − α)`.
pub fn basic_tail(alpha: f64) -> f64 {
    lower_tail(1.0, alpha, 1.0)
}

/// Failure bound using only the coefficients at most θ, whose scaled mass is
/// at least α/2: `exp((1 + ln(α/2) − α/2)/θ)`.
pub fn median_tail(alpha: f64, theta: f64) -> f64 {
    lower_tail(theta, alpha / 2.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let b = lower_tail(1.0, 10.0, 1.0);
        assert!((b.ln() - (1.0 + 10f64.ln() - 10.0)).abs() < 1e-12);
        assert!((b - 1.23e-3).abs() < 1e-5);
        assert_eq!(lower_tail(1.0, 3.0, 3.0), 1.0);
        let half = lower_tail(0.5, 10.0, 1.0);
        assert!((half / (b * b) - 1.0).abs() < 1e-12);
        assert_eq!(basic_tail(10.0), b);
    }
}
