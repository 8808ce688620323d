use super::{kc_covers, kc_exact, ratio_cmp, KnapsackCoverProblem, KnapsackSolution};
use crate::error::{Error, Result};

fn ceil_tol(v: f64) -> u64 {
    (v - 1e-9).ceil().max(0.0) as u64
}

/// Rounds a fractional cover `y` to an integral one supported on `supp(y)`,
/// costing at most `2·Σκy` with `z_j ≤ ⌈2y_j⌉`.
///
/// Takes `⌊2y⌋`, then adds one unit of each fractional remainder item in
/// ratio order until covered, and finally drops units that are not needed.
/// With sizes clipped to the demand the added
/// units cost no more than the fractional remainder of `2y`.
pub fn kc_round(p: &KnapsackCoverProblem, y: &[f64]) -> Result<KnapsackSolution> {
    let items = p.items();
    if y.len() != items.len() {
        return Err(Error::Dimension { expected: items.len(), got: y.len() });
    }
    if y.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
        return Err(Error::Domain("fractional cover must be nonnegative".into()));
    }
    if !items.iter().zip(y).any(|(_, &v)| v > 0.0) {
        return Err(Error::Precondition("fractional cover has empty support".into()));
    }
    let demand = p.demand();
    let frac_cov: f64 = items.iter().zip(y).map(|(it, &v)| it.size * v).sum();
    if !kc_covers(frac_cov, demand) {
        return Err(Error::Precondition(format!(
            "fractional cover reaches {frac_cov}, demand is {demand}"
        )));
    }
    let bound: Vec<u64> = (0..items.len())
        .map(|k| items[k].cap.min_with(ceil_tol(2.0 * y[k])))
        .collect();

    let mut mult: Vec<u64> = (0..items.len())
        .map(|k| ((2.0 * y[k] + 1e-12).floor() as u64).min(bound[k]))
        .collect();
    let mut cov = p.solution(mult.clone()).coverage;
    let mut order: Vec<usize> = (0..items.len()).filter(|&k| mult[k] < bound[k]).collect();
    order.sort_by(|&a, &b| ratio_cmp(&items[a], &items[b]));
    for &k in &order {
        if kc_covers(cov, demand) {
            break;
        }
        mult[k] += 1;
        cov += items[k].size;
    }
    for &k in &order {
        while !kc_covers(cov, demand) && mult[k] < bound[k] {
            mult[k] += 1;
            cov += items[k].size;
        }
    }
    // drop units that are not needed, worst ratio first
    let mut by_ratio: Vec<usize> = (0..items.len()).filter(|&k| mult[k] > 0).collect();
    by_ratio.sort_by(|&a, &b| ratio_cmp(&items[b], &items[a]));
    for &k in &by_ratio {
        while mult[k] > 0 && kc_covers(cov - items[k].size, demand) {
            mult[k] -= 1;
            cov -= items[k].size;
        }
    }
    let limit = 2.0 * p.fractional_cost(y);
    let within = |s: &KnapsackSolution| {
        kc_covers(s.coverage, demand) && s.cost <= limit * (1.0 + 1e-12) + 1e-12
    };
    let sol = p.solution(mult);
    if within(&sol) {
        return Ok(sol);
    }

    // restrict to the certified box and let the exhaustive oracle decide
    let support: Vec<usize> = (0..items.len()).filter(|&k| bound[k] > 0).collect();
    let sub_items = support
        .iter()
        .map(|&k| {
            let mut it = items[k].clone();
            it.cap = crate::instance::Mult::Finite(bound[k]);
            it
        })
        .collect();
    let fallback = KnapsackCoverProblem::new(sub_items, demand)
        .and_then(|sub| kc_exact(&sub))
        .map_err(|e| Error::Certificate(format!("knapsack rounding exceeded twice the fractional cost ({e})")))?;
    let mut mult = vec![0; items.len()];
    for (q, &k) in support.iter().enumerate() {
        mult[k] = fallback.mult[q];
    }
    let sol = p.solution(mult);
    if within(&sol) {
        Ok(sol)
    } else {
        Err(Error::Certificate(format!(
            "knapsack rounding cost {} exceeds twice the fractional cost {}",
            sol.cost,
            limit
        )))
    }
}
