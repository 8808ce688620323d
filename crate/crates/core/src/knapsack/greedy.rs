use super::{kc_covers, KnapsackCoverProblem, KnapsackSolution};
use crate::error::{Error, Result};

/// Ratio-order greedy: the cheaper of the covering prefix and the prefix
/// without its last unit plus the cheapest single unit covering what remains.
pub fn kc_greedy(p: &KnapsackCoverProblem) -> Result<KnapsackSolution> {
    let items = p.items();
    let mut mult = vec![0u64; items.len()];
    let mut cov = 0.0;
    let mut last = None;
    for k in p.ratio_order() {
        if kc_covers(cov, p.demand()) {
            break;
        }
        let it = &items[k];
        let need = ((p.demand() - cov) / it.size * (1.0 - super::KC_TOL)).ceil().max(1.0) as u64;
        let take = it.cap.min_with(need);
        mult[k] = take;
        cov += it.size * take as f64;
        last = Some(k);
    }
    if !kc_covers(cov, p.demand()) {
        return Err(Error::Infeasible("items cannot reach the demand".into()));
    }
    let prefix = p.solution(mult.clone());
    let Some(last) = last else { return Ok(prefix) };

    mult[last] -= 1;
    let base = p.solution(mult.clone());
    let residual = p.demand() - base.coverage;
    let mut best: Option<usize> = None;
    for (k, it) in items.iter().enumerate() {
        if !it.cap.admits(mult[k] + 1) || !kc_covers(it.size, residual) {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => it.cost < items[b].cost || (it.cost == items[b].cost && it.id < items[b].id),
        };
        if better {
            best = Some(k);
        }
    }
    if let Some(k) = best {
        mult[k] += 1;
        let alt = p.solution(mult);
        if alt.cost < prefix.cost {
            return Ok(alt);
        }
    }
    Ok(prefix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Mult;
    use crate::knapsack::unit_items;

    #[test]
    fn traces_ratio_order() {
        let p = KnapsackCoverProblem::new(unit_items(&[1.0, 2.0, 3.0], &[4.0, 3.0, 2.0], Mult::Finite(1)), 5.0)
            .unwrap();
        let s = kc_greedy(&p).unwrap();
        assert_eq!(s.mult, vec![1, 1, 0]);
        assert_eq!(s.cost, 3.0);
    }

    #[test]
    fn single_item_exact_cover() {
        let p = KnapsackCoverProblem::new(unit_items(&[2.0], &[5.0], Mult::Finite(1)), 5.0).unwrap();
        assert_eq!(kc_greedy(&p).unwrap().cost, 2.0);
    }

    #[test]
    fn swaps_in_big_item() {
        // tiny cheap item first in ratio order, then a poor-ratio big item
        let p = KnapsackCoverProblem::new(unit_items(&[0.01, 10.0, 1.5], &[0.1, 10.0, 1.0], Mult::Finite(1)), 1.0)
            .unwrap();
        let s = kc_greedy(&p).unwrap();
        assert_eq!(s.mult, vec![1, 0, 1]);
        assert!((s.cost - 1.51).abs() < 1e-12);
    }
}
