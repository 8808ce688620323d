use super::{kc_covers, KnapsackCoverProblem, KnapsackSolution};
use crate::error::{Error, Result};

const MAX_ITEMS: usize = 24;
const MAX_CAP: u64 = 3;

/// Exhaustive minimum-cost cover. Depth-first in lexicographic order of the
/// multiplicity vector, so the first optimum found is the lexicographically
/// smallest one.
pub fn kc_exact(p: &KnapsackCoverProblem) -> Result<KnapsackSolution> {
    let n = p.items().len();
    if n > MAX_ITEMS {
        return Err(Error::OracleScale(format!("{n} items exceed the limit of {MAX_ITEMS}")));
    }
    let caps: Vec<u64> = (0..n).map(|k| p.useful_cap(k)).collect();
    if let Some(k) = caps.iter().position(|&c| c > MAX_CAP) {
        return Err(Error::OracleScale(format!(
            "item {} needs {} copies, limit is {MAX_CAP}",
            p.items()[k].id,
            caps[k]
        )));
    }
    let mut suffix_reach = vec![0.0; n + 1];
    for k in (0..n).rev() {
        suffix_reach[k] = suffix_reach[k + 1] + p.items()[k].size * caps[k] as f64;
    }
    if !kc_covers(suffix_reach[0], p.demand()) {
        return Err(Error::Infeasible("items cannot reach the demand".into()));
    }
    let mut search = Search {
        p,
        caps: &caps,
        suffix_reach: &suffix_reach,
        cur: vec![0; n],
        best: None,
    };
    search.dfs(0, 0.0, 0.0);
    let (mult, _) = search.best.ok_or_else(|| Error::Infeasible("no cover found".into()))?;
    Ok(p.solution(mult))
}

struct Search<'a> {
    p: &'a KnapsackCoverProblem,
    caps: &'a [u64],
    suffix_reach: &'a [f64],
    cur: Vec<u64>,
    best: Option<(Vec<u64>, f64)>,
}

impl Search<'_> {
    fn improves(&self, cost: f64) -> bool {
        match &self.best {
            None => true,
            Some((_, b)) => cost < b - 1e-12 * b.abs().max(1.0),
        }
    }

    fn dfs(&mut self, k: usize, cost: f64, cov: f64) {
        if !self.improves(cost) {
            return;
        }
        if kc_covers(cov, self.p.demand()) {
            self.best = Some((self.cur.clone(), cost));
            return;
        }
        if k == self.cur.len() || !kc_covers(cov + self.suffix_reach[k], self.p.demand()) {
            return;
        }
        let it = &self.p.items()[k];
        for v in 0..=self.caps[k] {
            self.cur[k] = v;
            self.dfs(k + 1, cost + it.cost * v as f64, cov + it.size * v as f64);
        }
        self.cur[k] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Mult;
    use crate::knapsack::{unit_items, KcItem};

    #[test]
    fn small_examples() {
        let p = KnapsackCoverProblem::new(unit_items(&[1.0, 2.0, 3.0], &[4.0, 3.0, 2.0], Mult::Finite(1)), 5.0)
            .unwrap();
        let s = kc_exact(&p).unwrap();
        assert_eq!(s.mult, vec![1, 1, 0]);
        assert_eq!(s.cost, 3.0);

        let p = KnapsackCoverProblem::new(
            vec![KcItem { id: 0, cost: 7.0, size: 5.0, cap: Mult::Finite(2) }],
            9.0,
        )
        .unwrap();
        let s = kc_exact(&p).unwrap();
        assert_eq!((s.mult.clone(), s.cost), (vec![2], 14.0));

        let p = KnapsackCoverProblem::new(
            unit_items(&[3.0, 1.0, 0.5], &[0.9, 0.5, 0.2], Mult::Unbounded),
            0.5,
        )
        .unwrap();
        assert_eq!(kc_exact(&p).unwrap().cost, 1.0);
    }

    #[test]
    fn lexicographic_tie_break() {
        let p = KnapsackCoverProblem::new(unit_items(&[1.0, 1.0], &[1.0, 1.0], Mult::Finite(1)), 1.0).unwrap();
        assert_eq!(kc_exact(&p).unwrap().mult, vec![0, 1]);
    }

    #[test]
    fn budget_refusal() {
        let p = KnapsackCoverProblem::new(unit_items(&[1.0; 25], &[1.0; 25], Mult::Finite(1)), 3.0).unwrap();
        assert!(matches!(kc_exact(&p), Err(Error::OracleScale(_))));
        let p = KnapsackCoverProblem::new(unit_items(&[1.0], &[1.0], Mult::Unbounded), 10.0).unwrap();
        assert!(matches!(kc_exact(&p), Err(Error::OracleScale(_))));
    }
}
