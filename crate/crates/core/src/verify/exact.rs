use crate::error::{Error, Result};
use crate::instance::{covers, CoveringInstance};
use serde::{Deserialize, Serialize};

const MAX_COLUMNS: usize = 12;
const MAX_BOX: f64 = 1e7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactSolution {
    pub z: Vec<u64>,
    pub cost: f64,
}

/// Branch and bound over `0 ≤ z ≤ D` in lexicographic order; the first
/// optimum reached is the lexicographically smallest one.
pub fn exact_ilp(inst: &CoveringInstance) -> Result<ExactSolution> {
    let n = inst.n();
    if n > MAX_COLUMNS {
        return Err(Error::OracleScale(format!("{n} columns exceed the limit of {MAX_COLUMNS}")));
    }
    let caps = inst.effective_caps();
    let size: f64 = caps.iter().map(|&d| d as f64 + 1.0).product();
    if size > MAX_BOX {
        return Err(Error::OracleScale(format!("search box has {size} points, limit {MAX_BOX}")));
    }
    // reach[j][i]: coverage of row i available from columns j.. at their caps
    let mut reach = vec![vec![0.0; inst.m()]; n + 1];
    for j in (0..n).rev() {
        reach[j] = reach[j + 1].clone();
        for &(i, a) in inst.col(j) {
            reach[j][i] += a * caps[j] as f64;
        }
    }
    if (0..inst.m()).any(|i| !covers(reach[0][i], inst.b()[i])) {
        return Err(Error::Infeasible("z = d leaves a row uncovered".into()));
    }
    let mut bb = Bb {
        inst,
        caps: &caps,
        reach: &reach,
        cov: vec![0.0; inst.m()],
        cur: vec![0; n],
        best: None,
    };
    bb.dfs(0, 0.0);
    let (z, cost) = bb.best.ok_or_else(|| Error::Infeasible("no integral cover".into()))?;
    Ok(ExactSolution { z, cost })
}

struct Bb<'a> {
    inst: &'a CoveringInstance,
    caps: &'a [u64],
    reach: &'a [Vec<f64>],
    cov: Vec<f64>,
    cur: Vec<u64>,
    best: Option<(Vec<u64>, f64)>,
}

impl Bb<'_> {
    fn dfs(&mut self, j: usize, cost: f64) {
        if let Some((_, b)) = &self.best {
            if cost >= b - 1e-12 * b.abs().max(1.0) {
                return;
            }
        }
        let b = self.inst.b();
        if (0..self.inst.m()).all(|i| covers(self.cov[i], b[i])) {
            self.best = Some((self.cur.clone(), cost));
            return;
        }
        if j == self.cur.len() {
            return;
        }
        if (0..self.inst.m()).any(|i| !covers(self.cov[i] + self.reach[j][i], b[i])) {
            return;
        }
        let cj = self.inst.c()[j];
        for v in 0..=self.caps[j] {
            if v > 0 {
                for &(i, a) in self.inst.col(j) {
                    self.cov[i] += a;
                }
            }
            self.cur[j] = v;
            self.dfs(j + 1, cost + cj * v as f64);
        }
        for &(i, a) in self.inst.col(j) {
            self.cov[i] -= a * self.caps[j] as f64;
        }
        self.cur[j] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_gap_example, Mult};

    #[test]
    fn gap_and_identity() {
        let s = exact_ilp(&gen_gap_example(10.0).unwrap()).unwrap();
        assert_eq!((s.z, s.cost), (vec![1, 0], 1.0));
        let id = CoveringInstance::new(vec![1.0; 3], vec![1.0; 3], vec![Mult::Finite(1); 3], (0..3).map(|i| (i, i, 1.0)))
            .unwrap();
        assert_eq!(exact_ilp(&id).unwrap().cost, 3.0);
    }

    #[test]
    fn refuses_large() {
        let inst = CoveringInstance::new(vec![1.0; 13], vec![1.0], vec![Mult::Finite(1); 13], (0..13).map(|j| (0, j, 1.0)))
            .unwrap();
        assert!(matches!(exact_ilp(&inst), Err(Error::OracleScale(_))));
    }
}
