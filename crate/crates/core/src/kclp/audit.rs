//! Runs the naive backend in lockstep with the accelerated one and fails on
//! the first disagreement.

use super::accel::Accelerated;
use super::naive::Naive;
use super::oracle::{Answer, Backend, QueryParams, Weights};
use super::prep::Prepared;
use crate::error::{Error, Result};

pub(crate) struct Audit {
    pub accel: Accelerated,
    naive: Naive,
    shadow: Weights,
}

impl Audit {
    pub fn new(pr: &Prepared, ws: &Weights) -> Self {
        let mut accel = Accelerated::new(pr);
        accel.list_prefixes = true;
        Audit { accel, naive: Naive, shadow: ws.clone() }
    }

    fn levels_agree(&self, ws: &Weights, what: &str) -> Result<()> {
        if ws.level != self.shadow.level {
            let j = (0..ws.level.len()).find(|&j| ws.level[j] != self.shadow.level[j]).unwrap_or(0);
            return Err(Error::BackendDivergence(format!(
                "after {what}: column {j} at level {} (accelerated) vs {} (naive)",
                ws.level[j], self.shadow.level[j]
            )));
        }
        Ok(())
    }
}

impl Backend for Audit {
    fn rebuild(&mut self, pr: &Prepared, ws: &Weights, beta: f64) -> Result<()> {
        self.accel.rebuild(pr, ws, beta)?;
        self.naive.rebuild(pr, &self.shadow, beta)
    }

    fn query(&mut self, pr: &Prepared, ws: &Weights, p: usize, qp: &QueryParams) -> Result<Option<Answer>> {
        let a = self.accel.query(pr, ws, p, qp)?;
        let b = self.naive.query(pr, &self.shadow, p, qp)?;
        let same = match (&a, &b) {
            (None, None) => true,
            (Some(x), Some(y)) => x.same_pick(y) && x.cheap == y.cheap,
            _ => false,
        };
        if !same {
            return Err(Error::BackendDivergence(format!(
                "pair {p}: accelerated {:?} vs naive {:?}",
                a.as_ref().map(|x| (x.value_fx, &x.exp, x.cheap_len)),
                b.as_ref().map(|y| (y.value_fx, &y.exp, y.cheap_len))
            )));
        }
        Ok(a)
    }

    fn activate(&mut self, pr: &Prepared, ws: &Weights, p: usize) -> Result<()> {
        self.accel.activate(pr, ws, p)
    }

    fn apply(&mut self, pr: &Prepared, ws: &mut Weights, p: usize, ans: &Answer, delta: u128) -> Result<bool> {
        let s1 = self.accel.apply(pr, ws, p, ans, delta)?;
        let s2 = self.naive.apply(pr, &mut self.shadow, p, ans, delta)?;
        self.levels_agree(ws, "a pick")?;
        if s1 != s2 {
            return Err(Error::BackendDivergence("backends disagree on stopping".into()));
        }
        Ok(s1)
    }

    fn flush(&mut self, pr: &Prepared, ws: &mut Weights, p: usize) -> Result<()> {
        self.accel.flush(pr, ws, p)?;
        if ws.ell != self.shadow.ell {
            let j = (0..ws.ell.len()).find(|&j| ws.ell[j] != self.shadow.ell[j]).unwrap_or(0);
            return Err(Error::BackendDivergence(format!("after flushing pair {p}: weights of column {j} differ")));
        }
        self.levels_agree(ws, "a flush")
    }
}
