//! Rebuilds every pair's item lists from the current weights on each query.

use super::oracle::{classify, select_expensive, Answer, Backend, Class, Key, QueryParams, Weights};
use super::prep::Prepared;
use crate::error::Result;
use crate::knapsack::fptas::{dp_greedy, SortedCheap, SIZE_BITS};

#[derive(Default)]
pub(crate) struct Naive;

impl Backend for Naive {
    fn rebuild(&mut self, _: &Prepared, _: &Weights, _: f64) -> Result<()> {
        Ok(())
    }

    fn query(&mut self, pr: &Prepared, ws: &Weights, p: usize, qp: &QueryParams) -> Result<Option<Answer>> {
        let pair = &pr.pairs[p];
        let row = &pr.rows[pair.row];
        let mut cheap = Vec::new();
        let mut exp = Vec::new();
        for (q, &(j, _)) in row.iter().enumerate() {
            match classify(pr, ws, p, q, &qp.scale) {
                Class::Cheap { ratio, size, cost } => cheap.push((Key { ratio, j }, q as u32, size, cost)),
                Class::Exp { level, size, cost } => exp.push((level, size, cost, q as u32, j)),
                Class::Out => {}
            }
        }
        cheap.sort_by(|a, b| a.0.cmp(&b.0));
        exp.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)).then(a.4.cmp(&b.4)));
        let (dp, owner) = select_expensive(exp.iter().map(|e| (e.0, e.1, e.2, e.3)), qp.max_level);
        let sorted = SortedCheap::new(cheap.iter().map(|c| (c.1 as usize, c.2, c.3, 1)));

        let Some(core) = dp_greedy(&dp, qp.max_level, 1u128 << SIZE_BITS, pair.tol_fx, &sorted) else {
            return Ok(None);
        };
        let mut exp_q: Vec<u32> = core.taken.iter().map(|&e| owner[e]).collect();
        exp_q.sort_unstable();
        let cheap_q: Vec<u32> = match core.cut {
            Some((pos, _)) => cheap[..=pos].iter().map(|c| c.1).collect(),
            None => Vec::new(),
        };
        let g_max = exp_q
            .iter()
            .chain(&cheap_q)
            .map(|&q| pr.g_fx[pair.off + q as usize])
            .max()
            .unwrap_or(0);
        Ok(Some(Answer {
            value_fx: core.value,
            exp: exp_q,
            cheap_len: cheap_q.len(),
            cut: core.cut.map(|(pos, _)| cheap[pos].0),
            cheap: cheap_q,
            g_max,
        }))
    }

    fn activate(&mut self, _: &Prepared, _: &Weights, _: usize) -> Result<()> {
        Ok(())
    }

    fn apply(&mut self, pr: &Prepared, ws: &mut Weights, p: usize, ans: &Answer, delta: u128) -> Result<bool> {
        let pair = &pr.pairs[p];
        let row = &pr.rows[pair.row];
        let mut stop = false;
        for &q in ans.exp.iter().chain(&ans.cheap) {
            let j = row[q as usize].0 as usize;
            ws.add(pr, j, delta * pr.g_fx[pair.off + q as usize]);
            stop |= ws.reached_stop(pr, j);
        }
        Ok(stop)
    }

    fn flush(&mut self, _: &Prepared, _: &mut Weights, _: usize) -> Result<()> {
        Ok(())
    }
}
