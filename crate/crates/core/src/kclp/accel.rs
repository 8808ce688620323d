//! Persistent per-pair structures: cheap items in a ratio-ordered treap with
//! lazy step credits, expensive items in (level, size) order. An item is
//! touched individually only when its weight level changes; it is then marked
//! in every pair that contains it and re-filed when that pair is next used.

use super::oracle::{classify, select_expensive, Answer, Backend, Class, Key, QueryParams, Weights};
use super::prep::Prepared;
use super::treap::Treap;
use crate::error::{Error, Result};
use crate::knapsack::fptas::{dp_greedy, Scale, SIZE_BITS};
use std::cmp::Reverse;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug)]
enum Slot {
    Out,
    Cheap(Key),
    Exp { level: u32, size: u128 },
}

#[derive(Default)]
struct PairState {
    cheap: Treap,
    exp: BTreeMap<(u32, Reverse<u128>, u32), (u128, u32)>,
    slots: Vec<Slot>,
    dirty: Vec<u32>,
    marked: Vec<bool>,
}

pub(crate) struct Accelerated {
    pairs: Vec<PairState>,
    scale: Option<Scale>,
    /// Filled cheap prefixes into answers (needed by audits and transcripts).
    pub list_prefixes: bool,
}

impl Accelerated {
    pub fn new(pr: &Prepared) -> Self {
        let pairs = pr
            .pairs
            .iter()
            .map(|p| {
                let len = pr.rows[p.row].len();
                PairState { slots: vec![Slot::Out; len], marked: vec![false; len], ..Default::default() }
            })
            .collect();
        Accelerated { pairs, scale: None, list_prefixes: false }
    }

    fn place(&mut self, pr: &Prepared, ws: &Weights, p: usize, q: usize) {
        let sc = self.scale.expect("placed before the first rebuild");
        let j = pr.rows[pr.pairs[p].row][q].0;
        let st = &mut self.pairs[p];
        st.slots[q] = match classify(pr, ws, p, q, &sc) {
            Class::Cheap { ratio, size, cost } => {
                let key = Key { ratio, j };
                let g = pr.g_fx[pr.pairs[p].off + q];
                st.cheap.insert(key, q as u32, size, cost, g, ws.headroom(pr, j as usize), p as u64);
                Slot::Cheap(key)
            }
            Class::Exp { level, size, cost } => {
                st.exp.insert((level, Reverse(size), j), (cost, q as u32));
                Slot::Exp { level, size }
            }
            Class::Out => Slot::Out,
        };
    }

    /// Removes item q from pair p; returns its pending credit `acc·g`.
    fn unplace(&mut self, pr: &Prepared, p: usize, q: usize) -> u128 {
        let j = pr.rows[pr.pairs[p].row][q].0;
        let st = &mut self.pairs[p];
        let credit = match st.slots[q] {
            Slot::Out => 0,
            Slot::Cheap(key) => st.cheap.remove(&key).map_or(0, |r| r.acc * r.g),
            Slot::Exp { level, size, .. } => {
                st.exp.remove(&(level, Reverse(size), j));
                0
            }
        };
        st.slots[q] = Slot::Out;
        credit
    }

    /// Marks column j for re-filing everywhere after its level changed.
    fn relocate(&mut self, pr: &Prepared, j: usize) {
        for &(i, q) in &pr.col_pos[j] {
            for p in pr.row_pairs[i as usize].clone() {
                let st = &mut self.pairs[p];
                if !st.marked[q as usize] {
                    st.marked[q as usize] = true;
                    st.dirty.push(q);
                }
            }
        }
    }

    fn clean(&mut self, pr: &Prepared, ws: &Weights, p: usize) {
        let dirty = std::mem::take(&mut self.pairs[p].dirty);
        for &q in &dirty {
            self.pairs[p].marked[q as usize] = false;
            let pending = self.unplace(pr, p, q as usize);
            debug_assert_eq!(pending, 0, "re-filing an item with pending credit");
            self.place(pr, ws, p, q as usize);
        }
        let mut dirty = dirty;
        dirty.clear();
        self.pairs[p].dirty = dirty;
    }
}

impl Backend for Accelerated {
    fn rebuild(&mut self, pr: &Prepared, ws: &Weights, beta: f64) -> Result<()> {
        self.scale = Some(Scale::new(pr.eps, beta));
        for p in 0..pr.pairs.len() {
            let st = &mut self.pairs[p];
            st.cheap.clear();
            st.exp.clear();
            st.slots.iter_mut().for_each(|s| *s = Slot::Out);
            st.marked.iter_mut().for_each(|m| *m = false);
            st.dirty.clear();
            for q in 0..st.slots.len() {
                self.place(pr, ws, p, q);
            }
        }
        Ok(())
    }

    fn query(&mut self, pr: &Prepared, ws: &Weights, p: usize, qp: &QueryParams) -> Result<Option<Answer>> {
        if self.scale != Some(qp.scale) {
            return Err(Error::BackendDivergence("query scale differs from the built one".into()));
        }
        self.clean(pr, ws, p);
        let pair = &pr.pairs[p];
        let st = &self.pairs[p];
        let (dp, owner) = select_expensive(
            st.exp.iter().map(|(&(level, Reverse(size), _), &(cost, q))| (level, size, cost, q)),
            qp.max_level,
        );
        let Some(core) = dp_greedy(&dp, qp.max_level, 1u128 << SIZE_BITS, pair.tol_fx, &st.cheap) else {
            return Ok(None);
        };
        let mut exp_q: Vec<u32> = core.taken.iter().map(|&e| owner[e]).collect();
        exp_q.sort_unstable();
        let mut g_max = exp_q.iter().map(|&q| pr.g_fx[pair.off + q as usize]).max().unwrap_or(0);
        let (cut, cheap_len) = match core.cut {
            Some((key, len)) => {
                g_max = g_max.max(st.cheap.prefix_max_g(&key));
                (Some(key), len)
            }
            None => (None, 0),
        };
        let cheap = if self.list_prefixes { st.cheap.prefix_items(cheap_len) } else { Vec::new() };
        Ok(Some(Answer { value_fx: core.value, exp: exp_q, cheap_len, cut, cheap, g_max }))
    }

    fn activate(&mut self, pr: &Prepared, ws: &Weights, p: usize) -> Result<()> {
        self.clean(pr, ws, p);
        let row = &pr.rows[pr.pairs[p].row];
        self.pairs[p].cheap.refresh(&|q| ws.headroom(pr, row[q as usize].0 as usize));
        Ok(())
    }

    fn apply(&mut self, pr: &Prepared, ws: &mut Weights, p: usize, ans: &Answer, delta: u128) -> Result<bool> {
        let pair = &pr.pairs[p];
        let row = &pr.rows[pair.row];
        let mut moved = Vec::new();
        for &q in &ans.exp {
            let j = row[q as usize].0 as usize;
            if ws.add(pr, j, delta * pr.g_fx[pair.off + q as usize]) {
                moved.push(j);
            }
        }
        if let Some(cut) = ans.cut {
            let st = &mut self.pairs[p];
            st.cheap.credit_prefix(&cut, delta);
            for key in st.cheap.triggered() {
                let r = st.cheap.remove(&key).expect("triggered key is present");
                st.slots[r.q as usize] = Slot::Out;
                let j = row[r.q as usize].0 as usize;
                if !ws.add(pr, j, r.acc * r.g) {
                    return Err(Error::BackendDivergence(format!("column {j} triggered without a level change")));
                }
                moved.push(j);
            }
        }
        moved.sort_unstable();
        moved.dedup();
        let mut stop = false;
        for &j in &moved {
            stop |= ws.reached_stop(pr, j);
            self.relocate(pr, j);
        }
        Ok(stop)
    }

    fn flush(&mut self, pr: &Prepared, ws: &mut Weights, p: usize) -> Result<()> {
        let row = &pr.rows[pr.pairs[p].row];
        let mut credits = Vec::new();
        self.pairs[p].cheap.drain(&mut credits);
        for (q, inc) in credits {
            let j = row[q as usize].0 as usize;
            if ws.add(pr, j, inc) {
                return Err(Error::BackendDivergence(format!("column {j} crossed a level while its credit was deferred")));
            }
        }
        Ok(())
    }
}
