use super::prep::{Prepared, ELL_BITS};
use crate::error::Result;
use crate::knapsack::fptas::{to_fx, DpItem, Scale, COST_BITS};

/// Log-weights in fixed point. The effective weight of column j is
/// `(1+ε)^level_j / c_j` with `level_j = ⌊ℓ_j / ln(1+ε)⌋`, within a factor
/// 1+ε of `exp(ℓ_j)/c_j`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Weights {
    pub ell: Vec<u128>,
    pub level: Vec<u32>,
}

impl Weights {
    pub fn new(n: usize) -> Self {
        Weights { ell: vec![0; n], level: vec![0; n] }
    }

    /// Adds `inc` to ℓ_j; returns whether the level moved.
    pub fn add(&mut self, pr: &Prepared, j: usize, inc: u128) -> bool {
        self.ell[j] += inc;
        let k = (self.ell[j] / pr.step_fx) as u32;
        let moved = k != self.level[j];
        self.level[j] = k;
        moved
    }

    pub fn reached_stop(&self, pr: &Prepared, j: usize) -> bool {
        self.level[j] >= pr.k_eta
    }

    /// Log-weight increase that moves column j to its next level.
    pub fn headroom(&self, pr: &Prepared, j: usize) -> u128 {
        (self.level[j] as u128 + 1) * pr.step_fx - self.ell[j]
    }

    pub fn ell_f64(&self, j: usize) -> f64 {
        self.ell[j] as f64 / 2f64.powi(ELL_BITS)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Class {
    Cheap { ratio: f64, size: u128, cost: u128 },
    Exp { level: u32, size: u128, cost: u128 },
    /// Too expensive to appear in any answer under the current β.
    Out,
}

pub(crate) fn item_cost(pr: &Prepared, ws: &Weights, p: usize, q: usize) -> f64 {
    let pair = &pr.pairs[p];
    let j = pr.rows[pair.row][q].0 as usize;
    pr.pow(ws.level[j]) * pr.hat[pair.off + q] / pr.cost[j]
}

pub(crate) fn classify(pr: &Prepared, ws: &Weights, p: usize, q: usize, sc: &Scale) -> Class {
    let kappa = item_cost(pr, ws, p, q);
    let size = pr.size_fx[pr.pairs[p].off + q];
    if !sc.is_expensive(kappa) {
        let cost = sc.cost_fx(kappa);
        return Class::Cheap { ratio: cost as f64 / size as f64, size, cost };
    }
    match sc.level(kappa) {
        Some(level) => Class::Exp { level: level as u32, size, cost: sc.cost_fx(kappa) },
        None => Class::Out,
    }
}

/// Key of a cheap item in ratio order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Key {
    pub ratio: f64,
    pub j: u32,
}

impl Key {
    pub fn cmp(&self, o: &Key) -> std::cmp::Ordering {
        self.ratio.total_cmp(&o.ratio).then(self.j.cmp(&o.j))
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct QueryParams {
    pub scale: Scale,
    pub max_level: usize,
    pub threshold_fx: u128,
}

impl QueryParams {
    pub fn new(eps: f64, beta: f64, lambda: f64) -> Self {
        let scale = Scale::new(eps, beta);
        let threshold = (1.0 + eps) * (1.0 + eps) * lambda;
        QueryParams { scale, max_level: scale.max_level, threshold_fx: to_fx(threshold / beta, COST_BITS) }
    }

    pub fn value(&self, fx: u128) -> f64 {
        fx as f64 / 2f64.powi(COST_BITS) * self.scale.beta
    }
}

/// Expensive items of one pair in (level, size descending, column) order,
/// truncated to the per-level quota.
pub(crate) fn select_expensive(
    sorted: impl Iterator<Item = (u32, u128, u128, u32)>,
    max_level: usize,
) -> (Vec<DpItem>, Vec<u32>) {
    let mut dp = Vec::new();
    let mut owner = Vec::new();
    let mut cur = (0u32, 0usize);
    for (level, size, cost, q) in sorted {
        if level as usize > max_level {
            break;
        }
        if cur.0 != level {
            cur = (level, 0);
        }
        if cur.1 < max_level / level as usize {
            dp.push(DpItem { level: level as usize, size, cost });
            owner.push(q);
            cur.1 += 1;
        }
    }
    (dp, owner)
}

/// A pick: the knapsack solution of one (row, α) pair.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Answer {
    pub value_fx: u128,
    /// Row positions of the expensive items, ascending.
    pub exp: Vec<u32>,
    /// Number of cheap items (a ratio-order prefix) and the last one's key.
    pub cheap_len: usize,
    pub cut: Option<Key>,
    /// Row positions of the cheap prefix; filled by the naive backend only.
    pub cheap: Vec<u32>,
    /// Largest load rate over the picked items.
    pub g_max: u128,
}

impl Answer {
    /// Same decision, ignoring how the cheap prefix is represented.
    pub fn same_pick(&self, o: &Answer) -> bool {
        self.value_fx == o.value_fx
            && self.exp == o.exp
            && self.cheap_len == o.cheap_len
            && self.cut.map(|k| k.j) == o.cut.map(|k| k.j)
            && self.g_max == o.g_max
    }
}

pub(crate) trait Backend {
    /// (Re)classifies every item of every pair for a new β.
    fn rebuild(&mut self, pr: &Prepared, ws: &Weights, beta: f64) -> Result<()>;
    fn query(&mut self, pr: &Prepared, ws: &Weights, p: usize, qp: &QueryParams) -> Result<Option<Answer>>;
    /// Called before the first pick on a pair that was not the last one picked.
    fn activate(&mut self, pr: &Prepared, ws: &Weights, p: usize) -> Result<()>;
    /// Applies `δ·g_j` to every picked item. Returns whether some weight
    /// reached the stopping level.
    fn apply(&mut self, pr: &Prepared, ws: &mut Weights, p: usize, ans: &Answer, delta: u128) -> Result<bool>;
    /// Makes every stored weight of pair p exact.
    fn flush(&mut self, pr: &Prepared, ws: &mut Weights, p: usize) -> Result<()>;
}
