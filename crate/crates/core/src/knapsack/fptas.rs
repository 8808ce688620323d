//! Cost-truncation DP over expensive items plus a greedy fill with cheap ones.
//!
//! Sizes and costs are converted to fixed point so that different callers
//! (this standalone solver and both LP oracle backends) reach bit-identical
//! decisions.

use super::{KnapsackCoverProblem, KnapsackSolution, KC_TOL};
use crate::error::{Error, Result};

pub(crate) const SIZE_BITS: i32 = 80;
pub(crate) const COST_BITS: i32 = 60;

pub(crate) fn to_fx(v: f64, bits: i32) -> u128 {
    debug_assert!(v >= 0.0 && v.is_finite());
    (v * 2f64.powi(bits)).round() as u128
}

#[allow(dead_code)]
pub(crate) fn from_fx(v: u128, bits: i32) -> f64 {
    v as f64 / 2f64.powi(bits)
}

/// Cost grid for one β. The working accuracy is a fifth of the requested
/// one: truncation, the greedy fill and the cheap-item cutoff each lose a
/// share of it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Scale {
    pub eps: f64,
    pub beta: f64,
    pub unit: f64,
    pub max_level: usize,
}

impl Scale {
    pub fn new(eps: f64, beta: f64) -> Self {
        let e = eps / 5.0;
        Scale {
            eps: e,
            beta,
            unit: e * e * beta,
            max_level: (4.0 / (e * e)).ceil() as usize,
        }
    }

    pub fn is_expensive(&self, cost: f64) -> bool {
        cost >= self.eps * self.beta
    }

    /// Truncated cost level of an expensive item, `None` past the grid.
    pub fn level(&self, cost: f64) -> Option<usize> {
        let t = (cost / self.unit).floor();
        (t <= self.max_level as f64).then(|| (t as usize).max(1))
    }

    pub fn cost_fx(&self, cost: f64) -> u128 {
        to_fx(cost / self.beta, COST_BITS)
    }

    /// At most this many items of one level fit under the grid.
    pub fn quota(&self, level: usize) -> usize {
        self.max_level / level.max(1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct DpItem {
    pub level: usize,
    pub size: u128,
    pub cost: u128,
}

/// Ratio-ordered cheap items. `cover` returns the cost of the shortest prefix
/// whose size reaches `need`, together with where that prefix ends.
pub(crate) trait CheapPrefix {
    type Cut;
    fn cover(&self, need: u128) -> Option<(u128, Self::Cut)>;
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct CoreAnswer<C> {
    pub value: u128,
    pub taken: Vec<usize>,
    pub cut: Option<C>,
}

/// Exact-level DP over expensive items with dominance pruning, then a cheap
/// greedy fill for every surviving state. A state is dropped when one at the
/// same or a lower level covers at least as much for at most the same cost.
pub(crate) fn dp_greedy<P: CheapPrefix>(
    items: &[DpItem],
    max_level: usize,
    demand: u128,
    tol: u128,
    cheap: &P,
) -> Option<CoreAnswer<P::Cut>> {
    // (item, parent) links for reconstruction.
    let mut links: Vec<(usize, usize)> = Vec::new();
    // (level, coverage, cost, link); usize::MAX links the empty set.
    let mut states: Vec<(usize, u128, u128, usize)> = vec![(0, 0, 0, usize::MAX)];
    let mut merged = Vec::new();
    let mut stair: Vec<(u128, u128)> = Vec::new();
    for (e, it) in items.iter().enumerate() {
        debug_assert!(it.level >= 1);
        if it.level > max_level {
            continue;
        }
        merged.clear();
        let mut a = 0;
        let mut grown = states
            .iter()
            .take_while(|s| s.0 + it.level <= max_level)
            .map(|s| (s.0 + it.level, (s.1 + it.size).min(demand), s.2 + it.cost, s.3))
            .peekable();
        loop {
            let take_old = match (states.get(a), grown.peek()) {
                (None, None) => break,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (Some(o), Some(g)) => o.0 < g.0 || (o.0 == g.0 && !(g.1 > o.1 || (g.1 == o.1 && g.2 < o.2))),
            };
            if take_old {
                let o = states[a];
                a += 1;
                if grown.peek().is_some_and(|g| g.0 == o.0) {
                    grown.next();
                }
                merged.push(o);
            } else {
                let g = grown.next().unwrap();
                if states.get(a).is_some_and(|o| o.0 == g.0) {
                    a += 1;
                }
                links.push((e, g.3));
                merged.push((g.0, g.1, g.2, links.len() - 1));
            }
        }
        // (coverage, cost) staircase of the kept states, both ascending.
        stair.clear();
        states.clear();
        for &s in &merged {
            let hi = stair.partition_point(|t: &(u128, u128)| t.0 < s.1);
            if stair.get(hi).is_some_and(|t| t.1 <= s.2) {
                continue;
            }
            let lo = stair[..hi].partition_point(|t| t.1 < s.2);
            let end = if stair.get(hi).is_some_and(|t| t.0 == s.1) { hi + 1 } else { hi };
            stair.splice(lo..end, [(s.1, s.2)]);
            states.push(s);
        }
    }

    let mut best: Option<(u128, usize, Option<P::Cut>)> = None;
    for (k, &(_, cov, cost, _)) in states.iter().enumerate() {
        if let Some((v, _, _)) = &best {
            if cost >= *v {
                continue;
            }
        }
        let (extra, cut) = if cov + tol >= demand {
            (0, None)
        } else {
            match cheap.cover(demand - tol - cov) {
                Some((c, cut)) => (c, Some(cut)),
                None => continue,
            }
        };
        let v = cost + extra;
        if best.as_ref().map_or(true, |b| v < b.0) {
            best = Some((v, k, cut));
        }
    }
    let (value, k, cut) = best?;
    let mut taken = Vec::new();
    let mut at = states[k].3;
    while at != usize::MAX {
        taken.push(links[at].0);
        at = links[at].1;
    }
    taken.reverse();
    Some(CoreAnswer { value, taken, cut })
}

/// Prefix sums over cheap items with per-item unit counts.
#[derive(Clone, Debug, Default)]
pub(crate) struct SortedCheap {
    pub owners: Vec<usize>,
    size: Vec<u128>,
    cost: Vec<u128>,
    units: Vec<u64>,
    cum_size: Vec<u128>,
    cum_cost: Vec<u128>,
}

impl SortedCheap {
    /// `entries` in ratio order: (owner, unit size, unit cost, units).
    pub fn new(entries: impl IntoIterator<Item = (usize, u128, u128, u64)>) -> Self {
        let mut s = SortedCheap { cum_size: vec![0], cum_cost: vec![0], ..Default::default() };
        for (owner, size, cost, units) in entries {
            s.owners.push(owner);
            s.size.push(size);
            s.cost.push(cost);
            s.units.push(units);
            s.cum_size.push(s.cum_size.last().unwrap() + size * units as u128);
            s.cum_cost.push(s.cum_cost.last().unwrap() + cost * units as u128);
        }
        s
    }
}

impl CheapPrefix for SortedCheap {
    /// (position of the last item used, units of it used)
    type Cut = (usize, u64);

    fn cover(&self, need: u128) -> Option<(u128, (usize, u64))> {
        if *self.cum_size.last().unwrap() < need {
            return None;
        }
        let p = self.cum_size[1..].partition_point(|&c| c < need);
        let rem = need - self.cum_size[p];
        let units = rem.div_ceil(self.size[p]).max(1) as u64;
        debug_assert!(units <= self.units[p]);
        Some((self.cum_cost[p] + self.cost[p] * units as u128, (p, units)))
    }
}

pub fn kc_fptas(p: &KnapsackCoverProblem, eps: f64, beta: f64) -> Result<KnapsackSolution> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0, 1], got {eps}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    let sc = Scale::new(eps, beta);
    let b = p.demand();
    let size_fx = |s: f64| to_fx(s.min(b) / b, SIZE_BITS).max(1);
    let items = p.items();

    let cheap = SortedCheap::new(
        p.ratio_order()
            .into_iter()
            .filter(|&k| !sc.is_expensive(items[k].cost))
            .map(|k| (k, size_fx(items[k].size), sc.cost_fx(items[k].cost), p.useful_cap(k))),
    );

    let mut exp: Vec<(usize, u128, usize, usize)> = (0..items.len())
        .filter(|&k| sc.is_expensive(items[k].cost))
        .filter_map(|k| sc.level(items[k].cost).map(|l| (l, size_fx(items[k].size), items[k].id, k)))
        .collect();
    exp.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));
    let mut dp = Vec::new();
    let mut owner = Vec::new();
    let mut used_at: Option<(usize, usize)> = None;
    for &(level, size, _, k) in &exp {
        let used = match used_at {
            Some((l, u)) if l == level => u,
            _ => 0,
        };
        let copies = (p.useful_cap(k) as usize).min(sc.quota(level).saturating_sub(used));
        for _ in 0..copies {
            dp.push(DpItem { level, size, cost: sc.cost_fx(items[k].cost) });
            owner.push(k);
        }
        used_at = Some((level, used + copies));
    }

    let tol = to_fx(KC_TOL, SIZE_BITS);
    let ans = dp_greedy(&dp, sc.max_level, 1u128 << SIZE_BITS, tol, &cheap).ok_or(Error::StaleBeta)?;
    let mut mult = vec![0u64; items.len()];
    for e in ans.taken {
        mult[owner[e]] += 1;
    }
    if let Some((pos, units)) = ans.cut {
        for q in 0..pos {
            mult[cheap.owners[q]] += p.useful_cap(cheap.owners[q]);
        }
        mult[cheap.owners[pos]] += units;
    }
    Ok(p.solution(mult))
}
