//! Ratio-ordered treap over the cheap items of one (row, α) pair.
//!
//! Besides size and cost sums each subtree carries the largest load rate and
//! the smallest step credit that would move one of its items to a new weight
//! level. Credits for a whole prefix are added lazily; only items whose
//! level changes are touched individually.

use super::oracle::Key;
use crate::knapsack::fptas::CheapPrefix;
use std::cmp::Ordering;

const NIL: u32 = u32::MAX;
const INF: u128 = u128::MAX;

#[derive(Clone, Debug)]
struct Node {
    key: Key,
    q: u32,
    prio: u64,
    l: u32,
    r: u32,
    size: u128,
    cost: u128,
    g: u128,
    /// Log-weight headroom of the item when its credits were last zero.
    h: u128,
    /// Step credit received since then.
    acc: u128,
    /// Credit still owed to both children.
    lazy: u128,
    sum_s: u128,
    sum_c: u128,
    max_g: u128,
    min_rem: u128,
    cnt: u32,
}

impl Node {
    fn own_rem(&self) -> u128 {
        if self.g == 0 {
            return INF;
        }
        let used = self.acc * self.g;
        if used >= self.h {
            0
        } else {
            (self.h - used).div_ceil(self.g)
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Treap {
    nodes: Vec<Node>,
    free: Vec<u32>,
    root: u32,
}

pub(crate) struct Removed {
    pub q: u32,
    pub acc: u128,
    pub g: u128,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Default for Treap {
    fn default() -> Self {
        Treap { nodes: Vec::new(), free: Vec::new(), root: NIL }
    }
}

impl Treap {
    pub fn clear(&mut self) {
        self.nodes.clear();
        self.free.clear();
        self.root = NIL;
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.cnt(self.root) as usize
    }

    #[cfg(test)]
    fn cnt(&self, t: u32) -> u32 {
        if t == NIL { 0 } else { self.nodes[t as usize].cnt }
    }

    fn n(&self, t: u32) -> &Node {
        &self.nodes[t as usize]
    }

    fn n_mut(&mut self, t: u32) -> &mut Node {
        &mut self.nodes[t as usize]
    }

    fn apply(&mut self, t: u32, d: u128) {
        if t == NIL || d == 0 {
            return;
        }
        let n = self.n_mut(t);
        n.acc += d;
        n.lazy += d;
        if n.min_rem != INF {
            n.min_rem = n.min_rem.saturating_sub(d);
        }
    }

    fn push(&mut self, t: u32) {
        let (l, r, d) = {
            let n = self.n_mut(t);
            let d = n.lazy;
            n.lazy = 0;
            (n.l, n.r, d)
        };
        self.apply(l, d);
        self.apply(r, d);
    }

    fn pull(&mut self, t: u32) {
        let (l, r) = (self.n(t).l, self.n(t).r);
        let mut sum_s = self.n(t).size;
        let mut sum_c = self.n(t).cost;
        let mut max_g = self.n(t).g;
        let mut min_rem = self.n(t).own_rem();
        let mut cnt = 1;
        for c in [l, r] {
            if c != NIL {
                let cn = self.n(c);
                sum_s += cn.sum_s;
                sum_c += cn.sum_c;
                max_g = max_g.max(cn.max_g);
                min_rem = min_rem.min(cn.min_rem);
                cnt += cn.cnt;
            }
        }
        let n = self.n_mut(t);
        n.sum_s = sum_s;
        n.sum_c = sum_c;
        n.max_g = max_g;
        n.min_rem = min_rem;
        n.cnt = cnt;
    }

    /// Splits into keys below `key` (or up to and including it) and the rest.
    fn split(&mut self, t: u32, key: &Key, inclusive: bool) -> (u32, u32) {
        if t == NIL {
            return (NIL, NIL);
        }
        self.push(t);
        let ord = self.n(t).key.cmp(key);
        if ord == Ordering::Less || (inclusive && ord == Ordering::Equal) {
            let (a, b) = self.split(self.n(t).r, key, inclusive);
            self.n_mut(t).r = a;
            self.pull(t);
            (t, b)
        } else {
            let (a, b) = self.split(self.n(t).l, key, inclusive);
            self.n_mut(t).l = b;
            self.pull(t);
            (a, t)
        }
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.n(a).prio > self.n(b).prio {
            self.push(a);
            let r = self.merge(self.n(a).r, b);
            self.n_mut(a).r = r;
            self.pull(a);
            a
        } else {
            self.push(b);
            let l = self.merge(a, self.n(b).l);
            self.n_mut(b).l = l;
            self.pull(b);
            b
        }
    }

    /// Hangs `to` where the search for `key` left the last node of `path`.
    fn relink(&mut self, path: &[u32], key: &Key, to: u32) {
        match path.last() {
            None => self.root = to,
            Some(&p) => {
                let n = self.n_mut(p);
                if n.key.cmp(key) == Ordering::Greater {
                    n.l = to;
                } else {
                    n.r = to;
                }
            }
        }
    }

    fn pull_path(&mut self, path: &[u32]) {
        for &t in path.iter().rev() {
            self.pull(t);
        }
    }

    pub fn insert(&mut self, key: Key, q: u32, size: u128, cost: u128, g: u128, h: u128, salt: u64) {
        let prio = mix(key.j as u64 ^ salt.rotate_left(32));
        let node = Node {
            key,
            q,
            prio,
            l: NIL,
            r: NIL,
            size,
            cost,
            g,
            h,
            acc: 0,
            lazy: 0,
            sum_s: 0,
            sum_c: 0,
            max_g: 0,
            min_rem: 0,
            cnt: 0,
        };
        let t = match self.free.pop() {
            Some(t) => {
                self.nodes[t as usize] = node;
                t
            }
            None => {
                self.nodes.push(node);
                (self.nodes.len() - 1) as u32
            }
        };
        let mut path = Vec::new();
        let mut cur = self.root;
        while cur != NIL && self.n(cur).prio > prio {
            self.push(cur);
            path.push(cur);
            cur = if self.n(cur).key.cmp(&key) == Ordering::Less { self.n(cur).r } else { self.n(cur).l };
        }
        let (a, b) = self.split(cur, &key, false);
        let n = self.n_mut(t);
        n.l = a;
        n.r = b;
        self.pull(t);
        self.relink(&path, &key, t);
        self.pull_path(&path);
    }

    pub fn remove(&mut self, key: &Key) -> Option<Removed> {
        let mut path = Vec::new();
        let mut cur = self.root;
        loop {
            if cur == NIL {
                return None;
            }
            self.push(cur);
            match self.n(cur).key.cmp(key) {
                Ordering::Equal => break,
                Ordering::Less => {
                    path.push(cur);
                    cur = self.n(cur).r;
                }
                Ordering::Greater => {
                    path.push(cur);
                    cur = self.n(cur).l;
                }
            }
        }
        let (l, r) = (self.n(cur).l, self.n(cur).r);
        let m = self.merge(l, r);
        self.relink(&path, key, m);
        self.pull_path(&path);
        self.free.push(cur);
        let n = self.n(cur);
        Some(Removed { q: n.q, acc: n.acc, g: n.g })
    }

    /// Adds step credit `d` to every item with key ≤ `last`.
    pub fn credit_prefix(&mut self, last: &Key, d: u128) {
        if d == 0 {
            return;
        }
        let mut path = Vec::new();
        let mut cur = self.root;
        while cur != NIL {
            self.push(cur);
            path.push(cur);
            if self.n(cur).key.cmp(last) != Ordering::Greater {
                let l = self.n(cur).l;
                self.apply(l, d);
                self.n_mut(cur).acc += d;
                cur = self.n(cur).r;
            } else {
                cur = self.n(cur).l;
            }
        }
        self.pull_path(&path);
    }

    /// Largest load rate among keys ≤ `last`.
    pub fn prefix_max_g(&self, last: &Key) -> u128 {
        let mut t = self.root;
        let mut best = 0;
        while t != NIL {
            let n = self.n(t);
            if n.key.cmp(last) != Ordering::Greater {
                if n.l != NIL {
                    best = best.max(self.n(n.l).max_g);
                }
                best = best.max(n.g);
                t = n.r;
            } else {
                t = n.l;
            }
        }
        best
    }

    /// Keys of the items whose credit reached their headroom.
    pub fn triggered(&mut self) -> Vec<Key> {
        let mut out = Vec::new();
        self.collect_triggered(self.root, &mut out);
        out
    }

    fn collect_triggered(&mut self, t: u32, out: &mut Vec<Key>) {
        if t == NIL || self.n(t).min_rem != 0 {
            return;
        }
        self.push(t);
        let (l, r) = (self.n(t).l, self.n(t).r);
        self.collect_triggered(l, out);
        if self.n(t).own_rem() == 0 {
            out.push(self.n(t).key);
        }
        self.collect_triggered(r, out);
    }

    /// Hands out every pending credit as `(q, acc·g)` and zeroes it.
    pub fn drain(&mut self, out: &mut Vec<(u32, u128)>) {
        self.drain_rec(self.root, out);
    }

    fn drain_rec(&mut self, t: u32, out: &mut Vec<(u32, u128)>) {
        if t == NIL {
            return;
        }
        self.push(t);
        let (l, r) = (self.n(t).l, self.n(t).r);
        self.drain_rec(l, out);
        self.drain_rec(r, out);
        let n = self.n_mut(t);
        if n.acc > 0 {
            out.push((n.q, n.acc * n.g));
            n.h -= (n.acc * n.g).min(n.h);
            n.acc = 0;
        }
        self.pull(t);
    }

    /// Resets every headroom from the current weights.
    pub fn refresh(&mut self, h: &impl Fn(u32) -> u128) {
        self.refresh_rec(self.root, h);
    }

    fn refresh_rec(&mut self, t: u32, h: &impl Fn(u32) -> u128) {
        if t == NIL {
            return;
        }
        self.push(t);
        let (l, r) = (self.n(t).l, self.n(t).r);
        self.refresh_rec(l, h);
        self.refresh_rec(r, h);
        let q = self.n(t).q;
        self.n_mut(t).h = h(q);
        self.pull(t);
    }

    /// Row positions in key order (for transcripts and audits).
    pub fn prefix_items(&self, count: usize) -> Vec<u32> {
        let mut out = Vec::with_capacity(count);
        self.walk(self.root, count, &mut out);
        out
    }

    fn walk(&self, t: u32, count: usize, out: &mut Vec<u32>) {
        if t == NIL || out.len() >= count {
            return;
        }
        let n = self.n(t);
        self.walk(n.l, count, out);
        if out.len() < count {
            out.push(n.q);
        }
        self.walk(n.r, count, out);
    }
}

impl CheapPrefix for Treap {
    /// Last key of the covering prefix and the prefix length.
    type Cut = (Key, usize);

    fn cover(&self, need: u128) -> Option<(u128, (Key, usize))> {
        if self.root == NIL || self.n(self.root).sum_s < need {
            return None;
        }
        let mut need = need;
        let mut cost = 0;
        let mut before = 0usize;
        let mut t = self.root;
        loop {
            let n = self.n(t);
            let (ls, lc, lk) = if n.l == NIL {
                (0, 0, 0)
            } else {
                let c = self.n(n.l);
                (c.sum_s, c.sum_c, c.cnt as usize)
            };
            if ls >= need {
                t = n.l;
                continue;
            }
            need -= ls;
            cost += lc;
            before += lk;
            if n.size >= need {
                return Some((cost + n.cost, (n.key, before + 1)));
            }
            need -= n.size;
            cost += n.cost;
            before += 1;
            t = n.r;
        }
    }
}
