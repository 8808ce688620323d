#![allow(dead_code)]

use cip_core::instance::{gen_random, CoveringInstance, GenParams, Mult};
use cip_core::knapsack::{KcItem, KnapsackCoverProblem};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Error-free floating-point expansion (nonoverlapping components,
/// increasing magnitude).
#[derive(Default, Clone)]
pub struct Expansion(Vec<f64>);

impl Expansion {
    pub fn add(&mut self, b: f64) {
        let mut q = b;
        let mut h = Vec::with_capacity(self.0.len() + 1);
        for &x in &self.0 {
            let (s, e) = two_sum(q, x);
            if e != 0.0 {
                h.push(e);
            }
            q = s;
        }
        if q != 0.0 {
            h.push(q);
        }
        self.0 = h;
    }

    pub fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        self.add(a.mul_add(b, -p));
        self.add(p);
    }

    pub fn scaled(&self, s: f64) -> Expansion {
        let mut out = Expansion::default();
        for &x in &self.0 {
            out.add_product(x, s);
        }
        out
    }

    pub fn sign(&self) -> i32 {
        match self.0.last() {
            None => 0,
            Some(&v) if v > 0.0 => 1,
            Some(_) => -1,
        }
    }
}

/// Exact test of `scale · (Az)_i ≥ b_i` for every row, with no tolerance.
pub fn covers_exactly(inst: &CoveringInstance, z: &[u64], scale: f64) -> bool {
    (0..inst.m()).all(|i| {
        let mut e = Expansion::default();
        for &(j, a) in inst.row(i) {
            e.add_product(a, z[j] as f64);
        }
        let mut e = if scale == 1.0 { e } else { e.scaled(scale) };
        e.add(-inst.b()[i]);
        e.sign() >= 0
    })
}

pub fn within_caps(inst: &CoveringInstance, z: &[u64]) -> bool {
    inst.d().iter().zip(z).all(|(d, &v)| d.admits(v))
}

/// Random instance at separation/ILP scale.
pub fn small(seed: u64) -> CoveringInstance {
    let m = 2 + (seed % 4) as usize;
    let n = 4 + (seed % 7) as usize;
    let mut p = GenParams::new(seed, m, n, 0.5);
    p.d_max = Some(1 + seed % 3);
    gen_random(&p).unwrap()
}

/// Random instance with general demands and coefficients above 1.
pub fn general(seed: u64) -> CoveringInstance {
    let mut r = rng(seed ^ 0x9e37);
    let m = r.gen_range(2..=8);
    let n = r.gen_range(5..=12);
    let mut p = GenParams::new(seed, m, n, 0.5);
    p.d_max = Some(r.gen_range(1..=3));
    if seed % 2 == 1 {
        p.coeff_range = (0.2, 2.0);
        p.demand = 2.0;
    }
    gen_random(&p).unwrap()
}

/// Integral point `z ≤ d` obtained by lowering random coordinates of `d`
/// while every row stays covered.
pub fn random_integral_cover(inst: &CoveringInstance, r: &mut ChaCha8Rng) -> Vec<u64> {
    let mut z = inst.effective_caps();
    let mut order: Vec<usize> = (0..inst.n()).collect();
    order.shuffle(r);
    for j in order {
        let target = r.gen_range(0..=z[j]);
        while z[j] > target {
            z[j] -= 1;
            if !inst.check_cover(&z).unwrap().violated_rows.is_empty() {
                z[j] += 1;
                break;
            }
        }
    }
    z
}

/// Convex combination of random integral covers: it satisfies every
/// knapsack-cover inequality because each integral cover does.
pub fn random_kc_point(inst: &CoveringInstance, r: &mut ChaCha8Rng) -> Vec<f64> {
    let k = r.gen_range(2..=4);
    let w: Vec<f64> = (0..k).map(|_| r.gen_range(0.1..1.0)).collect();
    let total: f64 = w.iter().sum();
    let mut x = vec![0.0; inst.n()];
    for &wk in &w {
        let z = random_integral_cover(inst, r);
        for j in 0..inst.n() {
            x[j] += wk / total * z[j] as f64;
        }
    }
    let caps = inst.effective_caps();
    x.iter().zip(&caps).map(|(&v, &d)| v.min(d as f64)).collect()
}

/// Skewed random point scaled so that the least covered row is exactly met.
pub fn skewed_cover(inst: &CoveringInstance, r: &mut ChaCha8Rng, power: i32) -> Vec<f64> {
    let u: Vec<f64> = (0..inst.n()).map(|_| r.gen_range(0.01..1.0f64).powi(power)).collect();
    let t = (0..inst.m()).map(|i| inst.b()[i] / inst.row_dot(i, &u)).fold(0.0, f64::max);
    // one ulp of headroom so that the tight row is covered in floating point
    u.iter().map(|&v| v * t * (1.0 + 1e-15)).collect()
}

/// Normalized instance (b = 1, no caps) in which every column has exactly
/// `delta0` nonzeros among `rows` rows.
pub fn column_regular(seed: u64, rows: usize, cols: usize, delta0: usize) -> CoveringInstance {
    let mut r = rng(seed);
    let mut entries = Vec::with_capacity(cols * delta0);
    let all: Vec<usize> = (0..rows).collect();
    for j in 0..cols {
        for &i in all.choose_multiple(&mut r, delta0) {
            entries.push((i, j, r.gen_range(0.1..=1.0)));
        }
    }
    let c = (0..cols).map(|_| r.gen_range(1.0..10.0)).collect();
    CoveringInstance::new(c, vec![1.0; rows], vec![Mult::Unbounded; cols], entries).unwrap()
}

/// Random knapsack-cover problem small enough for the exact oracle.
pub fn knapsack(r: &mut ChaCha8Rng) -> KnapsackCoverProblem {
    let n = r.gen_range(1..=12);
    let items: Vec<KcItem> = (0..n)
        .map(|id| KcItem {
            id,
            cost: if r.gen_bool(0.1) { 0.0 } else { r.gen_range(0.1..10.0) },
            size: r.gen_range(0.05..5.0),
            cap: Mult::Finite(r.gen_range(1..=3)),
        })
        .collect();
    let reach: f64 = items.iter().map(|it| it.size * it.cap.finite().unwrap() as f64).sum();
    let demand = reach * r.gen_range(0.05..1.0);
    KnapsackCoverProblem::new(items, demand).unwrap()
}

/// Random integral cover: caps lowered in random order while covered.
fn integral_knapsack_cover(p: &KnapsackCoverProblem, r: &mut ChaCha8Rng) -> Vec<u64> {
    let items = p.items();
    let mut z: Vec<u64> = items.iter().map(|it| it.cap.finite().unwrap()).collect();
    let mut cov: f64 = items.iter().zip(&z).map(|(it, &k)| it.size * k as f64).sum();
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(r);
    for k in order {
        let target = r.gen_range(0..=z[k]);
        while z[k] > target && cov - items[k].size >= p.demand() {
            z[k] -= 1;
            cov -= items[k].size;
        }
    }
    z
}

/// Random fractional point satisfying every knapsack-cover inequality of
/// `p`: a convex combination of integral covers.
pub fn fractional_cover(p: &KnapsackCoverProblem, r: &mut ChaCha8Rng) -> Vec<f64> {
    let k = r.gen_range(2..=4);
    let w: Vec<f64> = (0..k).map(|_| r.gen_range(0.1..1.0)).collect();
    let total: f64 = w.iter().sum();
    let mut y = vec![0.0; p.items().len()];
    for &wk in &w {
        for (v, z) in y.iter_mut().zip(integral_knapsack_cover(p, r)) {
            *v += wk / total * z as f64;
        }
    }
    y
}
