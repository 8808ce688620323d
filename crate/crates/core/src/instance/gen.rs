use super::{CoveringInstance, Mult};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The two-column instance `B x1 + (B-1) x2 ≥ B`, costs (1, 0), multiplicities (1, 1).
pub fn gen_gap_example(big_b: f64) -> Result<CoveringInstance> {
    if !(big_b >= 2.0) || !big_b.is_finite() {
        return Err(Error::Domain(format!("gap parameter must be at least 2, got {big_b}")));
    }
    CoveringInstance::new(
        vec![1.0, 0.0],
        vec![big_b],
        vec![Mult::Finite(1), Mult::Finite(1)],
        vec![(0, 0, big_b), (0, 1, big_b - 1.0)],
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub density: f64,
    pub coeff_range: (f64, f64),
    /// `None` makes every column unbounded.
    pub d_max: Option<u64>,
    pub cost_range: (f64, f64),
    pub demand: f64,
}

impl GenParams {
    pub fn new(seed: u64, m: usize, n: usize, density: f64) -> Self {
        GenParams {
            seed,
            m,
            n,
            density,
            coeff_range: (0.1, 1.0),
            d_max: Some(1),
            cost_range: (1.0, 10.0),
            demand: 1.0,
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.gen_range(lo..hi)
    } else {
        lo
    }
}

/// Random sparse instance. Each entry is present with probability `density`;
/// empty rows get one entry and rows that `x = d` fails to cover are padded
/// with extra entries of the largest coefficient.
pub fn gen_random(p: &GenParams) -> Result<CoveringInstance> {
    let bad = |msg: &str| Err(Error::Generation(msg.to_string()));
    if p.m == 0 || p.n == 0 {
        return bad("m and n must be positive");
    }
    if !(p.density > 0.0 && p.density <= 1.0) {
        return bad("density must lie in (0, 1]");
    }
    if p.density * (p.m as f64) * (p.n as f64) < p.m as f64 {
        return bad("density too low for every row to get an entry");
    }
    let (clo, chi) = p.coeff_range;
    if !(clo > 0.0 && chi >= clo) || !(p.cost_range.0 >= 0.0 && p.cost_range.1 >= p.cost_range.0) {
        return bad("ranges must be positive and ordered");
    }
    if !(p.demand > 0.0) || p.d_max == Some(0) {
        return bad("demand and multiplicities must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let c: Vec<f64> = (0..p.n).map(|_| uniform(&mut rng, p.cost_range)).collect();
    let d: Vec<Mult> = (0..p.n)
        .map(|_| match p.d_max {
            Some(dm) => Mult::Finite(rng.gen_range(1..=dm)),
            None => Mult::Unbounded,
        })
        .collect();
    let cap = |j: usize| match d[j] {
        Mult::Finite(v) => v as f64,
        Mult::Unbounded => f64::INFINITY,
    };
    let mut entries = Vec::new();
    for i in 0..p.m {
        let mut row: Vec<(usize, f64)> = Vec::new();
        for j in 0..p.n {
            if rng.gen_bool(p.density) {
                row.push((j, uniform(&mut rng, p.coeff_range).min(p.demand)));
            }
        }
        if row.is_empty() {
            row.push((rng.gen_range(0..p.n), uniform(&mut rng, p.coeff_range).min(p.demand)));
        }
        let mut reach: f64 = row.iter().map(|&(j, a)| a * cap(j)).sum();
        if reach < p.demand {
            let mut free: Vec<usize> = (0..p.n).filter(|j| !row.iter().any(|e| e.0 == *j)).collect();
            while reach < p.demand {
                if free.is_empty() {
                    return bad("cannot pad a row to feasibility; raise n, d_max or coefficients");
                }
                let j = free.remove(rng.gen_range(0..free.len()));
                let a = chi.min(p.demand);
                row.push((j, a));
                reach += a * cap(j);
            }
            row.sort_by_key(|e| e.0);
        }
        entries.extend(row.into_iter().map(|(j, a)| (i, j, a)));
    }
    CoveringInstance::new(c, vec![p.demand; p.m], d, entries)
}
