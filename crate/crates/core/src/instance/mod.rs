//! Sparse covering program instances: min c·x s.t. Ax ≥ b, 0 ≤ x ≤ d, x integral.

mod format;
mod gen;

pub use format::{parse_instance, serialize_instance};
pub use gen::{gen_gap_example, gen_random, GenParams};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Relative slack used when comparing a computed coverage against a demand.
pub const COVER_TOL: f64 = 1e-9;

pub fn covers(coverage: f64, demand: f64) -> bool {
    coverage >= demand - COVER_TOL * demand.abs().max(1.0)
}

/// Column multiplicity bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mult {
    Finite(u64),
    Unbounded,
}

impl Mult {
    pub fn finite(self) -> Option<u64> {
        match self {
            Mult::Finite(v) => Some(v),
            Mult::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Mult::Unbounded)
    }

    /// `v ≤ self`.
    pub fn admits(self, v: u64) -> bool {
        match self {
            Mult::Finite(d) => v <= d,
            Mult::Unbounded => true,
        }
    }

    pub fn admits_f64(self, v: f64) -> bool {
        match self {
            Mult::Finite(d) => v <= d as f64 * (1.0 + 1e-12) + 1e-12,
            Mult::Unbounded => true,
        }
    }

    pub fn min_with(self, v: u64) -> u64 {
        match self {
            Mult::Finite(d) => d.min(v),
            Mult::Unbounded => v,
        }
    }
}

impl fmt::Display for Mult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mult::Finite(v) => write!(f, "{v}"),
            Mult::Unbounded => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMode {
    /// Divide each row by its own demand.
    Unit,
    /// Divide every row by the smallest demand.
    UnitMin,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoveringInstance {
    m: usize,
    n: usize,
    c: Vec<f64>,
    b: Vec<f64>,
    d: Vec<Mult>,
    rows: Vec<Vec<(usize, f64)>>,
    cols: Vec<Vec<(usize, f64)>>,
}

impl CoveringInstance {
    /// Builds an instance from `(row, col, value)` triples (0-indexed).
    ///
    /// Zero values are dropped, values above the row demand are clipped to it.
    pub fn new(
        c: Vec<f64>,
        b: Vec<f64>,
        d: Vec<Mult>,
        entries: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let m = b.len();
        let n = c.len();
        if d.len() != n {
            return Err(Error::Dimension { expected: n, got: d.len() });
        }
        for (j, &cj) in c.iter().enumerate() {
            if !(cj.is_finite() && cj >= 0.0) {
                return Err(Error::Domain(format!("cost of column {} is {cj}", j + 1)));
            }
        }
        for (i, &bi) in b.iter().enumerate() {
            if !(bi.is_finite() && bi > 0.0) {
                return Err(Error::Domain(format!("demand of row {} is {bi}", i + 1)));
            }
        }
        for (j, &dj) in d.iter().enumerate() {
            if dj == Mult::Finite(0) {
                return Err(Error::Domain(format!("multiplicity of column {} is 0", j + 1)));
            }
        }
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        for (i, j, v) in entries {
            if i >= m {
                return Err(Error::Dimension { expected: m, got: i + 1 });
            }
            if j >= n {
                return Err(Error::Dimension { expected: n, got: j + 1 });
            }
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Domain(format!("coefficient ({}, {}) is {v}", i + 1, j + 1)));
            }
            if v > 0.0 {
                rows[i].push((j, v.min(b[i])));
            }
        }
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_by_key(|e| e.0);
            if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::DuplicateEntry { row: i + 1, col: w[0].0 + 1 });
            }
            if row.is_empty() {
                return Err(Error::EmptyRow(i + 1));
            }
        }
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, row) in rows.iter().enumerate() {
            for &(j, v) in row {
                cols[j].push((i, v));
            }
        }
        Ok(CoveringInstance { m, n, c, b, d, rows, cols })
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn c(&self) -> &[f64] {
        &self.c
    }
    pub fn b(&self) -> &[f64] {
        &self.b
    }
    pub fn d(&self) -> &[Mult] {
        &self.d
    }
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }
    pub fn col(&self, j: usize) -> &[(usize, f64)] {
        &self.cols[j]
    }
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// All entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |&(j, v)| (i, j, v)))
    }

    /// Entries in column-major order.
    pub fn entries_by_col(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |&(i, v)| (i, j, v)))
    }

    pub fn cost(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    pub fn cost_int(&self, z: &[u64]) -> f64 {
        self.c.iter().zip(z).map(|(c, &z)| c * z as f64).sum()
    }

    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        self.rows[i].iter().map(|&(j, a)| a * x[j]).sum()
    }

    pub fn row_dot_int(&self, i: usize, z: &[u64]) -> f64 {
        self.rows[i].iter().map(|&(j, a)| a * z[j] as f64).sum()
    }

    /// Finite multiplicity bounds. An unbounded column gets the smallest count
    /// that alone covers every row it touches; more copies never help.
    pub fn effective_caps(&self) -> Vec<u64> {
        (0..self.n)
            .map(|j| match self.d[j] {
                Mult::Finite(v) => v,
                Mult::Unbounded => self.cols[j]
                    .iter()
                    .map(|&(i, a)| (self.b[i] / a - 1e-12).ceil().max(1.0) as u64)
                    .max()
                    .unwrap_or(0),
            })
            .collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        self.cols.iter().map(|col| col.iter().map(|e| e.1).sum()).collect()
    }

    pub fn normalize(&self, mode: NormMode) -> Result<CoveringInstance> {
        let b_min = self.b.iter().cloned().fold(f64::INFINITY, f64::min);
        let scale: Vec<f64> = match mode {
            NormMode::Unit => self.b.clone(),
            NormMode::UnitMin => vec![b_min; self.m],
        };
        if scale.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::Domain("demands must be positive".into()));
        }
        let b = match mode {
            NormMode::Unit => vec![1.0; self.m],
            NormMode::UnitMin => self.b.iter().map(|&bi| bi / b_min).collect(),
        };
        let entries = self.entries().map(|(i, j, v)| (i, j, v / scale[i]));
        CoveringInstance::new(self.c.clone(), b, self.d.clone(), entries)
    }

    pub fn sparsity_stats(&self) -> SparsityStats {
        let col_sums = self.column_sums();
        let delta0 = self.cols.iter().map(Vec::len).max().unwrap_or(0);
        let delta1 = col_sums.iter().cloned().fold(0.0, f64::max);
        let rho0 = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let rho1 = self
            .rows
            .iter()
            .map(|r| r.iter().map(|e| e.1).sum::<f64>())
            .fold(0.0, f64::max);
        let b_min = self.b.iter().cloned().fold(f64::INFINITY, f64::min);
        let (lo, hi) = self
            .entries()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), (_, _, v)| (lo.min(v), hi.max(v)));
        let coeff_range_c = if hi > 0.0 { hi.max(1.0 / lo).max(1.0) } else { 1.0 };
        SparsityStats {
            delta0,
            delta1,
            rho0,
            rho1,
            b_min,
            coeff_range_c,
            nnz: self.nnz(),
        }
    }

    pub fn check_cover(&self, z: &[u64]) -> Result<CoverReport> {
        if z.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: z.len() });
        }
        let mut violated_rows = Vec::new();
        let mut slack = Vec::with_capacity(self.m);
        for i in 0..self.m {
            let cov = self.row_dot_int(i, z);
            slack.push(cov - self.b[i]);
            if !covers(cov, self.b[i]) {
                violated_rows.push(RowShortfall { row: i, shortfall: self.b[i] - cov });
            }
        }
        let multiplicity_violations: Vec<usize> =
            (0..self.n).filter(|&j| !self.d[j].admits(z[j])).collect();
        Ok(CoverReport {
            feasible: violated_rows.is_empty() && multiplicity_violations.is_empty(),
            violated_rows,
            multiplicity_violations,
            cost: self.cost_int(z),
            slack,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsityStats {
    pub delta0: usize,
    pub delta1: f64,
    pub rho0: usize,
    pub rho1: f64,
    pub b_min: f64,
    pub coeff_range_c: f64,
    pub nnz: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowShortfall {
    pub row: usize,
    pub shortfall: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub feasible: bool,
    pub violated_rows: Vec<RowShortfall>,
    pub multiplicity_violations: Vec<usize>,
    pub cost: f64,
    pub slack: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(k: usize) -> CoveringInstance {
        CoveringInstance::new(
            vec![1.0; k],
            vec![1.0; k],
            vec![Mult::Finite(1); k],
            (0..k).map(|i| (i, i, 1.0)),
        )
        .unwrap()
    }

    #[test]
    fn clipping_and_views_agree() {
        let inst = CoveringInstance::new(
            vec![1.0, 1.0],
            vec![2.0, 1.0],
            vec![Mult::Unbounded, Mult::Finite(3)],
            vec![(0, 0, 5.0), (0, 1, 1.0), (1, 1, 0.5)],
        )
        .unwrap();
        assert_eq!(inst.row(0), &[(0, 2.0), (1, 1.0)]);
        let mut by_row: Vec<_> = inst.entries().collect();
        let mut by_col: Vec<_> = inst.entries_by_col().collect();
        by_row.sort_by(|a, b| a.partial_cmp(b).unwrap());
        by_col.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(by_row, by_col);
        assert_eq!(inst.effective_caps(), vec![1, 3]);
    }

    #[test]
    fn duplicate_and_empty_rows_rejected() {
        let dup = CoveringInstance::new(
            vec![1.0],
            vec![1.0],
            vec![Mult::Finite(1)],
            vec![(0, 0, 1.0), (0, 0, 0.5)],
        );
        assert_eq!(dup.unwrap_err(), Error::DuplicateEntry { row: 1, col: 1 });
        let empty = CoveringInstance::new(vec![1.0], vec![1.0, 1.0], vec![Mult::Finite(1)], vec![(0, 0, 1.0)]);
        assert_eq!(empty.unwrap_err(), Error::EmptyRow(2));
    }

    #[test]
    fn normalize_modes() {
        let g = gen_gap_example(10.0).unwrap();
        let u = g.normalize(NormMode::Unit).unwrap();
        assert_eq!(u.row(0), &[(0, 1.0), (1, 0.9)]);
        assert_eq!(u.b(), &[1.0]);
        assert_eq!(u.normalize(NormMode::Unit).unwrap(), u);

        let two = CoveringInstance::new(
            vec![1.0, 1.0],
            vec![2.0, 4.0],
            vec![Mult::Finite(1); 2],
            vec![(0, 0, 2.0), (1, 1, 3.0)],
        )
        .unwrap();
        let um = two.normalize(NormMode::UnitMin).unwrap();
        assert_eq!(um.b(), &[1.0, 2.0]);
        assert_eq!(um.normalize(NormMode::UnitMin).unwrap(), um);
    }

    #[test]
    fn stats_examples() {
        let s = identity(3).sparsity_stats();
        assert_eq!((s.delta0, s.delta1, s.rho0, s.rho1, s.b_min), (1, 1.0, 1, 1.0, 1.0));

        let g = gen_gap_example(10.0).unwrap().normalize(NormMode::Unit).unwrap();
        let s = g.sparsity_stats();
        assert_eq!(s.delta0, 1);
        assert_eq!(s.delta1, 1.0);
        assert_eq!(g.column_sums(), vec![1.0, 0.9]);

        let inst = CoveringInstance::new(
            vec![1.0; 2],
            vec![1.0; 3],
            vec![Mult::Finite(1); 2],
            vec![(0, 0, 0.5), (1, 0, 0.5), (2, 0, 0.5), (0, 1, 0.2), (1, 1, 0.3)],
        )
        .unwrap();
        let s = inst.sparsity_stats();
        assert_eq!(s.delta0, 3);
        assert_eq!(s.delta1, 1.5);
        assert_eq!(s.nnz, 5);
    }

    #[test]
    fn check_cover_examples() {
        let id = identity(3);
        let r = id.check_cover(&[1, 1, 1]).unwrap();
        assert!(r.feasible);
        assert_eq!(r.cost, 3.0);

        let g = gen_gap_example(10.0).unwrap();
        let r = g.check_cover(&[0, 1]).unwrap();
        assert!(!r.feasible);
        assert_eq!(r.violated_rows, vec![RowShortfall { row: 0, shortfall: 1.0 }]);

        let r = id.check_cover(&[2, 1, 1]).unwrap();
        assert!(!r.feasible);
        assert_eq!(r.multiplicity_violations, vec![0]);
        assert!(matches!(id.check_cover(&[1]), Err(Error::Dimension { .. })));
    }
}
