use crate::error::{Error, Result};
use crate::instance::CoveringInstance;
use serde::{Deserialize, Serialize};

const MAX_COLUMNS: usize = 22;
const PASS_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub worst_row: usize,
    /// Columns forced to their caps in the worst inequality.
    pub worst_set: Vec<usize>,
    pub min_slack: f64,
    pub pass: bool,
}

/// Checks `A_S x ≥ (1−ε) b_S` for every row and every column set `S`.
///
/// Columns outside a row's support change neither `b_S` nor `A_S x` for that
/// row, so enumerating the subsets of each row's support covers all `2^n`
/// sets.
pub fn kc_separation(inst: &CoveringInstance, x: &[f64], eps: f64) -> Result<SeparationReport> {
    let n = inst.n();
    if n > MAX_COLUMNS {
        return Err(Error::OracleScale(format!("{n} columns exceed the limit of {MAX_COLUMNS}")));
    }
    if x.len() != n {
        return Err(Error::Dimension { expected: n, got: x.len() });
    }
    let caps = inst.effective_caps();
    let mut report = SeparationReport { worst_row: 0, worst_set: Vec::new(), min_slack: f64::INFINITY, pass: true };
    for i in 0..inst.m() {
        let row = inst.row(i);
        let k = row.len();
        for mask in 0u64..(1u64 << k) {
            let mut forced = 0.0;
            for (q, &(j, a)) in row.iter().enumerate() {
                if mask >> q & 1 == 1 {
                    forced += a * caps[j] as f64;
                }
            }
            let b_s = (inst.b()[i] - forced).max(0.0);
            let mut lhs = 0.0;
            for (q, &(j, a)) in row.iter().enumerate() {
                if mask >> q & 1 == 0 {
                    lhs += a.min(b_s) * x[j];
                }
            }
            let slack = lhs - (1.0 - eps) * b_s;
            if slack < report.min_slack {
                report.min_slack = slack;
                report.worst_row = i;
                report.worst_set = row
                    .iter()
                    .enumerate()
                    .filter(|(q, _)| mask >> q & 1 == 1)
                    .map(|(_, e)| e.0)
                    .collect();
            }
        }
    }
    report.pass = report.min_slack >= -PASS_TOL;
    Ok(report)
}
