//! Line-oriented text format:
//!
//! ```text
//! cip 1
//! m 1
//! n 2
//! c 1 0
//! b 10
//! d 1 inf
//! row 1 1:10 2:9
//! ```
//!
//! Indices are 1-based, `#` starts a comment.

use super::{CoveringInstance, Mult};
use crate::error::{Error, Result};
use std::fmt::Write;

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn num(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| perr(line, format!("bad number '{tok}'")))?;
    if !v.is_finite() {
        return Err(perr(line, format!("non-finite number '{tok}'")));
    }
    if v < 0.0 {
        return Err(Error::Domain(format!("line {line}: negative value {tok}")));
    }
    Ok(v)
}

fn index(tok: &str, line: usize, bound: usize, what: &str) -> Result<usize> {
    let v: usize = tok.parse().map_err(|_| perr(line, format!("bad {what} index '{tok}'")))?;
    if v == 0 || v > bound {
        return Err(perr(line, format!("{what} index {v} out of range 1..={bound}")));
    }
    Ok(v - 1)
}

pub fn parse_instance(text: &str) -> Result<CoveringInstance> {
    let mut header = false;
    let mut m: Option<usize> = None;
    let mut n: Option<usize> = None;
    let mut c: Option<Vec<f64>> = None;
    let mut b: Option<Vec<f64>> = None;
    let mut d: Option<Vec<Mult>> = None;
    let mut entries = Vec::new();
    let mut seen_rows = Vec::new();
    let mut last_line = 0;

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = content.split_whitespace();
        let Some(key) = toks.next() else { continue };
        let rest: Vec<&str> = toks.collect();
        if !header {
            if key != "cip" || rest != ["1"] {
                return Err(perr(line, "expected header 'cip 1'"));
            }
            header = true;
            continue;
        }
        let need_dims = |line| -> Result<(usize, usize)> {
            match (m, n) {
                (Some(m), Some(n)) => Ok((m, n)),
                _ => Err(perr(line, "'m' and 'n' must precede data lines")),
            }
        };
        match key {
            "m" | "n" => {
                let slot = if key == "m" { &mut m } else { &mut n };
                if slot.is_some() {
                    return Err(perr(line, format!("'{key}' given twice")));
                }
                if rest.len() != 1 {
                    return Err(perr(line, format!("'{key}' takes one integer")));
                }
                *slot = Some(rest[0].parse().map_err(|_| perr(line, format!("bad integer '{}'", rest[0])))?);
            }
            "c" | "b" => {
                let (m, n) = need_dims(line)?;
                let want = if key == "c" { n } else { m };
                if rest.len() != want {
                    return Err(perr(line, format!("'{key}' needs {want} values, got {}", rest.len())));
                }
                let vals = rest.iter().map(|t| num(t, line)).collect::<Result<Vec<_>>>()?;
                let slot = if key == "c" { &mut c } else { &mut b };
                if slot.replace(vals).is_some() {
                    return Err(perr(line, format!("'{key}' given twice")));
                }
            }
            "d" => {
                let (_, n) = need_dims(line)?;
                if rest.len() != n {
                    return Err(perr(line, format!("'d' needs {n} values, got {}", rest.len())));
                }
                let vals = rest
                    .iter()
                    .map(|t| {
                        if *t == "inf" {
                            Ok(Mult::Unbounded)
                        } else if t.starts_with('-') {
                            Err(Error::Domain(format!("line {line}: negative multiplicity {t}")))
                        } else {
                            t.parse::<u64>()
                                .map(Mult::Finite)
                                .map_err(|_| perr(line, format!("bad multiplicity '{t}'")))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                if d.replace(vals).is_some() {
                    return Err(perr(line, "'d' given twice"));
                }
            }
            "row" => {
                let (m, n) = need_dims(line)?;
                let Some(first) = rest.first() else {
                    return Err(perr(line, "'row' needs a row index"));
                };
                let i = index(first, line, m, "row")?;
                if seen_rows.contains(&i) {
                    return Err(perr(line, format!("row {} given twice", i + 1)));
                }
                seen_rows.push(i);
                let mut cols_here = Vec::new();
                for t in &rest[1..] {
                    let (js, vs) = t.split_once(':').ok_or_else(|| perr(line, format!("bad entry '{t}'")))?;
                    let j = index(js, line, n, "column")?;
                    if cols_here.contains(&j) {
                        return Err(Error::DuplicateEntry { row: i + 1, col: j + 1 });
                    }
                    cols_here.push(j);
                    entries.push((i, j, num(vs, line)?));
                }
            }
            other => return Err(perr(line, format!("unknown key '{other}'"))),
        }
    }
    if !header {
        return Err(perr(last_line.max(1), "missing header 'cip 1'"));
    }
    let eof = last_line.max(1);
    let c = c.ok_or_else(|| perr(eof, "missing 'c'"))?;
    let b = b.ok_or_else(|| perr(eof, "missing 'b'"))?;
    let d = d.ok_or_else(|| perr(eof, "missing 'd'"))?;
    CoveringInstance::new(c, b, d, entries)
}

fn join<T: std::fmt::Display>(vals: &[T]) -> String {
    vals.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn serialize_instance(inst: &CoveringInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "cip 1");
    let _ = writeln!(out, "m {}", inst.m());
    let _ = writeln!(out, "n {}", inst.n());
    let _ = writeln!(out, "c {}", join(inst.c()));
    let _ = writeln!(out, "b {}", join(inst.b()));
    let _ = writeln!(out, "d {}", join(inst.d()));
    for i in 0..inst.m() {
        let _ = write!(out, "row {}", i + 1);
        for &(j, v) in inst.row(i) {
            let _ = write!(out, " {}:{}", j + 1, v);
        }
        out.push('\n');
    }
    out
}
