use cip_core::instance::{parse_instance, CoveringInstance, SparsityStats};
use cip_core::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

pub fn read_text(path: Option<&Path>) -> Result<String> {
    let mut text = String::new();
    let res = match path {
        Some(p) if p != Path::new("-") => std::fs::File::open(p).and_then(|mut f| f.read_to_string(&mut text)),
        _ => std::io::stdin().read_to_string(&mut text),
    };
    res.map_err(|e| Error::Domain(format!("cannot read {}: {e}", display(path))))?;
    Ok(text)
}

pub fn read_instance(path: Option<&Path>) -> Result<CoveringInstance> {
    parse_instance(&read_text(path)?)
}

fn display(path: Option<&Path>) -> String {
    path.map_or("standard input".into(), |p| p.display().to_string())
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    let res = match path {
        Some(p) if p != Path::new("-") => std::fs::write(p, text),
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush())
        }
    };
    res.map_err(|e| Error::Domain(format!("cannot write {}: {e}", display(path))))
}

pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    write_text(path, &text)
}

#[derive(Serialize)]
pub struct Fractional<'a> {
    pub cost: f64,
    pub x: &'a [f64],
    pub feasible: bool,
    pub stats: &'a SparsityStats,
}

#[derive(Serialize)]
pub struct Integral<'a> {
    pub cost: f64,
    pub z: &'a [u64],
    pub feasible: bool,
    pub stats: &'a SparsityStats,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum VectorDoc<T> {
    Bare(Vec<T>),
    X { x: Vec<T> },
    Z { z: Vec<T> },
}

/// Reads a vector either as a bare JSON array or from the `x`/`z` field of a
/// solution document.
pub fn read_vector<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let text = read_text(Some(path))?;
    let doc: VectorDoc<T> =
        serde_json::from_str(&text).map_err(|e| Error::Domain(format!("{}: {e}", path.display())))?;
    Ok(match doc {
        VectorDoc::Bare(v) | VectorDoc::X { x: v } | VectorDoc::Z { z: v } => v,
    })
}
