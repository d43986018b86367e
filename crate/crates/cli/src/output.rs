//! File formats: edge lists, CSV and number formatting.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use gcm_core::GeneratedGraph;
use serde::Serialize;

/// At least six significant digits, fixed notation, no locale.
pub fn sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.000000".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .with_context(|| format!("cannot create directory {}", parent.display()))?;
    }
    let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(file))
}

/// One `u v kind` line per edge, 0-based vertex ids.
pub fn write_edge_list(graph: &GeneratedGraph, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    for e in &graph.edges {
        writeln!(w, "{} {} {}", e.u, e.v, e.kind.as_str())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `u v [kind]` lines; blank lines and `#` comments are skipped.
/// The vertex count is one more than the largest id.
pub fn read_edge_list(path: &Path) -> Result<GeneratedGraph> {
    let file = File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut pairs = Vec::new();
    let mut n = 0usize;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| format!("cannot read {}", path.display()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(u), Some(v)) = (fields.next(), fields.next()) else {
            bail!("{}:{}: expected \"u v [kind]\"", path.display(), i + 1);
        };
        let parse = |t: &str| {
            t.parse::<u32>()
                .with_context(|| format!("{}:{}: bad vertex id {t:?}", path.display(), i + 1))
        };
        let (u, v) = (parse(u)?, parse(v)?);
        n = n.max(u.max(v) as usize + 1);
        pairs.push((u, v));
    }
    Ok(GeneratedGraph::from_edge_list(n, &pairs)?)
}

pub fn write_csv<T: Serialize>(rows: &[T], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_to_writer<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
