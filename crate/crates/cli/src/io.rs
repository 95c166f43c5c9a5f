use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use heterovar::Sample;
use serde::Deserialize;

use crate::FlagContext;

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Writes `text` to `path` or stdout.
pub fn emit(path: Option<&PathBuf>, text: &str) -> Result<()> {
    let mut w = writer(path.map(PathBuf::as_path))?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

/// A CSV document built row by row.
pub struct Table {
    out: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut out = header.join(",");
        out.push('\n');
        Table { out }
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) {
        let cells: Vec<String> = cells.into_iter().collect();
        self.out.push_str(&cells.join(","));
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}

#[derive(Deserialize)]
struct XyRow {
    x: f64,
    y: f64,
}

#[derive(Deserialize)]
struct XRow {
    x: f64,
}

fn reader(path: &Path, flag: &'static str) -> Result<csv::Reader<File>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("--{flag}: cannot open {}", path.display()))
}

fn require_columns(
    rdr: &mut csv::Reader<File>,
    columns: &[&str],
    flag: &'static str,
) -> Result<()> {
    let headers = rdr
        .headers()
        .with_context(|| format!("--{flag}: cannot read header"))?;
    for c in columns {
        if !headers.iter().any(|h| h == *c) {
            bail!(
                "--{flag}: missing column `{c}` in header {:?}",
                headers.iter().collect::<Vec<_>>()
            );
        }
    }
    Ok(())
}

/// Reads an `x,y` CSV, sorts it by `x` and infers the design.
pub fn read_sample(path: &Path) -> Result<Sample> {
    let mut rdr = reader(path, "input")?;
    require_columns(&mut rdr, &["x", "y"], "input")?;
    let mut rows = Vec::new();
    for (line, rec) in rdr.deserialize::<XyRow>().enumerate() {
        let rec = rec.with_context(|| format!("--input: bad record {}", line + 1))?;
        rows.push((rec.x, rec.y));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (x, y): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    Sample::infer(x, y).flag("input")
}

/// Parses `--grid`: an integer point count or a CSV with header `x`.
pub fn read_grid(spec: &str) -> Result<Vec<f64>> {
    if let Ok(count) = spec.parse::<usize>() {
        if count < 2 {
            bail!("--grid: point count must be at least 2, got {count}");
        }
        let last = (count - 1) as f64;
        return Ok((0..count).map(|i| i as f64 / last).collect());
    }
    let path = Path::new(spec);
    if !path.exists() {
        bail!("--grid: `{spec}` is neither a point count nor an existing file");
    }
    let mut rdr = reader(path, "grid")?;
    require_columns(&mut rdr, &["x"], "grid")?;
    rdr.deserialize::<XRow>()
        .enumerate()
        .map(|(line, r)| {
            r.map(|r| r.x)
                .with_context(|| format!("--grid: bad record {}", line + 1))
        })
        .collect()
}
