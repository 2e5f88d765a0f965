//! Grid file formats shared by weights and function corpora.
//!
//! CSV: the first line holds `n,L`; the cell values follow, one row of `N`
//! values for `n = 1` and `N` rows of `N` values for `n = 2` (row `i` holds
//! the cells whose first coordinate is `i`).
//!
//! JSON: `{"n":1,"L":3,"values":[...]}` with values in lexicographic order.
//!
//! Both writers print values with 17 significant digits, so reading a file
//! back reproduces every value bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::grid::{GridFn, GridSpec, Weight};

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_csv(f: &GridFn) -> String {
    let g = f.grid();
    let n = g.cells_per_side();
    let mut out = format!("{},{}\n", g.dim(), g.level());
    let rows: Vec<&[f64]> = if g.dim() == 1 {
        vec![f.values()]
    } else {
        f.values().chunks(n).collect()
    };
    for row in rows {
        let line: Vec<String> = row.iter().map(|&v| fmt17(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn from_csv(text: &str) -> Result<GridFn> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let mut header = lines.next().ok_or_else(|| Error::Parse("empty csv".into()))?;
    if header.eq_ignore_ascii_case("n,L") {
        header = lines.next().ok_or_else(|| Error::Parse("missing n,L values".into()))?;
    }
    let hv: Vec<&str> = header.split(',').map(str::trim).collect();
    let (n, l) = match hv.as_slice() {
        [n, l] => (
            n.parse::<usize>().map_err(|e| Error::Parse(format!("n: {e}")))?,
            l.parse::<u32>().map_err(|e| Error::Parse(format!("L: {e}")))?,
        ),
        _ => return Err(Error::Parse(format!("bad header `{header}`, expected n,L"))),
    };
    let grid = GridSpec::new(n, l)?;
    let mut values = Vec::with_capacity(grid.cell_count());
    for line in lines {
        for tok in line.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            values.push(
                tok.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("value `{tok}`: {e}")))?,
            );
        }
    }
    GridFn::new(grid, values)
}

pub fn to_json(f: &GridFn) -> String {
    let g = f.grid();
    let mut out = format!("{{\"n\":{},\"L\":{},\"values\":[", g.dim(), g.level());
    for (i, &v) in f.values().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{}", fmt17(v));
    }
    out.push_str("]}");
    out
}

#[derive(Deserialize)]
struct GridJson {
    n: usize,
    #[serde(rename = "L")]
    level: u32,
    values: Vec<f64>,
}

pub fn from_json(text: &str) -> Result<GridFn> {
    let raw: GridJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    GridFn::new(GridSpec::new(raw.n, raw.level)?, raw.values)
}

/// Read a grid function, choosing the format from the extension (`.json`
/// or anything else for CSV).
pub fn read_grid_fn(path: &Path) -> Result<GridFn> {
    let text = std::fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => from_json(&text),
        _ => from_csv(&text),
    }
}

pub fn read_weight(path: &Path) -> Result<Weight> {
    Weight::try_from(read_grid_fn(path)?)
}

pub fn write_grid_fn(path: &Path, f: &GridFn) -> Result<()> {
    let text = match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => to_json(f),
        _ => to_csv(f),
    };
    std::fs::write(path, text)?;
    Ok(())
}
