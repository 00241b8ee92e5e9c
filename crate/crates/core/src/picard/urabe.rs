use std::path::Path;

use serde::{Deserialize, Serialize};

use super::lattice::weil_count;
use crate::error::{Error, Result};

/// Image of row `i` of the `E_7` table in the `E_8` table.
pub fn urabe_f(i: u32) -> Result<u32> {
    Ok(match i {
        1 => 98,
        2..=24 => i + 36,
        25..=33 => i + 41,
        34 => 76,
        35 => 79,
        36 => 80,
        37 => 109,
        38 => 87,
        39 => 88,
        40 => 95,
        41 => 101,
        42 => 103,
        43 => 104,
        44 => 107,
        45 => 110,
        46..=52 => i + 45,
        53..=56 => i + 46,
        57..=59 => i + 48,
        60 => 111,
        _ => return Err(Error::OutOfRange(format!("row {i}, expected 1..=60"))),
    })
}

/// Rows whose Carter symbol carries a prime; `urabe_f` is injective off them.
pub const PRIMED_ROWS: [u32; 6] = [40, 41, 44, 50, 55, 59];

/// One row of a conjugacy-class table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrabeRow {
    pub row: u32,
    pub carter: String,
    pub trace: i64,
    pub index: i64,
    /// `(orbit size, multiplicity)` pairs.
    pub orbits: Vec<(u32, u32)>,
    pub h1: String,
}

impl UrabeRow {
    /// Number of exceptional curves covered by the orbit decomposition.
    pub fn orbit_total(&self) -> u32 {
        self.orbits.iter().map(|(s, m)| s * m).sum()
    }
}

#[derive(Debug, Deserialize)]
struct RawRow {
    row: u32,
    carter: String,
    trace: i64,
    index: i64,
    orbits: String,
    h1: String,
}

fn parse_orbits(s: &str) -> std::result::Result<Vec<(u32, u32)>, String> {
    s.split('*')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (size, mult) = p.split_once('^').unwrap_or((p, "1"));
            let size = size.trim().parse().map_err(|_| format!("bad orbit size in {p:?}"))?;
            let mult = mult.trim().parse().map_err(|_| format!("bad multiplicity in {p:?}"))?;
            Ok((size, mult))
        })
        .collect()
}

/// Parses CSV with header `row,carter,trace,index,orbits,h1`.
pub fn parse_table_str(text: &str, name: &str) -> Result<Vec<UrabeRow>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Table { path: name.into(), line: 1, msg: e.to_string() })?
        .clone();
    let expected = ["row", "carter", "trace", "index", "orbits", "h1"];
    if header.iter().ne(expected) {
        return Err(Error::Table { path: name.into(), line: 1, msg: format!("expected header {}", expected.join(",")) });
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let line_of = |e: &csv::Error| e.position().map_or(0, |p| p.line() as usize);
        let rec = rec.map_err(|e| Error::Table { path: name.into(), line: line_of(&e), msg: e.to_string() })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let raw: RawRow = rec
            .deserialize(Some(&header))
            .map_err(|e| Error::Table { path: name.into(), line, msg: e.to_string() })?;
        let orbits = parse_orbits(&raw.orbits).map_err(|msg| Error::Table { path: name.into(), line, msg })?;
        rows.push(UrabeRow {
            row: raw.row,
            carter: raw.carter,
            trace: raw.trace,
            index: raw.index,
            orbits,
            h1: raw.h1,
        });
    }
    Ok(rows)
}

pub fn parse_table(path: &Path) -> Result<Vec<UrabeRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_table_str(&text, &path.display().to_string())
}

/// Row numbers whose trace gives `q² + qT + 1 = target`.
pub fn filter_rows(rows: &[UrabeRow], q: i64, target: i64) -> Vec<u32> {
    rows.iter().filter(|r| weil_count(q, r.trace) == target).map(|r| r.row).collect()
}
