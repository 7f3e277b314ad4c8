use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use qband::tightbinding::BlochHamiltonian;
use qband::SpectralDecomposition;

use crate::output::{num, write_table, Header};
use crate::DecomposeArgs;

#[derive(Deserialize)]
#[serde(untagged)]
enum Cell {
    Real(f64),
    Pair([f64; 2]),
}

impl From<Cell> for Complex64 {
    fn from(c: Cell) -> Self {
        match c {
            Cell::Real(re) => Complex64::new(re, 0.0),
            Cell::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

fn square(rows: Vec<Vec<Complex64>>) -> Result<DMatrix<Complex64>> {
    let n = rows.len();
    if n == 0 {
        bail!("matrix is empty");
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        bail!("row {} has {} entries, expected {n}", bad + 1, rows[bad].len());
    }
    Ok(DMatrix::from_row_iterator(n, n, rows.into_iter().flatten()))
}

pub fn parse_json_matrix(text: &str) -> Result<DMatrix<Complex64>> {
    let rows: Vec<Vec<Cell>> = serde_json::from_str(text).context("expected JSON rows of numbers or [re, im] pairs")?;
    square(rows.into_iter().map(|r| r.into_iter().map(Complex64::from).collect()).collect())
}

/// One matrix row per line; cells parse as complex numbers (`2`, `-1i`,
/// `0.5+0.25i`). Lines starting with `#` are skipped.
pub fn parse_csv_matrix(text: &str) -> Result<DMatrix<Complex64>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|cell| {
                cell.parse::<Complex64>()
                    .map_err(|e| anyhow::anyhow!("row {}: cannot parse {cell:?}: {e}", i + 1))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    square(rows)
}

pub fn load_matrix(path: &Path) -> Result<DMatrix<Complex64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) || text.trim_start().starts_with('[') {
        parse_json_matrix(&text)
    } else {
        parse_csv_matrix(&text)
    }
}

#[derive(Serialize)]
struct DecomposeConfig {
    dim: usize,
    matrix: Vec<[f64; 2]>,
}

/// Non-power-of-two inputs are padded with decoupled high-energy levels
/// before decomposition.
pub fn run_decompose(args: &DecomposeArgs) -> Result<SpectralDecomposition> {
    let m = load_matrix(&args.matrix)?;
    let h = BlochHamiltonian::new(m)?;
    let config = DecomposeConfig {
        dim: h.dim(),
        matrix: h.matrix.iter().map(|c| [c.re, c.im]).collect(),
    };
    let header = Header::new("decompose", &config, 0)?;
    let padded = if h.dim().is_power_of_two() {
        h
    } else {
        h.padded_to_power_of_two()
    };
    let d = SpectralDecomposition::decompose(&padded)?;
    let rows: Vec<Vec<String>> = d
        .terms()
        .map(|(w, c)| vec![w.to_string(), num(c)])
        .collect();
    write_table(&args.out, "decomposition.csv", &header, &["word", "coefficient"], &rows)?;
    Ok(d)
}
