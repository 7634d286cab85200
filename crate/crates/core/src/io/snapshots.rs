use std::fs;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;

use super::fmt_f64;
use crate::error::{DmdError, Result};

/// On-disk snapshot layouts.
///
/// * `Csv`: one state per column, one row per state coordinate, optional
///   header row (a first row in which no cell parses as a number).
/// * `RawF64`: little-endian `u64 n`, `u64 m`, then `n * m` `f64` values in
///   column-major order (state after state).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotFormat {
    Csv,
    RawF64,
}

impl FromStr for SnapshotFormat {
    type Err = DmdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(SnapshotFormat::Csv),
            "raw_f64" | "raw" | "f64" => Ok(SnapshotFormat::RawF64),
            other => Err(DmdError::input(format!(
                "unknown snapshot format '{other}'"
            ))),
        }
    }
}

/// Reads a snapshot matrix (`n x m`, states as columns).
pub fn load_snapshots(path: impl AsRef<Path>, format: SnapshotFormat) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    match format {
        SnapshotFormat::Csv => parse_csv(&fs::read_to_string(path)?),
        SnapshotFormat::RawF64 => parse_raw_f64(&fs::read(path)?),
    }
}

pub fn save_snapshots(
    path: impl AsRef<Path>,
    x: &DMatrix<f64>,
    format: SnapshotFormat,
) -> Result<()> {
    match format {
        SnapshotFormat::Csv => fs::write(path, to_csv(x))?,
        SnapshotFormat::RawF64 => fs::write(path, to_raw_f64(x))?,
    }
    Ok(())
}

pub fn parse_csv(text: &str) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(idx as u64 + 1);
            DmdError::format(format!("line {line}"), e.to_string())
        })?;
        let line = record
            .position()
            .map(|p| p.line())
            .unwrap_or(idx as u64 + 1);
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        if idx == 0 && record.iter().all(|c| c.parse::<f64>().is_err()) {
            continue; // header
        }
        let mut row = Vec::with_capacity(record.len());
        for (col, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                DmdError::format(
                    format!("line {line}, column {}", col + 1),
                    format!("non-numeric cell '{cell}'"),
                )
            })?;
            row.push(v);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(DmdError::format(
                    format!("line {line}"),
                    format!("ragged row: {} cells, expected {w}", row.len()),
                ));
            }
            _ => {}
        }
        rows.push(row);
    }
    let m = width.ok_or_else(|| DmdError::format("line 1", "no data rows"))?;
    let n = rows.len();
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

pub fn to_csv(x: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for row in x.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_raw_f64(bytes: &[u8]) -> Result<DMatrix<f64>> {
    let word = |offset: usize| -> Result<[u8; 8]> {
        bytes
            .get(offset..offset + 8)
            .map(|b| b.try_into().expect("slice of length 8"))
            .ok_or_else(|| {
                DmdError::format(
                    format!("byte offset {offset}"),
                    format!("truncated input ({} bytes)", bytes.len()),
                )
            })
    };
    let n = u64::from_le_bytes(word(0)?) as usize;
    let m = u64::from_le_bytes(word(8)?) as usize;
    let count = n
        .checked_mul(m)
        .ok_or_else(|| DmdError::format("byte offset 0", "dimension overflow"))?;
    let expected = count
        .checked_mul(8)
        .and_then(|b| b.checked_add(16))
        .ok_or_else(|| DmdError::format("byte offset 0", "dimension overflow"))?;
    if bytes.len() < expected {
        return Err(DmdError::format(
            format!("byte offset {}", bytes.len()),
            format!("truncated payload: need {expected} bytes for {n}x{m}"),
        ));
    }
    if bytes.len() > expected {
        return Err(DmdError::format(
            format!("byte offset {expected}"),
            format!("{} trailing bytes", bytes.len() - expected),
        ));
    }
    let mut data = Vec::with_capacity(count);
    for k in 0..count {
        data.push(f64::from_le_bytes(word(16 + 8 * k)?));
    }
    Ok(DMatrix::from_vec(n, m, data))
}

pub fn to_raw_f64(x: &DMatrix<f64>) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 8 * x.len());
    out.extend_from_slice(&(x.nrows() as u64).to_le_bytes());
    out.extend_from_slice(&(x.ncols() as u64).to_le_bytes());
    for v in x.iter() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}
