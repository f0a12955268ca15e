//! CSV ingestion/emission and atomic file writes.
//!
//! Record CSV format: header row; optional first column `t` in seconds;
//! probe columns named `x<i>`, `y<i>` for sections i = 1..K. All numeric
//! output uses the shortest decimal representation that parses back to the
//! identical value.

use std::fs;
use std::path::{Path, PathBuf};

use whirl_core::{MultiSectionRecord, RealSeries};

use crate::error::{CliError, Result};

/// Write via a temp file in the same directory plus rename, so readers never
/// observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = match path.file_name() {
        Some(name) => {
            let mut n = name.to_os_string();
            n.push(".tmp");
            path.with_file_name(n)
        }
        None => return Err(CliError::input(format!("invalid path {}", path.display()))),
    };
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Format with full round-trip precision.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Serialize a record as CSV with a `t` column.
pub fn record_to_csv(record: &MultiSectionRecord) -> String {
    let mut header = vec!["t".to_string()];
    for i in 1..=record.section_count() {
        header.push(format!("x{i}"));
        header.push(format!("y{i}"));
    }
    let mut out = header.join(",");
    out.push('\n');
    let fs_hz = record.sample_rate();
    for n in 0..record.len() {
        let mut row = vec![fmt_f64(n as f64 / fs_hz)];
        for (x, y) in record.sections() {
            row.push(fmt_f64(x.samples()[n]));
            row.push(fmt_f64(y.samples()[n]));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn parse_cell(raw: &str, row: usize, column: &str) -> Result<f64> {
    raw.trim().parse::<f64>().map_err(|_| {
        CliError::input(format!(
            "row {row}, column {column}: cannot parse {raw:?} as a number"
        ))
    })
}

/// Read a multi-section record from CSV.
///
/// Probe columns are taken from `columns` (x/y interleaved per section) when
/// given, otherwise auto-detected as x1,y1,x2,y2,... The sample rate comes
/// from `rate_override` when set, else from the `t` column.
pub fn read_record_csv(
    path: &PathBuf,
    columns: &[String],
    rate_override: Option<f64>,
) -> Result<MultiSectionRecord> {
    let raw = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let mut reader = csv::Reader::from_reader(raw.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    let col_index = |name: &str| -> Result<usize> {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::input(format!("column {name:?} not found in header")))
    };

    let probe_names: Vec<String> = if columns.is_empty() {
        let mut names = Vec::new();
        for i in 1.. {
            let (x, y) = (format!("x{i}"), format!("y{i}"));
            if header.contains(&x) && header.contains(&y) {
                names.push(x);
                names.push(y);
            } else {
                break;
            }
        }
        if names.is_empty() {
            return Err(CliError::input(
                "no probe columns found (expected x1,y1,x2,y2,... or an explicit --columns list)",
            ));
        }
        names
    } else {
        if !columns.len().is_multiple_of(2) {
            return Err(CliError::input(
                "--columns must list an even number of names (x/y interleaved per section)",
            ));
        }
        columns.to_vec()
    };
    let probe_idx: Vec<usize> = probe_names
        .iter()
        .map(|n| col_index(n))
        .collect::<Result<_>>()?;
    let time_idx = header.iter().position(|h| h == "t");

    let mut times = Vec::new();
    let mut series: Vec<Vec<f64>> = vec![Vec::new(); probe_idx.len()];
    for (row_num, row) in reader.records().enumerate() {
        let row = row.map_err(|e| CliError::input(format!("row {}: {e}", row_num + 2)))?;
        if let Some(ti) = time_idx {
            let raw = row
                .get(ti)
                .ok_or_else(|| CliError::input(format!("row {}: missing t cell", row_num + 2)))?;
            times.push(parse_cell(raw, row_num + 2, "t")?);
        }
        for (s, (&ci, name)) in probe_idx.iter().zip(&probe_names).enumerate() {
            let raw = row.get(ci).ok_or_else(|| {
                CliError::input(format!("row {}: missing {name} cell", row_num + 2))
            })?;
            series[s].push(parse_cell(raw, row_num + 2, name)?);
        }
    }

    let sample_rate = match rate_override {
        Some(r) => r,
        None => {
            if times.len() < 2 {
                return Err(CliError::input(
                    "sample rate unknown: provide --sample-rate or a t column",
                ));
            }
            let span = times[times.len() - 1] - times[0];
            if span <= 0.0 {
                return Err(CliError::input("t column is not increasing"));
            }
            (times.len() - 1) as f64 / span
        }
    };

    let mut sections = Vec::new();
    let mut labels = Vec::new();
    for (i, pair) in series.chunks(2).enumerate() {
        let x = RealSeries::new(pair[0].clone(), sample_rate)
            .map_err(|e| CliError::input(format!("column {}: {e}", probe_names[2 * i])))?;
        let y = RealSeries::new(pair[1].clone(), sample_rate)
            .map_err(|e| CliError::input(format!("column {}: {e}", probe_names[2 * i + 1])))?;
        sections.push((x, y));
        labels.push(format!("section{}", i + 1));
    }
    MultiSectionRecord::new(sections, labels).map_err(|e| CliError::input(e.to_string()))
}

/// Assemble a CSV document from a header and rows of full-precision floats.
pub fn csv_document(header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_f64).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
