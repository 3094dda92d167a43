//! Writing result records as CSV or JSON.
//!
//! CSV: one `<table>.csv` per table plus `<mode>.meta.json`. JSON: a single
//! `<mode>.json` with the metadata and every table. Numbers are written in
//! their shortest round-trip form, so parsing them back is exact.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::run::{Cell, ResultRecord, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub fn format_cell(c: &Cell) -> String {
    match c {
        // Debug prints the shortest string that parses back to the same f64.
        Cell::Num(x) => format!("{x:?}"),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Missing => String::new(),
    }
}

pub fn table_to_csv(t: &Table) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.columns)?;
    for row in &t.rows {
        w.write_record(row.iter().map(format_cell))?;
    }
    Ok(w.into_inner().context("flushing CSV")?)
}

#[derive(Serialize)]
struct JsonTable<'a> {
    columns: &'a [String],
    rows: &'a [Vec<Cell>],
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    metadata: &'a crate::run::Metadata,
    validation_passed: Option<bool>,
    tables: std::collections::BTreeMap<&'a str, JsonTable<'a>>,
}

/// JSON text of the tables alone: the part that must not depend on the
/// machine or thread count.
pub fn payload_json(record: &ResultRecord) -> String {
    let tables: std::collections::BTreeMap<&str, JsonTable> = record
        .tables
        .iter()
        .map(|t| (t.name.as_str(), JsonTable { columns: &t.columns, rows: &t.rows }))
        .collect();
    serde_json::to_string(&tables).expect("tables always serialize")
}

/// Writes `record` under `dir` and returns the paths written.
pub fn emit(record: &ResultRecord, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let stem = record.metadata.mode.stem();
    let mut written = Vec::new();
    let mut write = |name: String, bytes: &[u8]| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
        Ok(())
    };
    match format {
        Format::Csv => {
            for t in &record.tables {
                write(format!("{}.csv", t.name), &table_to_csv(t)?)?;
            }
            let meta = serde_json::json!({
                "metadata": record.metadata,
                "validation_passed": record.validation_passed,
                "tables": record.tables.iter().map(|t| format!("{}.csv", t.name)).collect::<Vec<_>>(),
            });
            write(format!("{stem}.meta.json"), serde_json::to_string_pretty(&meta)?.as_bytes())?;
        }
        Format::Json => {
            let rec = JsonRecord {
                metadata: &record.metadata,
                validation_passed: record.validation_passed,
                tables: record
                    .tables
                    .iter()
                    .map(|t| (t.name.as_str(), JsonTable { columns: &t.columns, rows: &t.rows }))
                    .collect(),
            };
            write(format!("{stem}.json"), serde_json::to_string_pretty(&rec)?.as_bytes())?;
        }
    }
    Ok(written)
}

/// Reads a CSV written by [`emit`]; numeric-looking fields become numbers.
pub fn read_csv(path: &Path) -> Result<Table> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let columns = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(
            rec.iter()
                .map(|f| {
                    if f.is_empty() {
                        Cell::Missing
                    } else if let Ok(i) = f.parse::<i64>() {
                        Cell::Int(i)
                    } else if let Ok(x) = f.parse::<f64>() {
                        Cell::Num(x)
                    } else {
                        Cell::Text(f.to_string())
                    }
                })
                .collect(),
        );
    }
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
    Ok(Table { name, columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_through_text() {
        for x in [0.1, 1.0 / 3.0, 1e-12, 2.5e300, -0.0, 123456789.123456789, f64::MIN_POSITIVE] {
            let s = format_cell(&Cell::Num(x));
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
    }
}
