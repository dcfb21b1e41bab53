use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::record::ResultRecord;
use crate::{Error, Result};

/// Columns of the CSV summary, one row per record. `wall_time_ms` is last
/// so determinism checks can drop it.
pub const CSV_HEADER: [&str; 11] = [
    "config_hash",
    "kind",
    "seed",
    "reps",
    "points",
    "assertions",
    "failed",
    "passed",
    "version",
    "detail",
    "wall_time_ms",
];

pub const PLOT_HEADER: [&str; 7] = ["kind", "series", "x", "mc", "mc_lo", "mc_hi", "bound"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
    Plotdata,
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Compact per-point and per-assertion summary for the `detail` column.
pub fn detail(record: &ResultRecord) -> String {
    let mut s = String::new();
    for p in &record.points {
        let _ = write!(s, "{}@{}", p.series, p.x);
        if let Some(m) = &p.mc {
            let _ = write!(s, " mc={}±{}", m.estimate, m.half_width);
        }
        if let Some(v) = p.value {
            let _ = write!(s, " value={v}");
        }
        if let Some(b) = p.bound {
            let _ = write!(s, " bound={b}");
        }
        s.push_str("; ");
    }
    for a in &record.assertions {
        let _ = write!(s, "[{}] {}: {} <= {}; ", if a.passed { "pass" } else { "FAIL" }, a.name, a.lhs, a.rhs);
    }
    s.trim_end_matches("; ").to_string()
}

pub fn csv_row(record: &ResultRecord) -> Vec<String> {
    let failed = record.failures().count();
    vec![
        record.config_hash.clone(),
        record.kind.clone(),
        record.seed.to_string(),
        record.reps.to_string(),
        record.points.len().to_string(),
        record.assertions.len().to_string(),
        failed.to_string(),
        (failed == 0).to_string(),
        record.version.clone(),
        detail(record),
        record.wall_time_ms.to_string(),
    ]
}

pub fn to_csv(records: &[ResultRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record(csv_row(r)).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn to_json(records: &[ResultRecord]) -> Result<String> {
    serde_json::to_string_pretty(records).map_err(|e| Error::Io(e.to_string()))
}

pub fn from_json(text: &str) -> Result<Vec<ResultRecord>> {
    serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `(x, mc, mc_lo, mc_hi, bound)` per point, tagged with kind and series.
/// Deterministic values fill the `mc` column with empty interval columns.
pub fn to_plotdata(records: &[ResultRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(PLOT_HEADER).map_err(csv_err)?;
    for r in records {
        for p in &r.points {
            let (mc, lo, hi) = match &p.mc {
                Some(m) => (Some(m.estimate), Some(m.lo), Some(m.hi)),
                None => (p.value, None, None),
            };
            w.write_record([
                r.kind.clone(),
                p.series.clone(),
                p.x.to_string(),
                opt(mc),
                opt(lo),
                opt(hi),
                opt(p.bound),
            ])
            .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render(records: &[ResultRecord], format: Format) -> Result<String> {
    match format {
        Format::Csv => to_csv(records),
        Format::Json => to_json(records),
        Format::Plotdata => to_plotdata(records),
    }
}

pub fn emit(records: &[ResultRecord], format: Format, path: &Path) -> Result<()> {
    let text = render(records, format)?;
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Drops the trailing `wall_time_ms` column from every CSV line.
pub fn strip_wall_time(csv_text: &str) -> Result<String> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(csv_text.as_bytes());
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in r.records() {
        let row = row.map_err(csv_err)?;
        let keep: Vec<&str> = row.iter().take(row.len().saturating_sub(1)).collect();
        w.write_record(keep).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
