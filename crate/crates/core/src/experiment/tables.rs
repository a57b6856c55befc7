use std::path::{Path, PathBuf};

use super::format::format_sig6;
use super::sweep::{SweepReport, SweepRow};
use crate::metrics::ObjectiveKind;
use crate::{Error, Result};

pub const MEASURES_FILE: &str = "measures.csv";
pub const INDICES_FILE: &str = "indices.csv";
pub const RUNS_FILE: &str = "runs.csv";

const MEASURES_HEADER: [&str; 7] =
    ["method", "rows", "percent_overshoot", "settling_time", "rise_time", "peak_time", "stability_margin"];
const INDICES_HEADER: [&str; 7] = ["delay", "method", "mse", "iae", "ise", "itae", "itse"];
const RUNS_HEADER: [&str; 21] = [
    "delay",
    "method",
    "kd",
    "kp",
    "ki",
    "mse",
    "iae",
    "ise",
    "itae",
    "itse",
    "percent_overshoot",
    "settling_time",
    "settled",
    "rise_time",
    "peak_time",
    "stability_margin",
    "converged",
    "seed",
    "retried",
    "valid",
    "note",
];

/// Writes `measures.csv` (per-method averages of the standard measures),
/// `indices.csv` (every row's indices, then one `average` row per method) and
/// `runs.csv` (one line per row with gains and all metrics).
pub fn emit_csv(report: &SweepReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let measures = dir.join(MEASURES_FILE);
    write_records(&measures, &MEASURES_HEADER, measures_records(report))?;
    let indices = dir.join(INDICES_FILE);
    write_records(&indices, &INDICES_HEADER, indices_records(report))?;
    let runs = dir.join(RUNS_FILE);
    write_records(&runs, &RUNS_HEADER, report.rows.iter().map(run_record).collect())?;
    Ok(vec![measures, indices, runs])
}

fn write_records(path: &Path, header: &[&str], records: Vec<Vec<String>>) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(file);
    writer.write_record(header)?;
    for record in records {
        writer.write_record(&record)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

fn indices_fields(ix: &crate::metrics::PerformanceIndices<f64>) -> impl Iterator<Item = String> + '_ {
    ObjectiveKind::ALL.into_iter().map(move |k| format_sig6(ix.get(k)))
}

fn measures_records(report: &SweepReport) -> Vec<Vec<String>> {
    report
        .averages
        .iter()
        .map(|a| {
            let mut r = vec![a.method.name(), a.rows.to_string()];
            r.extend(
                [a.percent_overshoot, a.settling_time, a.rise_time, a.peak_time, a.stability_margin].map(format_sig6),
            );
            r
        })
        .collect()
}

fn indices_records(report: &SweepReport) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|row| {
            let mut r = vec![format_sig6(row.delay), row.method.name()];
            r.extend(indices_fields(&row.indices));
            r
        })
        .collect();
    out.extend(report.averages.iter().map(|a| {
        let mut r = vec!["average".to_string(), a.method.name()];
        r.extend(indices_fields(&a.indices));
        r
    }));
    out
}

fn run_record(row: &SweepRow) -> Vec<String> {
    let opt = |v: Option<f64>| v.map(format_sig6).unwrap_or_default();
    let m = row.measures;
    let mut r = vec![format_sig6(row.delay), row.method.name()];
    r.extend(row.gains.to_array().map(format_sig6));
    r.extend(indices_fields(&row.indices));
    r.push(opt(m.map(|m| m.percent_overshoot)));
    r.push(opt(m.map(|m| m.settling_time_5pct)));
    r.push(m.map(|m| m.settled.to_string()).unwrap_or_default());
    r.push(opt(m.map(|m| m.rise_time_0_95)));
    r.push(opt(m.map(|m| m.peak_time)));
    r.push(opt(row.stability_margin()));
    r.push(row.converged.map(|c| c.to_string()).unwrap_or_default());
    r.push(row.seed.map(|s| s.to_string()).unwrap_or_default());
    r.push(row.retried.to_string());
    r.push(row.valid.to_string());
    r.push(row.note.clone().unwrap_or_default());
    r
}
