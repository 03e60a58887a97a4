//! Strict interval-load CSV ingest and emission.
//!
//! Format: header `timestamp,kw`, one row per interval, ISO-8601 local
//! timestamps (`2024-01-01T00:15:00`) at a uniform spacing. Any gap,
//! duplicate, out-of-order timestamp or negative reading is an error that
//! names the offending line.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::NaiveDateTime;
use peakshave::model::LoadProfile;

use crate::{CliError, CliResult};

const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

fn parse_timestamp(s: &str, line: u64) -> CliResult<NaiveDateTime> {
    NaiveDateTime::parse_from_str(s.trim(), TIMESTAMP_FORMAT).map_err(|_| {
        CliError::validation(format!(
            "line {line}: timestamp '{s}' is not ISO-8601 ({TIMESTAMP_FORMAT})"
        ))
    })
}

/// Read a load CSV into a validated [`LoadProfile`].
pub fn ingest_load_csv(path: &Path) -> CliResult<LoadProfile> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;

    {
        let headers = reader.headers()?;
        let cols: Vec<&str> = headers.iter().map(str::trim).collect();
        if cols != ["timestamp", "kw"] {
            return Err(CliError::validation(format!(
                "{}: expected header 'timestamp,kw', got '{}'",
                path.display(),
                cols.join(",")
            )));
        }
    }

    let mut start: Option<NaiveDateTime> = None;
    let mut interval_minutes: Option<i64> = None;
    let mut prev: Option<NaiveDateTime> = None;
    let mut values = Vec::new();

    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(CliError::validation(format!(
                "line {line}: expected 2 fields, got {}",
                record.len()
            )));
        }
        let ts = parse_timestamp(&record[0], line)?;
        let kw: f64 = record[1].trim().parse().map_err(|_| {
            CliError::validation(format!("line {line}: power '{}' is not a number", &record[1]))
        })?;
        if !kw.is_finite() || kw < 0.0 {
            return Err(CliError::validation(format!(
                "line {line}: power {kw} must be finite and >= 0"
            )));
        }

        match prev {
            None => start = Some(ts),
            Some(p) => {
                let gap = (ts - p).num_minutes();
                match interval_minutes {
                    None => {
                        if gap <= 0 {
                            return Err(CliError::validation(format!(
                                "line {line}: timestamp {ts} does not advance past {p}"
                            )));
                        }
                        if (ts - p).num_seconds() != gap * 60 {
                            return Err(CliError::validation(format!(
                                "line {line}: interval is not a whole number of minutes"
                            )));
                        }
                        interval_minutes = Some(gap);
                    }
                    Some(step) => {
                        let expected = p + chrono::Duration::minutes(step);
                        if ts != expected {
                            let what = if ts <= p { "duplicate or out-of-order" } else { "gap" };
                            return Err(CliError::validation(format!(
                                "line {line}: {what} timestamp; expected {}, got {}",
                                expected.format(TIMESTAMP_FORMAT),
                                ts.format(TIMESTAMP_FORMAT)
                            )));
                        }
                    }
                }
            }
        }
        prev = Some(ts);
        values.push(kw);
    }

    let start = start.ok_or_else(|| {
        CliError::validation(format!("{}: no data rows", path.display()))
    })?;
    let interval = interval_minutes.unwrap_or(i64::from(LoadProfile::DEFAULT_INTERVAL_MINUTES));
    let interval = u32::try_from(interval)
        .map_err(|_| CliError::validation("interval does not fit in a u32".to_string()))?;
    Ok(LoadProfile::new(start, interval, values)?)
}

/// Write a profile back out in the same format, full f64 precision.
pub fn emit_load_csv(profile: &LoadProfile, path: &Path) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "timestamp,kw")?;
    let step = chrono::Duration::minutes(i64::from(profile.interval_minutes()));
    let mut ts = profile.start();
    for v in profile.values() {
        writeln!(w, "{},{}", ts.format(TIMESTAMP_FORMAT), v)?;
        ts += step;
    }
    Ok(())
}

/// Read a `dod,cycles` CSV of cycle-life test points.
pub fn ingest_cycle_life_csv(path: &Path) -> CliResult<Vec<(f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    {
        let headers = reader.headers()?;
        let cols: Vec<&str> = headers.iter().map(str::trim).collect();
        if cols != ["dod", "cycles"] {
            return Err(CliError::validation(format!(
                "{}: expected header 'dod,cycles', got '{}'",
                path.display(),
                cols.join(",")
            )));
        }
    }
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let dod: f64 = record[0].trim().parse().map_err(|_| {
            CliError::validation(format!("line {line}: bad DoD '{}'", &record[0]))
        })?;
        let cycles: f64 = record[1].trim().parse().map_err(|_| {
            CliError::validation(format!("line {line}: bad cycle count '{}'", &record[1]))
        })?;
        points.push((dod, cycles));
    }
    Ok(points)
}
