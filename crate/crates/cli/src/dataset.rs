//! Dataset ingestion.
//!
//! One CSV schema carries every analysis: columns `time` (positive real),
//! `status` (0 censored, 1 event of interest, 2 competing event), and
//! `group` (1 or 2), with a mandatory header row. Diagnostics name the
//! offending row, counting the header as row 1.

use std::path::Path;

use rmtl::{Group, Sample, Status, SurvRecord};

use crate::error::{CliError, Result};

struct Columns {
    time: usize,
    status: usize,
    group: usize,
}

fn resolve_columns(headers: &csv::StringRecord) -> Result<Columns> {
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or_else(|| CliError::input(format!("missing column {name:?} in the header row")))
    };
    Ok(Columns { time: find("time")?, status: find("status")?, group: find("group")? })
}

fn field<'a>(row: &'a csv::StringRecord, index: usize, name: &str, rownum: usize) -> Result<&'a str> {
    row.get(index)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| CliError::input(format!("missing {name} value (row {rownum})")))
}

/// Reads a CSV file into a validated two-group sample.
pub fn parse_dataset(path: &Path) -> Result<Sample> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|err| CliError::input(format!("cannot read {}: {err}", path.display())))?;
    let headers = reader.headers().map_err(|err| CliError::input(err.to_string()))?.clone();
    let columns = resolve_columns(&headers)?;

    let mut records = Vec::new();
    for (index, row) in reader.records().enumerate() {
        let rownum = index + 2; // the header occupies row 1
        let row = row.map_err(|err| {
            CliError::input(format!("malformed CSV record (row {rownum}): {err}"))
        })?;

        let raw_time = field(&row, columns.time, "time", rownum)?;
        let time: f64 = raw_time
            .parse()
            .map_err(|_| CliError::input(format!("invalid time {raw_time:?} (row {rownum})")))?;
        if !time.is_finite() {
            return Err(CliError::input(format!("time must be finite (row {rownum})")));
        }
        if time <= 0.0 {
            return Err(CliError::input(format!("time must be positive (row {rownum})")));
        }

        let raw_status = field(&row, columns.status, "status", rownum)?;
        let status_code: u8 = raw_status.parse().map_err(|_| {
            CliError::input(format!("invalid status {raw_status:?} (row {rownum})"))
        })?;
        let status = Status::from_code(status_code).ok_or_else(|| {
            CliError::input(format!("unknown status {status_code} (row {rownum})"))
        })?;

        let raw_group = field(&row, columns.group, "group", rownum)?;
        let group_code: u8 = raw_group.parse().map_err(|_| {
            CliError::input(format!("invalid group {raw_group:?} (row {rownum})"))
        })?;
        let group = Group::from_code(group_code).ok_or_else(|| {
            CliError::input(format!("unknown group {group_code} (row {rownum})"))
        })?;

        records.push(SurvRecord { time, status, group });
    }

    if records.is_empty() {
        return Err(CliError::input(format!("{} contains no data rows", path.display())));
    }
    Sample::new(records).map_err(CliError::from)
}
