//! Traffic CSV reading and writing: `cell_id,timestamp_iso8601_utc,dl_bytes`.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, Duration, NaiveDateTime, SecondsFormat, Utc};
use serde::Serialize;

use crate::error::{Error, ParseIssue, Result};
use crate::series::{is_hour_aligned, HourlyTrace};

pub const HEADER: [&str; 3] = ["cell_id", "timestamp_iso8601_utc", "dl_bytes"];
pub const LABELS_HEADER: [&str; 2] = ["cell_id", "archetype"];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestOptions {
    /// Reject duplicate (cell, hour) rows instead of keeping the first.
    pub strict: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestSummary {
    pub rows: usize,
    pub cells: usize,
    /// Distinct UTC dates touched by any row.
    pub days: usize,
    /// `NA` values.
    pub missing_values: usize,
    /// Hours inside a cell's span with no row at all.
    pub absent_hours: usize,
    /// Repeated (cell, hour) rows ignored in lenient mode.
    pub duplicates: usize,
    pub first: Option<DateTime<Utc>>,
    pub last: Option<DateTime<Utc>>,
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub traces: Vec<HourlyTrace>,
    pub summary: IngestSummary,
}

struct CellRows {
    line: usize,
    samples: Vec<(DateTime<Utc>, Option<f64>, usize)>,
}

fn parse_timestamp(s: &str) -> std::result::Result<DateTime<Utc>, String> {
    let ts = DateTime::parse_from_rfc3339(s)
        .map(|t| t.with_timezone(&Utc))
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S").map(|t| t.and_utc()))
        .map_err(|_| format!("invalid timestamp {s:?}"))?;
    if !is_hour_aligned(ts) {
        return Err(format!("timestamp {s:?} is not on the hour"));
    }
    Ok(ts)
}

fn parse_volume(s: &str) -> std::result::Result<Option<f64>, String> {
    if s == "NA" {
        return Ok(None);
    }
    s.parse::<u64>().map(|v| Some(v as f64)).map_err(|_| format!("dl_bytes {s:?} is not a non-negative integer or NA"))
}

/// Parse traffic rows into one trace per cell, in order of first appearance.
/// Every malformed row is reported with its line number.
pub fn read_traffic_csv<R: Read>(reader: R, options: IngestOptions) -> Result<Ingested> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().map(str::trim).ne(HEADER.iter().copied()) {
        return Err(Error::Malformed(vec![ParseIssue {
            line: 1,
            message: format!("expected header {}", HEADER.join(",")),
        }]));
    }

    let mut issues = Vec::new();
    let mut order: Vec<String> = Vec::new();
    let mut cells: HashMap<String, CellRows> = HashMap::new();
    let mut summary = IngestSummary::default();
    let mut record = csv::StringRecord::new();
    loop {
        let line = rdr.position().line() as usize;
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                issues.push(ParseIssue { line, message: e.to_string() });
                continue;
            }
        }
        if record.len() != 3 {
            issues.push(ParseIssue { line, message: format!("expected 3 fields, found {}", record.len()) });
            continue;
        }
        let cell = record[0].trim();
        if cell.is_empty() {
            issues.push(ParseIssue { line, message: "empty cell_id".into() });
            continue;
        }
        let parsed = parse_timestamp(record[1].trim()).and_then(|ts| Ok((ts, parse_volume(record[2].trim())?)));
        let (ts, value) = match parsed {
            Ok(p) => p,
            Err(message) => {
                issues.push(ParseIssue { line, message });
                continue;
            }
        };
        summary.rows += 1;
        let entry = cells.entry(cell.to_string()).or_insert_with(|| {
            order.push(cell.to_string());
            CellRows { line, samples: Vec::new() }
        });
        entry.samples.push((ts, value, line));
        if value.is_none() {
            summary.missing_values += 1;
        }
    }

    let mut traces = Vec::with_capacity(order.len());
    let mut days = std::collections::BTreeSet::new();
    for id in &order {
        let rows = cells.remove(id).expect("recorded");
        let mut samples = rows.samples;
        samples.sort_by_key(|&(ts, _, line)| (ts, line));
        let start = samples[0].0;
        let end = samples[samples.len() - 1].0;
        let len = (end - start).num_hours() as usize + 1;
        let mut values: Vec<Option<f64>> = vec![None; len];
        let mut seen = vec![false; len];
        for (ts, v, line) in samples {
            let i = (ts - start).num_hours() as usize;
            if seen[i] {
                if options.strict {
                    issues.push(ParseIssue {
                        line,
                        message: format!("duplicate row for cell {id} at {}", format_timestamp(ts)),
                    });
                }
                summary.duplicates += 1;
                continue;
            }
            seen[i] = true;
            values[i] = v;
            days.insert(ts.date_naive());
        }
        summary.absent_hours += seen.iter().filter(|s| !**s).count();
        summary.first = Some(summary.first.map_or(start, |f| f.min(start)));
        summary.last = Some(summary.last.map_or(end, |l| l.max(end)));
        match HourlyTrace::new(id.as_str(), start, values) {
            Ok(t) => traces.push(t),
            Err(e) => issues.push(ParseIssue { line: rows.line, message: e.to_string() }),
        }
    }
    if !issues.is_empty() {
        issues.sort_by_key(|i| i.line);
        return Err(Error::Malformed(issues));
    }
    if traces.is_empty() {
        return Err(Error::invalid("file contains no data rows"));
    }
    summary.cells = traces.len();
    summary.days = days.len();
    Ok(Ingested { traces, summary })
}

pub fn read_traffic_csv_path(path: &Path, options: IngestOptions) -> Result<Ingested> {
    let file = std::fs::File::open(path)?;
    read_traffic_csv(std::io::BufReader::new(file), options)
}

pub fn format_timestamp(ts: DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Write traces in the ingest format; values are rounded to whole bytes.
pub fn write_traffic_csv<W: Write>(traces: &[HourlyTrace], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER)?;
    for trace in traces {
        for (i, v) in trace.values().iter().enumerate() {
            let ts = trace.start() + Duration::hours(i as i64);
            let volume = v.map_or_else(|| "NA".to_string(), |x| format!("{}", x.round() as u64));
            w.write_record([trace.cell_id(), &format_timestamp(ts), &volume])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_labels_csv<W: Write>(labels: &[(String, String)], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(LABELS_HEADER)?;
    for (cell, archetype) in labels {
        w.write_record([cell, archetype])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_labels_csv<R: Read>(reader: R) -> Result<Vec<(String, String)>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(Error::Parse { line: i + 2, message: "expected cell_id,archetype".into() });
        }
        out.push((rec[0].to_string(), rec[1].to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timestamp_forms() {
        let a = parse_timestamp("2021-03-01T05:00:00Z").unwrap();
        assert_eq!(parse_timestamp("2021-03-01T06:00:00+01:00").unwrap(), a);
        assert_eq!(parse_timestamp("2021-03-01T05:00:00").unwrap(), a);
        assert!(parse_timestamp("2021-03-01T05:30:00Z").is_err());
        assert!(parse_timestamp("yesterday").is_err());
        assert_eq!(format_timestamp(a), "2021-03-01T05:00:00Z");
    }

    #[test]
    fn volumes() {
        assert_eq!(parse_volume("NA").unwrap(), None);
        assert_eq!(parse_volume("42").unwrap(), Some(42.0));
        assert!(parse_volume("-1").is_err());
        assert!(parse_volume("1.5").is_err());
    }
}
