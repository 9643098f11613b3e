//! Hourly traces, network aggregation and busy-hour extraction.

mod acf;
mod boxcox;
mod diff;

pub use acf::{acf, pacf, pacf_from_acf};
pub use boxcox::{boxcox_apply, boxcox_fit, boxcox_invert, boxcox_log_likelihood, TransformParams};
pub use diff::{difference, undifference};

use chrono::{DateTime, Datelike, Duration, NaiveDate, Timelike, Utc, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One cell's hourly downlink volume. `None` marks an explicitly missing sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlyTrace {
    cell_id: String,
    start: DateTime<Utc>,
    values: Vec<Option<f64>>,
}

impl HourlyTrace {
    pub fn new(cell_id: impl Into<String>, start: DateTime<Utc>, values: Vec<Option<f64>>) -> Result<Self> {
        let cell_id = cell_id.into();
        if !is_hour_aligned(start) {
            return Err(Error::invalid(format!("trace {cell_id}: start {start} is not hour-aligned")));
        }
        if values.len() < 24 {
            return Err(Error::invalid(format!("trace {cell_id}: {} hourly values, need at least 24", values.len())));
        }
        if let Some(i) = values.iter().position(|v| matches!(v, Some(x) if !(x.is_finite() && *x >= 0.0))) {
            return Err(Error::invalid(format!("trace {cell_id}: negative or non-finite value at index {i}")));
        }
        Ok(Self { cell_id, start, values })
    }

    /// Convenience constructor for fully observed traces.
    pub fn from_values(cell_id: impl Into<String>, start: DateTime<Utc>, values: Vec<f64>) -> Result<Self> {
        Self::new(cell_id, start, values.into_iter().map(Some).collect())
    }

    pub fn cell_id(&self) -> &str {
        &self.cell_id
    }

    pub fn start(&self) -> DateTime<Utc> {
        self.start
    }

    /// Exclusive end timestamp.
    pub fn end(&self) -> DateTime<Utc> {
        self.start + Duration::hours(self.values.len() as i64)
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    pub fn index_of(&self, ts: DateTime<Utc>) -> Option<usize> {
        hour_offset(self.start, ts).filter(|&i| i < self.values.len())
    }

    pub fn covers(&self, window: &TimeWindow) -> bool {
        self.start <= window.start && self.end() >= window.end
    }

    /// Values over `window` with missing samples resolved by `policy`.
    pub fn window_values(&self, window: &TimeWindow, policy: MissingPolicy) -> Result<Vec<f64>> {
        if !self.covers(window) {
            return Err(Error::NotCovered(format!(
                "window {}..{} for cell {}",
                window.start, window.end, self.cell_id
            )));
        }
        let from = hour_offset(self.start, window.start).expect("covered");
        let slice = &self.values[from..from + window.hours()];
        policy.resolve(slice).map_err(|index| Error::Missing { cell: self.cell_id.clone(), index: from + index })
    }

    /// Multiply every value by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            cell_id: self.cell_id.clone(),
            start: self.start,
            values: self.values.iter().map(|v| v.map(|x| x * factor)).collect(),
        }
    }
}

/// Half-open, hour-aligned UTC time range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

impl TimeWindow {
    pub fn new(start: DateTime<Utc>, end: DateTime<Utc>) -> Result<Self> {
        if !is_hour_aligned(start) || !is_hour_aligned(end) {
            return Err(Error::invalid("window bounds must be hour-aligned"));
        }
        if end <= start {
            return Err(Error::invalid("window end must follow its start"));
        }
        Ok(Self { start, end })
    }

    /// Whole UTC days `first..=last`.
    pub fn days(first: NaiveDate, last: NaiveDate) -> Result<Self> {
        Self::new(midnight(first), midnight(last + Duration::days(1)))
    }

    pub fn hours(&self) -> usize {
        (self.end - self.start).num_hours() as usize
    }
}

/// How missing hourly samples are resolved before aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy")]
pub enum MissingPolicy {
    #[default]
    Reject,
    /// Linear interpolation across interior gaps of at most `max_gap` hours.
    Interpolate { max_gap: usize },
}

impl MissingPolicy {
    pub const DEFAULT_MAX_GAP: usize = 3;

    /// Resolve missing samples; on failure returns the index of the first
    /// unresolved sample.
    fn resolve(self, values: &[Option<f64>]) -> std::result::Result<Vec<f64>, usize> {
        let mut out = Vec::with_capacity(values.len());
        let mut i = 0;
        while i < values.len() {
            match values[i] {
                Some(v) => {
                    out.push(v);
                    i += 1;
                }
                None => {
                    let MissingPolicy::Interpolate { max_gap } = self else {
                        return Err(i);
                    };
                    let gap_end = (i..values.len()).find(|&j| values[j].is_some()).ok_or(i)?;
                    let gap = gap_end - i;
                    if i == 0 || gap > max_gap {
                        return Err(i);
                    }
                    let left = out[i - 1];
                    let right = values[gap_end].expect("found");
                    for step in 1..=gap {
                        let frac = step as f64 / (gap + 1) as f64;
                        out.push(left + (right - left) * frac);
                    }
                    i = gap_end;
                }
            }
        }
        Ok(out)
    }
}

/// Hourly sums over a set of traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateSeries {
    pub start: DateTime<Utc>,
    pub values: Vec<f64>,
}

impl AggregateSeries {
    pub fn value_at(&self, ts: DateTime<Utc>) -> Option<f64> {
        hour_offset(self.start, ts).and_then(|i| self.values.get(i).copied())
    }
}

/// Hourly data that busy hours can be extracted from.
pub trait HourlySource {
    fn start(&self) -> DateTime<Utc>;
    fn sample_count(&self) -> usize;
    fn sample(&self, index: usize) -> Option<f64>;
}

impl HourlySource for AggregateSeries {
    fn start(&self) -> DateTime<Utc> {
        self.start
    }
    fn sample_count(&self) -> usize {
        self.values.len()
    }
    fn sample(&self, index: usize) -> Option<f64> {
        self.values.get(index).copied()
    }
}

impl HourlySource for HourlyTrace {
    fn start(&self) -> DateTime<Utc> {
        self.start
    }
    fn sample_count(&self) -> usize {
        self.values.len()
    }
    fn sample(&self, index: usize) -> Option<f64> {
        self.values.get(index).copied().flatten()
    }
}

/// Sum traces hour by hour over `window`.
pub fn aggregate_network<'a, I>(traces: I, window: &TimeWindow, policy: MissingPolicy) -> Result<AggregateSeries>
where
    I: IntoIterator<Item = &'a HourlyTrace>,
{
    let mut values = vec![0.0; window.hours()];
    let mut count = 0;
    for trace in traces {
        let part = trace.window_values(window, policy)?;
        for (acc, v) in values.iter_mut().zip(part) {
            *acc += v;
        }
        count += 1;
    }
    if count == 0 {
        return Err(Error::invalid("cannot aggregate an empty trace set"));
    }
    Ok(AggregateSeries { start: window.start, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BusyHour {
    pub date: NaiveDate,
    pub timestamp: DateTime<Utc>,
    pub value: f64,
}

/// Daily maxima of an hourly series with the hour at which each occurred.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BusyHourSeries {
    pub entries: Vec<BusyHour>,
}

impl BusyHourSeries {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn timestamps(&self) -> Vec<DateTime<Utc>> {
        self.entries.iter().map(|e| e.timestamp).collect()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.entries.iter().map(|e| e.date).collect()
    }

    /// Entries with `first <= date <= last`.
    pub fn between(&self, first: NaiveDate, last: NaiveDate) -> BusyHourSeries {
        BusyHourSeries { entries: self.entries.iter().filter(|e| e.date >= first && e.date <= last).copied().collect() }
    }
}

/// One entry per complete UTC day: the day's maximum, earliest hour on ties.
pub fn extract_busy_hours<S: HourlySource + ?Sized>(series: &S) -> Result<BusyHourSeries> {
    let start = series.start();
    let n = series.sample_count();
    let first_midnight = (24 - start.hour() as usize) % 24;
    let mut entries = Vec::new();
    let mut day_start = first_midnight;
    while day_start + 24 <= n {
        let mut best: Option<(usize, f64)> = None;
        let mut complete = true;
        for i in day_start..day_start + 24 {
            match series.sample(i) {
                Some(v) => {
                    if best.is_none_or(|(_, b)| v > b) {
                        best = Some((i, v));
                    }
                }
                None => {
                    complete = false;
                    break;
                }
            }
        }
        if complete {
            let (i, value) = best.expect("24 samples");
            let timestamp = start + Duration::hours(i as i64);
            entries.push(BusyHour { date: timestamp.date_naive(), timestamp, value });
        }
        day_start += 24;
    }
    if entries.is_empty() {
        return Err(Error::invalid("series contains no complete UTC day"));
    }
    Ok(BusyHourSeries { entries })
}

/// Read `series` at each timestamp.
pub fn sample_at_timestamps(series: &AggregateSeries, timestamps: &[DateTime<Utc>]) -> Result<Vec<f64>> {
    timestamps.iter().map(|&ts| series.value_at(ts).ok_or_else(|| Error::NotCovered(ts.to_rfc3339()))).collect()
}

/// Calendar day classes used by daily signatures and synthetic profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DayClass {
    Workday,
    Saturday,
    Sunday,
}

impl DayClass {
    pub const ALL: [DayClass; 3] = [DayClass::Workday, DayClass::Saturday, DayClass::Sunday];

    pub fn of(date: NaiveDate) -> Self {
        match date.weekday() {
            Weekday::Sat => DayClass::Saturday,
            Weekday::Sun => DayClass::Sunday,
            _ => DayClass::Workday,
        }
    }
}

pub fn midnight(date: NaiveDate) -> DateTime<Utc> {
    date.and_hms_opt(0, 0, 0).expect("valid midnight").and_utc()
}

pub fn is_hour_aligned(ts: DateTime<Utc>) -> bool {
    ts.minute() == 0 && ts.second() == 0 && ts.nanosecond() == 0
}

fn hour_offset(start: DateTime<Utc>, ts: DateTime<Utc>) -> Option<usize> {
    let d = ts - start;
    if d < Duration::zero() || d.num_seconds() % 3600 != 0 || d.subsec_nanos() != 0 {
        return None;
    }
    Some(d.num_hours() as usize)
}
