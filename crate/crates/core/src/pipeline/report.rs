use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::run::CellForecast;
use super::{Approach, Method};
use crate::error::Result;
use crate::util::write_atomic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Failed,
}

impl std::fmt::Display for RowStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RowStatus::Ok => "ok",
            RowStatus::Failed => "failed",
        })
    }
}

/// One grid cell of the evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub method: Method,
    pub approach: Approach,
    pub tl: u32,
    pub la: u32,
    pub status: RowStatus,
    pub mape: Option<f64>,
    pub mpe_peak: Option<f64>,
    /// Test days evaluated.
    pub n: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub train_end: NaiveDate,
    pub seed: u64,
    pub rows: Vec<GridRow>,
    pub forecasts: Vec<CellForecast>,
}

fn fixed(v: f64) -> String {
    // avoid "-0.000000"
    let s = format!("{v:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fixed).unwrap_or_default()
}

pub fn forecast_file_name(method: Method, approach: Approach, tl: u32, la: u32) -> String {
    format!("{method}_{approach}_TL{tl}_LA{la}.csv")
}

#[derive(Serialize)]
struct Summary<'a> {
    train_end: NaiveDate,
    seed: u64,
    cells: usize,
    failed: usize,
    rows: &'a [GridRow],
}

impl EvaluationReport {
    pub fn failed(&self) -> usize {
        self.rows.iter().filter(|r| r.status == RowStatus::Failed).count()
    }

    pub fn row(&self, method: Method, approach: Approach, tl: u32, la: u32) -> Option<&GridRow> {
        self.rows.iter().find(|r| r.method == method && r.approach == approach && r.tl == tl && r.la == la)
    }

    pub fn report_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["method", "approach", "tl", "la", "status", "mape", "mpe_peak", "n", "error"])?;
        for r in &self.rows {
            w.write_record([
                r.method.to_string(),
                r.approach.to_string(),
                r.tl.to_string(),
                r.la.to_string(),
                r.status.to_string(),
                opt(r.mape),
                opt(r.mpe_peak),
                r.n.to_string(),
                r.error.clone().unwrap_or_default(),
            ])?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }

    pub fn forecast_csv(forecast: &CellForecast) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["date", "actual", "predicted"])?;
        for ((d, a), p) in forecast.dates.iter().zip(&forecast.actual).zip(&forecast.predicted) {
            w.write_record([d.to_string(), fixed(*a), fixed(*p)])?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }

    pub fn summary_json(&self) -> Result<String> {
        let summary = Summary {
            train_end: self.train_end,
            seed: self.seed,
            cells: self.rows.len(),
            failed: self.failed(),
            rows: &self.rows,
        };
        Ok(serde_json::to_string_pretty(&summary)?)
    }

    /// Write `report.csv`, `summary.json` and `forecasts/<cell>.csv` under `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        let forecasts = dir.join("forecasts");
        std::fs::create_dir_all(&forecasts)?;
        for f in &self.forecasts {
            let name = forecast_file_name(f.method, f.approach, f.split.tl, f.split.la);
            write_atomic(&forecasts.join(name), &Self::forecast_csv(f)?)?;
        }
        write_atomic(&dir.join("summary.json"), self.summary_json()?.as_bytes())?;
        write_atomic(&dir.join("report.csv"), &self.report_csv()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_formatting() {
        assert_eq!(fixed(-0.0), "0.000000");
        assert_eq!(fixed(-1e-9), "0.000000");
        assert_eq!(fixed(3.25), "3.250000");
        assert_eq!(fixed(-2.5), "-2.500000");
    }
}
