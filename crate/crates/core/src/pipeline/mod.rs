//! Cluster-unaware and cluster-aware busy-hour forecasting and evaluation.

mod report;
mod run;

pub use report::{forecast_file_name, EvaluationReport, GridRow, RowStatus};
pub use run::{ca_clusters, cluster_busy_series, grid_evaluate, run_ca, run_cu, CellForecast, GridSpec, Prepared};

use chrono::{Duration, Months, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::ad::{fit_ad, AdModel, AdOptions};
use crate::error::{Error, Result};
use crate::lstm::{LstmConfig, LstmForecaster, Profile};
use crate::sarima::{fit_sarima, SarimaModel, SarimaOrder};
use crate::series::{boxcox_apply, boxcox_fit, boxcox_invert, HourlyTrace, MissingPolicy, TimeWindow, TransformParams};

pub const BLOCK_DAYS: usize = 7;
pub const LOOKBACK_DAYS: usize = 14;
pub const MAX_TL: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "AD")]
    Ad,
    #[serde(rename = "SA")]
    Sa,
    #[serde(rename = "LSTM")]
    Lstm,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Ad, Method::Sa, Method::Lstm];
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Ad => "AD",
            Method::Sa => "SA",
            Method::Lstm => "LSTM",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "AD" => Ok(Method::Ad),
            "SA" => Ok(Method::Sa),
            "LSTM" => Ok(Method::Lstm),
            _ => Err(Error::invalid(format!("unknown method {s:?} (expected AD, SA or LSTM)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Approach {
    #[serde(rename = "CU")]
    Cu,
    #[serde(rename = "CA")]
    Ca,
}

impl std::fmt::Display for Approach {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Approach::Cu => "CU",
            Approach::Ca => "CA",
        })
    }
}

impl std::str::FromStr for Approach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "CU" => Ok(Approach::Cu),
            "CA" => Ok(Approach::Ca),
            _ => Err(Error::invalid(format!("unknown approach {s:?} (expected CU or CA)"))),
        }
    }
}

/// Training and test windows in calendar months around `train_end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_end: NaiveDate,
    pub tl: u32,
    pub la: u32,
}

impl SplitSpec {
    pub fn new(train_end: NaiveDate, tl: u32, la: u32) -> Result<Self> {
        if !(1..=MAX_TL).contains(&tl) {
            return Err(Error::invalid(format!("TL must be 1 to {MAX_TL} months, got {tl}")));
        }
        if !(1..=2).contains(&la) {
            return Err(Error::invalid(format!("LA must be 1 or 2 months, got {la}")));
        }
        Ok(Self { train_end, tl, la })
    }

    pub fn train_start(&self) -> NaiveDate {
        (self.train_end + Duration::days(1)) - Months::new(self.tl)
    }

    pub fn test_start(&self) -> NaiveDate {
        self.train_end + Duration::days(1)
    }

    pub fn test_end(&self) -> NaiveDate {
        self.test_start() + Months::new(self.la) - Duration::days(1)
    }

    pub fn test_days(&self) -> usize {
        (self.test_end() - self.test_start()).num_days() as usize + 1
    }
}

/// Latest `train_end` leaving `max_la` full months of data after it.
pub fn default_train_end(last_day: NaiveDate, max_la: u32) -> NaiveDate {
    (last_day + Duration::days(1)) - Months::new(max_la) - Duration::days(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForecastSettings {
    pub sa_order: SarimaOrder,
    pub ad: AdOptions,
    pub lstm: LstmConfig,
    /// Pin the Box-Cox lambda instead of fitting it per series.
    pub boxcox_lambda: Option<f64>,
}

impl ForecastSettings {
    pub fn for_profile(profile: Profile) -> Self {
        Self {
            sa_order: SarimaOrder::airline_ar(7),
            ad: AdOptions::default(),
            lstm: LstmConfig::preset(profile),
            boxcox_lambda: None,
        }
    }
}

impl Default for ForecastSettings {
    fn default() -> Self {
        Self::for_profile(Profile::Paper)
    }
}

/// Forecasts the next `steps` values after `history`.
pub trait BlockForecaster {
    fn forecast_block(&self, history: &[f64], steps: usize) -> Result<Vec<f64>>;
}

impl BlockForecaster for SarimaModel {
    fn forecast_block(&self, history: &[f64], steps: usize) -> Result<Vec<f64>> {
        self.forecast_from(history, steps)
    }
}

impl BlockForecaster for AdModel {
    fn forecast_block(&self, history: &[f64], steps: usize) -> Result<Vec<f64>> {
        AdModel::forecast_block(self, history.len(), steps)
    }
}

impl BlockForecaster for LstmForecaster {
    fn forecast_block(&self, history: &[f64], steps: usize) -> Result<Vec<f64>> {
        if steps > self.config.output_len {
            return Err(Error::invalid(format!("LSTM blocks hold at most {} steps", self.config.output_len)));
        }
        let mut out = self.forecast(history)?;
        out.truncate(steps);
        Ok(out)
    }
}

impl<F: Fn(&[f64], usize) -> Result<Vec<f64>>> BlockForecaster for F {
    fn forecast_block(&self, history: &[f64], steps: usize) -> Result<Vec<f64>> {
        self(history, steps)
    }
}

/// Forecast `horizon` days in 7-day blocks, feeding each block's predictions
/// back into the history.
pub fn recursive_forecast<F: BlockForecaster + ?Sized>(
    forecaster: &F,
    history: &[f64],
    horizon: usize,
) -> Result<Vec<f64>> {
    if history.len() < LOOKBACK_DAYS {
        return Err(Error::InsufficientData { needed: LOOKBACK_DAYS, got: history.len() });
    }
    if horizon == 0 {
        return Err(Error::invalid("horizon must be at least one day"));
    }
    let mut work = history.to_vec();
    let mut block = 0;
    while work.len() < history.len() + horizon {
        let steps = BLOCK_DAYS.min(history.len() + horizon - work.len());
        let out = forecaster.forecast_block(&work, steps).map_err(|e| Error::Block { block, source: Box::new(e) })?;
        if out.len() != steps {
            return Err(Error::Block {
                block,
                source: Box::new(Error::invalid(format!("forecaster returned {} of {steps} values", out.len()))),
            });
        }
        if let Some(bad) = out.iter().find(|v| !v.is_finite()) {
            return Err(Error::Block { block, source: Box::new(Error::NonFinite(format!("forecast value {bad}"))) });
        }
        work.extend(out);
        block += 1;
    }
    Ok(work.split_off(history.len()))
}

/// Mean absolute percentage error, in percent.
pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    if actual.len() != predicted.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} actual vs {} predicted",
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::invalid("MAPE of an empty series"));
    }
    let mut total = 0.0;
    for (a, p) in actual.iter().zip(predicted) {
        if !(*a > 0.0) {
            return Err(Error::invalid(format!("MAPE needs positive actual values, got {a}")));
        }
        total += ((a - p) / a).abs();
    }
    Ok(100.0 * total / actual.len() as f64)
}

/// Signed peak error in percent; positive means the peak is under-estimated.
pub fn mpe_peak(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    if actual.is_empty() || predicted.is_empty() {
        return Err(Error::invalid("peak error of an empty series"));
    }
    let peak = actual.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let predicted_peak = predicted.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(peak > 0.0) {
        return Err(Error::invalid("peak error needs a positive actual maximum"));
    }
    Ok(100.0 * (peak - predicted_peak) / peak)
}

/// Hourly traces plus the policy for their missing samples.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub traces: Vec<HourlyTrace>,
    pub policy: MissingPolicy,
}

impl Dataset {
    pub fn new(traces: Vec<HourlyTrace>, policy: MissingPolicy) -> Result<Self> {
        if traces.is_empty() {
            return Err(Error::invalid("dataset has no traces"));
        }
        Ok(Self { traces, policy })
    }

    /// Whole UTC days covered by every trace.
    pub fn common_window(&self) -> Result<TimeWindow> {
        let start = self.traces.iter().map(|t| t.start()).max().expect("non-empty");
        let end = self.traces.iter().map(|t| t.end()).min().expect("non-empty");
        let first = if start == crate::series::midnight(start.date_naive()) {
            start.date_naive()
        } else {
            start.date_naive() + Duration::days(1)
        };
        let last = end.date_naive() - Duration::days(1);
        if last < first {
            return Err(Error::invalid("traces share no complete UTC day"));
        }
        TimeWindow::days(first, last)
    }

    pub fn first_day(&self) -> Result<NaiveDate> {
        Ok(self.common_window()?.start.date_naive())
    }

    pub fn last_day(&self) -> Result<NaiveDate> {
        Ok((self.common_window()?.end - Duration::hours(1)).date_naive())
    }
}

/// Box-Cox inverse for forecasts that may leave the transform's range.
/// Below the range (`lambda > 0`) gives zero volume; past the asymptote
/// (`lambda < 0`) gives `ceiling`.
pub fn invert_clamped(y: f64, params: &TransformParams, ceiling: f64) -> Result<f64> {
    match boxcox_invert(y, params) {
        Ok(v) => Ok(v),
        Err(_) if y.is_finite() && params.lambda * y + 1.0 <= 0.0 => {
            Ok(if params.lambda > 0.0 { -params.shift } else { ceiling })
        }
        Err(e) => Err(e),
    }
}

fn transform_for(train: &[f64], lambda: Option<f64>) -> Result<TransformParams> {
    match lambda {
        None => boxcox_fit(train),
        Some(l) => {
            let min = train.iter().copied().fold(f64::INFINITY, f64::min);
            Ok(TransformParams::new(l, if min <= 0.0 { 1.0 - min } else { 0.0 }))
        }
    }
}

/// A fitted forecaster of any method.
pub enum FittedModel {
    Ad(AdModel),
    Sa(SarimaModel),
    Lstm(LstmForecaster),
}

impl BlockForecaster for FittedModel {
    fn forecast_block(&self, history: &[f64], steps: usize) -> Result<Vec<f64>> {
        match self {
            FittedModel::Ad(m) => BlockForecaster::forecast_block(m, history, steps),
            FittedModel::Sa(m) => m.forecast_block(history, steps),
            FittedModel::Lstm(m) => m.forecast_block(history, steps),
        }
    }
}

pub fn fit_method(method: Method, series: &[f64], settings: &ForecastSettings, seed: u64) -> Result<FittedModel> {
    Ok(match method {
        Method::Ad => FittedModel::Ad(fit_ad(series, settings.ad)?),
        Method::Sa => FittedModel::Sa(fit_sarima(series, settings.sa_order)?),
        Method::Lstm => FittedModel::Lstm(LstmForecaster::fit(series, LstmConfig { seed, ..settings.lstm })?.0),
    })
}

/// Fitted transform and forecasts for one training series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesForecast {
    /// The series is divided by this (its training mean) before the transform.
    pub unit: f64,
    pub transform: TransformParams,
    pub predicted: Vec<f64>,
}

/// Rescale to unit mean, Box-Cox, fit, recursive forecast, invert.
pub fn forecast_series(
    method: Method,
    train: &[f64],
    horizon: usize,
    settings: &ForecastSettings,
    seed: u64,
) -> Result<SeriesForecast> {
    if train.len() < LOOKBACK_DAYS {
        return Err(Error::InsufficientData { needed: LOOKBACK_DAYS, got: train.len() });
    }
    let mean = crate::util::mean(train);
    let unit = if mean > 0.0 && mean.is_finite() { mean } else { 1.0 };
    let scaled: Vec<f64> = train.iter().map(|v| v / unit).collect();
    let transform = transform_for(&scaled, settings.boxcox_lambda)?;
    let z = scaled.iter().map(|&v| boxcox_apply(v, &transform)).collect::<Result<Vec<_>>>()?;
    let model = fit_method(method, &z, settings, seed)?;
    let ceiling = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let predicted = recursive_forecast(&model, &z, horizon)?
        .into_iter()
        .map(|y| invert_clamped(y, &transform, ceiling).map(|v| v * unit))
        .collect::<Result<Vec<_>>>()?;
    Ok(SeriesForecast { unit, transform, predicted })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    #[test]
    fn calendar_month_windows() {
        let s = SplitSpec::new(d(2020, 5, 31), 2, 2).unwrap();
        assert_eq!(s.train_start(), d(2020, 4, 1));
        assert_eq!(s.test_start(), d(2020, 6, 1));
        assert_eq!(s.test_end(), d(2020, 7, 31));
        assert_eq!(s.test_days(), 61);
        assert!(SplitSpec::new(d(2020, 5, 31), 0, 1).is_err());
        assert!(SplitSpec::new(d(2020, 5, 31), 1, 3).is_err());
        assert!(SplitSpec::new(d(2020, 5, 31), 6, 1).is_err());
        assert_eq!(default_train_end(d(2020, 7, 31), 2), d(2020, 5, 31));
        assert_eq!(default_train_end(d(2020, 7, 31), 1), d(2020, 6, 30));
    }

    #[test]
    fn clamp_outside_range() {
        let p = TransformParams::new(0.5, 0.0);
        assert_eq!(invert_clamped(-3.0, &p, 9.0).unwrap(), 0.0);
        assert!((invert_clamped(1.0, &p, 9.0).unwrap() - 2.25).abs() < 1e-12);
        let n = TransformParams::new(-1.0, 0.0);
        assert_eq!(invert_clamped(1.5, &n, 9.0).unwrap(), 9.0);
        assert!((invert_clamped(0.5, &n, 9.0).unwrap() - 2.0).abs() < 1e-12);
        assert!(invert_clamped(f64::NAN, &n, 9.0).is_err());
    }

    #[test]
    fn names_parse() {
        assert_eq!("sa".parse::<Method>().unwrap(), Method::Sa);
        assert_eq!("CA".parse::<Approach>().unwrap(), Approach::Ca);
        assert!("xx".parse::<Method>().is_err());
        assert_eq!(Method::Lstm.to_string(), "LSTM");
    }
}
