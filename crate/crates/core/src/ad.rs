//! Decomposition forecaster: naive seasonal profile plus an ARIMA on the STL trend.

use serde::{Deserialize, Serialize};

use crate::decompose::{naive_decompose, stl_decompose, StlParams};
use crate::error::{Error, Result};
use crate::sarima::{fit_sarima_with, FitOptions, SarimaModel, SarimaOrder};

pub const DEFAULT_PERIOD: usize = 7;

/// Orders tried for the trend model.
pub const TREND_MAX_P: usize = 3;
pub const TREND_MAX_D: usize = 2;
pub const TREND_MAX_Q: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdModel {
    pub period: usize,
    /// Seasonal values for the `period` steps following the fitted series.
    pub seasonal_profile: Vec<f64>,
    pub trend_model: SarimaModel,
    /// Last `period` values of the STL trend.
    pub trend_tail: Vec<f64>,
    pub stl: StlParams,
    pub fit_len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdOptions {
    pub period: usize,
    pub robust: bool,
}

impl Default for AdOptions {
    fn default() -> Self {
        Self { period: DEFAULT_PERIOD, robust: false }
    }
}

/// Fit every `(p, d, q)` in the grid and keep the lowest AICc, with every
/// order scored over the same number of observations; fewer parameters win ties.
pub fn auto_arima(series: &[f64]) -> Result<SarimaModel> {
    let common_n = series.len().saturating_sub(TREND_MAX_D);
    let mut best: Option<(SarimaModel, f64)> = None;
    let mut last_err = None;
    for d in 0..=TREND_MAX_D {
        for p in 0..=TREND_MAX_P {
            for q in 0..=TREND_MAX_Q {
                let options = FitOptions { include_mean: d == 0, ..FitOptions::default() };
                let model = match fit_sarima_with(series, SarimaOrder::arima(p, d, q), options) {
                    Ok(m) => m,
                    Err(e) => {
                        last_err = Some(e);
                        continue;
                    }
                };
                let a = model.aicc_with_n(common_n);
                if !a.is_finite() {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some((b, ba)) => {
                        let ba = *ba;
                        let tol = 1e-9 * ba.abs().max(1.0);
                        a < ba - tol || (a <= ba + tol && model.n_params() < b.n_params())
                    }
                };
                if better {
                    best = Some((model, a));
                }
            }
        }
    }
    best.map(|(m, _)| m).ok_or_else(|| {
        Error::Optimizer(format!(
            "no trend ARIMA order could be fitted{}",
            last_err.map(|e| format!(" (last error: {e})")).unwrap_or_default()
        ))
    })
}

pub fn fit_ad(series: &[f64], options: AdOptions) -> Result<AdModel> {
    let period = options.period;
    if period < 2 {
        return Err(Error::invalid("AD period must be at least 2"));
    }
    if series.len() < 4 * period {
        return Err(Error::InsufficientData { needed: 4 * period, got: series.len() });
    }
    let naive = naive_decompose(series, period)?;
    let n = series.len();
    // naive seasonal is periodic, so the next period repeats the last one
    let seasonal_profile = naive.seasonal[n - period..].to_vec();
    let stl = if options.robust { StlParams::for_period(period).robust() } else { StlParams::for_period(period) };
    let trend = stl_decompose(series, period, &stl)?.defined_trend();
    let trend_model = auto_arima(&trend)?;
    Ok(AdModel { period, seasonal_profile, trend_model, trend_tail: trend[n - period..].to_vec(), stl, fit_len: n })
}

impl AdModel {
    pub fn forecast(&self, h: usize) -> Result<Vec<f64>> {
        if h == 0 {
            return Err(Error::invalid("forecast horizon must be at least 1"));
        }
        let trend = self.trend_model.forecast(h)?;
        Ok(trend.iter().enumerate().map(|(i, t)| self.seasonal_profile[i % self.period] + t).collect())
    }

    /// The `steps` values following `history`, which must extend the fitted
    /// series with this model's own forecasts.
    pub fn forecast_block(&self, history_len: usize, steps: usize) -> Result<Vec<f64>> {
        if history_len < self.fit_len {
            return Err(Error::invalid("history is shorter than the fitted series"));
        }
        let offset = history_len - self.fit_len;
        Ok(self.forecast(offset + steps)?.split_off(offset))
    }
}
