//! Additive seasonal/trend/residual decompositions.

mod stl;

pub use stl::{stl_decompose, StlParams};

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `series = seasonal + trend + residual` wherever trend is defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult {
    pub period: usize,
    pub seasonal: Vec<f64>,
    pub trend: Vec<Option<f64>>,
    pub residual: Vec<Option<f64>>,
}

impl DecompositionResult {
    pub fn len(&self) -> usize {
        self.seasonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seasonal.is_empty()
    }

    /// Trend values where defined, in order.
    pub fn defined_trend(&self) -> Vec<f64> {
        self.trend.iter().flatten().copied().collect()
    }

    /// `index,seasonal,trend,residual`; undefined fields are left empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "seasonal", "trend", "residual"])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for i in 0..self.len() {
            w.write_record([i.to_string(), self.seasonal[i].to_string(), opt(self.trend[i]), opt(self.residual[i])])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_input(series: &[f64], period: usize) -> Result<()> {
    if period < 2 {
        return Err(Error::invalid("decomposition period must be at least 2"));
    }
    if series.len() < 2 * period {
        return Err(Error::InsufficientData { needed: 2 * period, got: series.len() });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("series passed to decomposition".into()));
    }
    Ok(())
}

/// Centered moving average of width `period` (2 x period for even periods).
pub fn centered_moving_average(series: &[f64], period: usize) -> Vec<Option<f64>> {
    let n = series.len();
    let half = period / 2;
    let mut out = vec![None; n];
    if n < 2 * half + 1 {
        return out;
    }
    for t in half..n - half {
        let v = if period % 2 == 1 {
            series[t - half..=t + half].iter().sum::<f64>() / period as f64
        } else {
            let inner: f64 = series[t - half + 1..t + half].iter().sum();
            (inner + 0.5 * (series[t - half] + series[t + half])) / period as f64
        };
        out[t] = Some(v);
    }
    out
}

/// Classical additive decomposition.
pub fn naive_decompose(series: &[f64], period: usize) -> Result<DecompositionResult> {
    check_input(series, period)?;
    let trend = centered_moving_average(series, period);
    let mut sums = vec![0.0; period];
    let mut counts = vec![0usize; period];
    for (t, tr) in trend.iter().enumerate() {
        if let Some(tr) = tr {
            sums[t % period] += series[t] - tr;
            counts[t % period] += 1;
        }
    }
    let phase: Vec<f64> = sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();
    let centre = crate::util::mean(&phase);
    let phase: Vec<f64> = phase.iter().map(|v| v - centre).collect();
    let seasonal: Vec<f64> = (0..series.len()).map(|t| phase[t % period]).collect();
    let residual = trend.iter().enumerate().map(|(t, tr)| tr.map(|tr| series[t] - tr - seasonal[t])).collect();
    Ok(DecompositionResult { period, seasonal, trend, residual })
}
