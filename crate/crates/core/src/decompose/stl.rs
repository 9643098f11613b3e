//! STL (Cleveland et al.) with unit jumps.

use serde::{Deserialize, Serialize};

use super::{check_input, DecompositionResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StlParams {
    /// Seasonal smoother span, in cycle-subseries points.
    pub seasonal_window: usize,
    pub trend_window: usize,
    pub low_pass_window: usize,
    pub seasonal_degree: usize,
    pub trend_degree: usize,
    pub low_pass_degree: usize,
    pub inner: usize,
    pub outer: usize,
}

impl StlParams {
    pub fn for_period(period: usize) -> Self {
        let seasonal_window = 11;
        let odd_at_least = |x: f64| {
            let mut v = x.ceil() as usize;
            if v.is_multiple_of(2) {
                v += 1;
            }
            v
        };
        let trend_window = odd_at_least(1.5 * period as f64 / (1.0 - 1.5 / seasonal_window as f64)).max(3);
        let low_pass_window = odd_at_least(period as f64).max(3);
        Self {
            seasonal_window,
            trend_window,
            low_pass_window,
            seasonal_degree: 1,
            trend_degree: 1,
            low_pass_degree: 1,
            inner: 2,
            outer: 0,
        }
    }

    pub fn robust(mut self) -> Self {
        self.outer = 1;
        self
    }

    fn validate(&self) -> Result<()> {
        for (name, w) in
            [("seasonal", self.seasonal_window), ("trend", self.trend_window), ("low-pass", self.low_pass_window)]
        {
            if w < 3 || w % 2 == 0 {
                return Err(Error::invalid(format!("{name} Loess window must be odd and at least 3, got {w}")));
            }
        }
        if [self.seasonal_degree, self.trend_degree, self.low_pass_degree].iter().any(|&d| d > 1) {
            return Err(Error::invalid("Loess degree must be 0 or 1"));
        }
        if self.inner == 0 {
            return Err(Error::invalid("at least one inner iteration is required"));
        }
        Ok(())
    }
}

/// Local fit at position `xs` (1-based) over `y[nleft..=nright]` (1-based).
#[allow(clippy::too_many_arguments)]
fn est(
    y: &[f64],
    len: usize,
    deg: usize,
    xs: f64,
    nleft: usize,
    nright: usize,
    w: &mut [f64],
    rw: Option<&[f64]>,
) -> Option<f64> {
    let n = y.len();
    let range = n as f64 - 1.0;
    let mut h = (xs - nleft as f64).max(nright as f64 - xs);
    if len > n {
        h += ((len - n) / 2) as f64;
    }
    let h9 = 0.999 * h;
    let h1 = 0.001 * h;
    let mut a = 0.0;
    for j in nleft..=nright {
        let r = (j as f64 - xs).abs();
        w[j - 1] = 0.0;
        if r <= h9 {
            w[j - 1] = if r <= h1 { 1.0 } else { (1.0 - (r / h).powi(3)).powi(3) };
            if let Some(rw) = rw {
                w[j - 1] *= rw[j - 1];
            }
            a += w[j - 1];
        }
    }
    if a <= 0.0 {
        return None;
    }
    for j in nleft..=nright {
        w[j - 1] /= a;
    }
    if h > 0.0 && deg > 0 {
        let a: f64 = (nleft..=nright).map(|j| w[j - 1] * j as f64).sum();
        let mut b = xs - a;
        let c: f64 = (nleft..=nright).map(|j| w[j - 1] * (j as f64 - a).powi(2)).sum();
        if c.sqrt() > 0.001 * range {
            b /= c;
            for j in nleft..=nright {
                w[j - 1] *= b * (j as f64 - a) + 1.0;
            }
        }
    }
    Some((nleft..=nright).map(|j| w[j - 1] * y[j - 1]).sum())
}

/// Loess smooth of `y` evaluated at every point.
fn ess(y: &[f64], len: usize, deg: usize, rw: Option<&[f64]>) -> Vec<f64> {
    let n = y.len();
    if n < 2 {
        return y.to_vec();
    }
    let mut w = vec![0.0; n];
    let mut ys = vec![0.0; n];
    if len >= n {
        for i in 1..=n {
            ys[i - 1] = est(y, len, deg, i as f64, 1, n, &mut w, rw).unwrap_or(y[i - 1]);
        }
        return ys;
    }
    let nsh = len.div_ceil(2);
    let (mut nleft, mut nright) = (1, len);
    for i in 1..=n {
        if i > nsh && nright != n {
            nleft += 1;
            nright += 1;
        }
        ys[i - 1] = est(y, len, deg, i as f64, nleft, nright, &mut w, rw).unwrap_or(y[i - 1]);
    }
    ys
}

fn moving_average(x: &[f64], len: usize) -> Vec<f64> {
    let newn = x.len() + 1 - len;
    let mut out = Vec::with_capacity(newn);
    let mut v: f64 = x[..len].iter().sum();
    out.push(v / len as f64);
    for k in 1..newn {
        v += x[k + len - 1] - x[k - 1];
        out.push(v / len as f64);
    }
    out
}

/// Low-pass filter: moving averages of `np`, `np` and 3. Output is `2 np` shorter.
fn low_pass(x: &[f64], np: usize) -> Vec<f64> {
    moving_average(&moving_average(&moving_average(x, np), np), 3)
}

/// Cycle-subseries smoothing, extended by one period at each end.
fn subseries_smooth(y: &[f64], np: usize, ns: usize, deg: usize, rw: Option<&[f64]>) -> Vec<f64> {
    let n = y.len();
    let mut season = vec![0.0; n + 2 * np];
    for j in 0..np {
        let sub: Vec<f64> = (j..n).step_by(np).map(|t| y[t]).collect();
        let sub_rw: Option<Vec<f64>> = rw.map(|rw| (j..n).step_by(np).map(|t| rw[t]).collect());
        let k = sub.len();
        let smooth = ess(&sub, ns, deg, sub_rw.as_deref());
        let mut w = vec![0.0; k];
        let nright = ns.min(k);
        let first = est(&sub, ns, deg, 0.0, 1, nright, &mut w, sub_rw.as_deref()).unwrap_or(smooth[0]);
        let nleft = if k + 1 > ns { k + 1 - ns } else { 1 };
        let last = est(&sub, ns, deg, (k + 1) as f64, nleft, k, &mut w, sub_rw.as_deref()).unwrap_or(smooth[k - 1]);
        season[j] = first;
        for (m, v) in smooth.iter().enumerate() {
            season[(m + 1) * np + j] = *v;
        }
        season[(k + 1) * np + j] = last;
    }
    season
}

fn robustness_weights(y: &[f64], fit: &[f64]) -> Vec<f64> {
    let r: Vec<f64> = y.iter().zip(fit).map(|(a, b)| (a - b).abs()).collect();
    let cmad = 6.0 * crate::util::median(&r);
    let c9 = 0.999 * cmad;
    let c1 = 0.001 * cmad;
    r.iter()
        .map(|&u| {
            if u <= c1 {
                1.0
            } else if u <= c9 {
                (1.0 - (u / cmad).powi(2)).powi(2)
            } else {
                0.0
            }
        })
        .collect()
}

/// Seasonal-trend decomposition by Loess.
pub fn stl_decompose(series: &[f64], period: usize, params: &StlParams) -> Result<DecompositionResult> {
    check_input(series, period)?;
    params.validate()?;
    let n = series.len();
    let np = period;
    let mut trend = vec![0.0; n];
    let mut seasonal = vec![0.0; n];
    let mut rw: Option<Vec<f64>> = None;
    for pass in 0..=params.outer {
        for _ in 0..params.inner {
            let detrended: Vec<f64> = series.iter().zip(&trend).map(|(y, t)| y - t).collect();
            let cycle = subseries_smooth(&detrended, np, params.seasonal_window, params.seasonal_degree, rw.as_deref());
            let low = ess(&low_pass(&cycle, np), params.low_pass_window, params.low_pass_degree, rw.as_deref());
            for i in 0..n {
                seasonal[i] = cycle[np + i] - low[i];
            }
            let deseason: Vec<f64> = series.iter().zip(&seasonal).map(|(y, s)| y - s).collect();
            trend = ess(&deseason, params.trend_window, params.trend_degree, rw.as_deref());
        }
        if pass < params.outer {
            let fit: Vec<f64> = trend.iter().zip(&seasonal).map(|(t, s)| t + s).collect();
            rw = Some(robustness_weights(series, &fit));
        }
    }
    let residual = (0..n).map(|i| Some(series[i] - trend[i] - seasonal[i])).collect();
    Ok(DecompositionResult { period, seasonal, trend: trend.into_iter().map(Some).collect(), residual })
}
