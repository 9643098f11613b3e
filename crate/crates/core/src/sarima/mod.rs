//! Multiplicative seasonal ARIMA estimated by conditional sum of squares.

mod suggest;

pub use suggest::{suggest_order, OrderDiagnostics};

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{nelder_mead, solve_linear, NelderMeadConfig};

/// Differenced length must reach this multiple of the parameter count plus one.
pub const MIN_OBS_PER_PARAM: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SarimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    #[serde(rename = "P")]
    pub seasonal_p: usize,
    #[serde(rename = "D")]
    pub seasonal_d: usize,
    #[serde(rename = "Q")]
    pub seasonal_q: usize,
    #[serde(rename = "S")]
    pub period: usize,
}

impl SarimaOrder {
    pub fn new(
        (p, d, q): (usize, usize, usize),
        (seasonal_p, seasonal_d, seasonal_q): (usize, usize, usize),
        period: usize,
    ) -> Result<Self> {
        let order = Self { p, d, q, seasonal_p, seasonal_d, seasonal_q, period };
        order.validate()?;
        Ok(order)
    }

    /// Non-seasonal ARIMA(p, d, q).
    pub fn arima(p: usize, d: usize, q: usize) -> Self {
        Self { p, d, q, seasonal_p: 0, seasonal_d: 0, seasonal_q: 0, period: 1 }
    }

    /// The (1,1,0)x(1,1,0)_S model.
    pub fn airline_ar(period: usize) -> Self {
        Self { p: 1, d: 1, q: 0, seasonal_p: 1, seasonal_d: 1, seasonal_q: 0, period }
    }

    pub fn validate(&self) -> Result<()> {
        if self.period == 0 {
            return Err(Error::invalid("seasonal period must be at least 1"));
        }
        if self.seasonal_p + self.seasonal_d + self.seasonal_q > 0 && self.period < 2 {
            return Err(Error::invalid("seasonal terms need a period of at least 2"));
        }
        Ok(())
    }

    pub fn n_coefficients(&self) -> usize {
        self.p + self.q + self.seasonal_p + self.seasonal_q
    }

    /// Largest lag of the expanded AR polynomial.
    pub fn ar_lag(&self) -> usize {
        self.p + self.seasonal_p * self.period
    }

    pub fn ma_lag(&self) -> usize {
        self.q + self.seasonal_q * self.period
    }

    /// Observations consumed by differencing.
    pub fn diff_lag(&self) -> usize {
        self.d + self.seasonal_d * self.period
    }

    /// Differencing steps in application order.
    fn diff_lags(&self) -> Vec<usize> {
        let mut lags = vec![1; self.d];
        lags.extend(std::iter::repeat_n(self.period, self.seasonal_d));
        lags
    }
}

impl std::fmt::Display for SarimaOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({},{},{})x({},{},{})_{}",
            self.p, self.d, self.q, self.seasonal_p, self.seasonal_d, self.seasonal_q, self.period
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Estimate a constant mean of the differenced series (only when d = D = 0).
    pub include_mean: bool,
    pub max_iter: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { include_mean: false, max_iter: 20_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SarimaModel {
    pub order: SarimaOrder,
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub sar: Vec<f64>,
    pub sma: Vec<f64>,
    pub mean: Option<f64>,
    pub sigma2: f64,
    /// Conditional sum of squares at the optimum.
    pub css: f64,
    /// In-sample innovations of the differenced series, from the first
    /// conditioned time step onward.
    pub residuals: Vec<f64>,
    /// Last observations of the original series needed to forecast.
    pub history_tail: Vec<f64>,
    /// Last innovations needed by the MA part.
    pub residual_tail: Vec<f64>,
    /// Length of the fully differenced series.
    pub n_differenced: usize,
    pub iterations: usize,
}

/// Expanded lag coefficients: `w_t = sum a_k w_{t-k} + e_t + sum b_k e_{t-k}`.
struct Expanded {
    a: Vec<f64>,
    b: Vec<f64>,
}

fn poly_mul(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len() + y.len() - 1];
    for (i, a) in x.iter().enumerate() {
        for (j, b) in y.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// `1 + sign * sum c_i B^{i * step}` as a dense coefficient vector.
fn lag_poly(coefs: &[f64], step: usize, sign: f64) -> Vec<f64> {
    let mut out = vec![0.0; coefs.len() * step + 1];
    out[0] = 1.0;
    for (i, c) in coefs.iter().enumerate() {
        out[(i + 1) * step] = sign * c;
    }
    out
}

fn expand(ar: &[f64], ma: &[f64], sar: &[f64], sma: &[f64], period: usize) -> Expanded {
    let ar_poly = poly_mul(&lag_poly(ar, 1, -1.0), &lag_poly(sar, period, -1.0));
    let ma_poly = poly_mul(&lag_poly(ma, 1, 1.0), &lag_poly(sma, period, 1.0));
    Expanded { a: ar_poly.iter().map(|c| -c).collect(), b: ma_poly }
}

/// True when `x_t = sum c_j x_{t-j} + e_t` is stationary (step-down recursion).
pub fn is_stationary(coefs: &[f64]) -> bool {
    let mut a = coefs.to_vec();
    while let Some(&last) = a.last() {
        if last == 0.0 {
            a.pop();
        } else {
            break;
        }
    }
    while !a.is_empty() {
        let k = a.len();
        let r = a[k - 1];
        if !r.is_finite() || r.abs() >= 1.0 {
            return false;
        }
        let denom = 1.0 - r * r;
        a = (0..k - 1).map(|j| (a[j] + r * a[k - 2 - j]) / denom).collect();
    }
    true
}

/// True when `1 + sum c_j B^j` has all roots outside the unit circle.
pub fn is_invertible(coefs: &[f64]) -> bool {
    is_stationary(&coefs.iter().map(|c| -c).collect::<Vec<_>>())
}

/// Apply the order's regular then seasonal differencing.
pub fn fully_difference(series: &[f64], order: &SarimaOrder) -> Result<Vec<f64>> {
    let mut x = series.to_vec();
    for lag in order.diff_lags() {
        x = crate::series::difference(&x, lag)?;
    }
    Ok(x)
}

/// Innovations from time `start` onward with earlier innovations set to zero.
fn innovations(w: &[f64], ex: &Expanded, start: usize) -> Vec<f64> {
    let mut e = vec![0.0; w.len()];
    for t in start..w.len() {
        let mut v = w[t];
        for (k, a) in ex.a.iter().enumerate().skip(1) {
            v -= a * w[t - k];
        }
        for (k, b) in ex.b.iter().enumerate().skip(1) {
            if t >= k {
                v -= b * e[t - k];
            }
        }
        e[t] = v;
    }
    e
}

struct Layout {
    order: SarimaOrder,
    mean: bool,
}

struct Params<'a> {
    ar: &'a [f64],
    ma: &'a [f64],
    sar: &'a [f64],
    sma: &'a [f64],
    mean: f64,
}

impl Layout {
    fn len(&self) -> usize {
        self.order.n_coefficients() + usize::from(self.mean)
    }

    fn split<'a>(&self, x: &'a [f64]) -> Params<'a> {
        let o = &self.order;
        let (ar, rest) = x.split_at(o.p);
        let (ma, rest) = rest.split_at(o.q);
        let (sar, rest) = rest.split_at(o.seasonal_p);
        let (sma, rest) = rest.split_at(o.seasonal_q);
        Params { ar, ma, sar, sma, mean: rest.first().copied().unwrap_or(0.0) }
    }
}

impl Params<'_> {
    fn admissible(&self) -> bool {
        is_stationary(self.ar) && is_stationary(self.sar) && is_invertible(self.ma) && is_invertible(self.sma)
    }
}

/// Least-squares AR warm start on lags 1..p and S..PS.
fn warm_start(w: &[f64], order: &SarimaOrder) -> Vec<f64> {
    let lags: Vec<usize> = (1..=order.p).chain((1..=order.seasonal_p).map(|j| j * order.period)).collect();
    let start = order.ar_lag();
    let m = lags.len();
    let mut xtx = vec![vec![0.0; m]; m];
    let mut xty = vec![0.0; m];
    for t in start..w.len() {
        for i in 0..m {
            xty[i] += w[t - lags[i]] * w[t];
            for j in 0..m {
                xtx[i][j] += w[t - lags[i]] * w[t - lags[j]];
            }
        }
    }
    let beta = if m == 0 { vec![] } else { solve_linear(xtx, xty).unwrap_or_else(|| vec![0.0; m]) };
    let (mut ar, mut sar) = (beta[..order.p].to_vec(), beta[order.p..].to_vec());
    // pull back into the stationary region
    for _ in 0..60 {
        if is_stationary(&ar) && is_stationary(&sar) {
            break;
        }
        ar.iter_mut().chain(sar.iter_mut()).for_each(|c| *c *= 0.8);
    }
    if !(is_stationary(&ar) && is_stationary(&sar)) {
        ar.fill(0.0);
        sar.fill(0.0);
    }
    let mut x = ar;
    x.extend(std::iter::repeat_n(0.0, order.q));
    x.extend(sar);
    x.extend(std::iter::repeat_n(0.0, order.seasonal_q));
    x
}

/// Fit by conditional sum of squares with Nelder-Mead.
pub fn fit_sarima(series: &[f64], order: SarimaOrder) -> Result<SarimaModel> {
    fit_sarima_with(series, order, FitOptions::default())
}

pub fn fit_sarima_with(series: &[f64], order: SarimaOrder, options: FitOptions) -> Result<SarimaModel> {
    order.validate()?;
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("series passed to fit_sarima".into()));
    }
    let include_mean = options.include_mean && order.diff_lag() == 0;
    let layout = Layout { order, mean: include_mean };
    let needed_w = MIN_OBS_PER_PARAM * (layout.len() + 1);
    let needed = needed_w.max(order.ar_lag() + 1) + order.diff_lag();
    if series.len() < needed {
        return Err(Error::InsufficientData { needed, got: series.len() });
    }
    let w = fully_difference(series, &order)?;
    let start = order.ar_lag();

    // optimize on unit-scale data so every parameter is dimensionless
    let scale = crate::util::variance(&w).sqrt();
    let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
    let wn: Vec<f64> = w.iter().map(|v| v / scale).collect();
    let mean0 = crate::util::mean(&wn);
    let centred: Vec<f64> = if include_mean { wn.iter().map(|v| v - mean0).collect() } else { wn.clone() };
    let mut x0 = warm_start(&centred, &order);
    if include_mean {
        x0.push(mean0);
    }

    let objective = |x: &[f64]| -> f64 {
        let p = layout.split(x);
        if !p.admissible() {
            return f64::INFINITY;
        }
        let ex = expand(p.ar, p.ma, p.sar, p.sma, order.period);
        let shifted: Vec<f64> = wn.iter().map(|v| v - p.mean).collect();
        let e = innovations(&shifted, &ex, start);
        let css: f64 = e[start..].iter().map(|v| v * v).sum();
        if css.is_finite() {
            css
        } else {
            f64::INFINITY
        }
    };

    let (mut x, iterations) = if layout.len() == 0 {
        (vec![], 0)
    } else {
        let cfg = NelderMeadConfig { max_iter: options.max_iter, ftol: 1e-13, xtol: 1e-10, initial_step: 0.1 };
        let mut best = nelder_mead(objective, &x0, &cfg);
        let mut iterations = best.iterations;
        // restart from the optimum until it stops improving
        for _ in 0..4 {
            let again = nelder_mead(objective, &best.x, &cfg);
            iterations += again.iterations;
            let improved = again.value < best.value * (1.0 - 1e-12);
            if again.value <= best.value {
                best = again;
            }
            if !improved {
                break;
            }
        }
        if !best.converged {
            return Err(Error::Optimizer(format!(
                "Nelder-Mead did not converge for {order} after {iterations} iterations (css {})",
                best.value
            )));
        }
        if !best.value.is_finite() {
            return Err(Error::Optimizer(format!("no admissible parameters found for {order}")));
        }
        (best.x, iterations)
    };
    if include_mean {
        let last = x.len() - 1;
        x[last] *= scale;
    }

    let p = layout.split(&x);
    if !p.admissible() {
        return Err(Error::Optimizer(format!("fitted {order} is not stationary or invertible")));
    }
    let ex = expand(p.ar, p.ma, p.sar, p.sma, order.period);
    let shifted: Vec<f64> = w.iter().map(|v| v - p.mean).collect();
    let e = innovations(&shifted, &ex, start);
    let residuals = e[start..].to_vec();
    let css: f64 = residuals.iter().map(|v| v * v).sum();
    let sigma2 = (css / residuals.len() as f64).max(f64::MIN_POSITIVE);

    let tail_len = order.diff_lag() + order.ar_lag();
    let history_tail = series[series.len() - tail_len..].to_vec();
    let residual_tail = e[e.len() - order.ma_lag().min(e.len())..].to_vec();

    Ok(SarimaModel {
        order,
        ar: p.ar.to_vec(),
        ma: p.ma.to_vec(),
        sar: p.sar.to_vec(),
        sma: p.sma.to_vec(),
        mean: include_mean.then_some(p.mean),
        sigma2,
        css,
        residuals,
        history_tail,
        residual_tail,
        n_differenced: w.len(),
        iterations,
    })
}

impl SarimaModel {
    /// A model with given coefficients, conditioned on `history`.
    pub fn with_coefficients(
        order: SarimaOrder,
        coefs: SarimaCoefficients,
        mean: Option<f64>,
        history: &[f64],
    ) -> Result<Self> {
        order.validate()?;
        coefs.check(&order)?;
        if history.len() <= order.diff_lag() {
            return Err(Error::InsufficientData { needed: order.diff_lag() + 1, got: history.len() });
        }
        let mut model = SarimaModel {
            order,
            ar: coefs.ar,
            ma: coefs.ma,
            sar: coefs.sar,
            sma: coefs.sma,
            mean,
            sigma2: f64::MIN_POSITIVE,
            css: 0.0,
            residuals: vec![],
            history_tail: vec![],
            residual_tail: vec![],
            n_differenced: history.len() - order.diff_lag(),
            iterations: 0,
        };
        let w_len = history.len() - order.diff_lag();
        if w_len > order.ar_lag() {
            model.residuals = model.in_sample_residuals(history)?;
            model.css = model.residuals.iter().map(|v| v * v).sum();
            model.sigma2 = (model.css / model.residuals.len() as f64).max(f64::MIN_POSITIVE);
            let keep = order.ma_lag().min(model.residuals.len());
            model.residual_tail = model.residuals[model.residuals.len() - keep..].to_vec();
        }
        let tail_len = (order.diff_lag() + order.ar_lag()).min(history.len());
        model.history_tail = history[history.len() - tail_len..].to_vec();
        Ok(model)
    }

    fn expanded(&self) -> Expanded {
        expand(&self.ar, &self.ma, &self.sar, &self.sma, self.order.period)
    }

    /// Expanded AR coefficients `a_1..a_{p+PS}` of the differenced series.
    pub fn expanded_ar(&self) -> Vec<f64> {
        self.expanded().a[1..].to_vec()
    }

    /// Expanded MA coefficients `b_1..b_{q+QS}`.
    pub fn expanded_ma(&self) -> Vec<f64> {
        self.expanded().b[1..].to_vec()
    }

    /// One-step innovations of `series` under the fitted coefficients.
    pub fn in_sample_residuals(&self, series: &[f64]) -> Result<Vec<f64>> {
        let w = fully_difference(series, &self.order)?;
        let start = self.order.ar_lag();
        if w.len() <= start {
            return Err(Error::InsufficientData { needed: start + 1 + self.order.diff_lag(), got: series.len() });
        }
        let mu = self.mean.unwrap_or(0.0);
        let shifted: Vec<f64> = w.iter().map(|v| v - mu).collect();
        Ok(innovations(&shifted, &self.expanded(), start)[start..].to_vec())
    }

    /// Forecast `h` steps past the end of the fitted series.
    pub fn forecast(&self, h: usize) -> Result<Vec<f64>> {
        self.project(&self.history_tail, &self.residual_tail, h)
    }

    /// Forecast `h` steps past the end of `history` with the fitted coefficients.
    pub fn forecast_from(&self, history: &[f64], h: usize) -> Result<Vec<f64>> {
        let needed = self.order.diff_lag() + 1;
        if history.len() < needed {
            return Err(Error::InsufficientData { needed, got: history.len() });
        }
        let tail_len = (self.order.diff_lag() + self.order.ar_lag()).min(history.len());
        let tail = &history[history.len() - tail_len..];
        let residual_tail = if self.order.ma_lag() == 0 {
            vec![]
        } else {
            let mut e = self.in_sample_residuals(history)?;
            e.split_off(e.len() - self.order.ma_lag().min(e.len()))
        };
        self.project(tail, &residual_tail, h)
    }

    fn project(&self, tail: &[f64], residual_tail: &[f64], h: usize) -> Result<Vec<f64>> {
        if h == 0 {
            return Err(Error::invalid("forecast horizon must be at least 1"));
        }
        let lags = self.order.diff_lags();
        // stages[0] = tail, stages[k + 1] = stages[k] differenced at lags[k]
        let mut stages = vec![tail.to_vec()];
        for &lag in &lags {
            let prev = stages.last().expect("stage");
            if prev.len() < lag {
                return Err(Error::invalid("history tail too short"));
            }
            stages.push((lag..prev.len()).map(|t| prev[t] - prev[t - lag]).collect());
        }
        let ex = self.expanded();
        let mu = self.mean.unwrap_or(0.0);
        // pre-sample values of the differenced series are taken as zero
        let last = stages.last().expect("stage");
        let pad = self.order.ar_lag().saturating_sub(last.len());
        let mut w: Vec<f64> = vec![0.0; pad];
        w.extend(last.iter().map(|v| v - mu));
        let n0 = w.len();
        // innovation at past time j < n0; future innovations are zero
        let past_e = |j: usize| -> f64 {
            let back = n0 - j;
            if back <= residual_tail.len() {
                residual_tail[residual_tail.len() - back]
            } else {
                0.0
            }
        };
        for t in n0..n0 + h {
            let mut v = 0.0;
            for (k, a) in ex.a.iter().enumerate().skip(1) {
                v += a * w[t - k];
            }
            for (k, b) in ex.b.iter().enumerate().skip(1) {
                if t >= k && t - k < n0 {
                    v += b * past_e(t - k);
                }
            }
            w.push(v);
        }
        let mut future: Vec<f64> = w[n0..].iter().map(|v| v + mu).collect();
        for (k, &lag) in lags.iter().enumerate().rev() {
            let mut ext = stages[k].clone();
            let base = ext.len();
            for (i, f) in future.iter().enumerate() {
                let prev = ext[base + i - lag];
                ext.push(prev + f);
            }
            future = ext[base..].to_vec();
        }
        Ok(future)
    }

    /// Number of estimated parameters including the innovation variance.
    pub fn n_params(&self) -> usize {
        self.order.n_coefficients() + usize::from(self.mean.is_some()) + 1
    }

    /// Gaussian log-likelihood implied by the conditional sum of squares,
    /// scaled to the full differenced length so orders are comparable.
    pub fn log_likelihood(&self) -> f64 {
        self.log_likelihood_with_n(self.n_differenced)
    }

    pub fn aicc(&self) -> f64 {
        self.aicc_with_n(self.n_differenced)
    }

    fn log_likelihood_with_n(&self, n: usize) -> f64 {
        -0.5 * n as f64 * ((2.0 * std::f64::consts::PI * self.sigma2).ln() + 1.0)
    }

    /// AICc with the likelihood taken over `n` observations, for comparing
    /// models whose differenced lengths differ.
    pub fn aicc_with_n(&self, n: usize) -> f64 {
        let ll = self.log_likelihood_with_n(n);
        let n = n as f64;
        let k = self.n_params() as f64;
        if n - k - 1.0 <= 0.0 {
            return f64::INFINITY;
        }
        -2.0 * ll + 2.0 * k + 2.0 * k * (k + 1.0) / (n - k - 1.0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(s)?;
        model.order.validate()?;
        Ok(model)
    }
}

/// AICc of `model`; `series` must be the series it was fitted on.
pub fn aicc(model: &SarimaModel, series: &[f64]) -> Result<f64> {
    let res = model.in_sample_residuals(series)?;
    if res.len() != model.residuals.len() {
        return Err(Error::invalid("series does not match the fitted model"));
    }
    Ok(model.aicc())
}

/// Coefficients of a process to simulate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SarimaCoefficients {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub sar: Vec<f64>,
    pub sma: Vec<f64>,
}

impl SarimaCoefficients {
    fn check(&self, order: &SarimaOrder) -> Result<()> {
        if self.ar.len() != order.p
            || self.ma.len() != order.q
            || self.sar.len() != order.seasonal_p
            || self.sma.len() != order.seasonal_q
        {
            return Err(Error::invalid("coefficient counts do not match the order"));
        }
        Ok(())
    }
}

/// Simulate `n` observations: a burnt-in ARMA for the differenced series,
/// integrated from zero initial values.
pub fn simulate(order: &SarimaOrder, coefs: &SarimaCoefficients, sigma: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    order.validate()?;
    coefs.check(order)?;
    let lead = order.diff_lag();
    if n <= lead {
        return Err(Error::InsufficientData { needed: lead + 1, got: n });
    }
    let ex = expand(&coefs.ar, &coefs.ma, &coefs.sar, &coefs.sma, order.period);
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::invalid(e.to_string()))?;
    let mut rng = crate::util::rng_for(seed, 0);
    let burn = 500 + 10 * (order.ar_lag() + order.ma_lag());
    let total = burn + n - lead;
    let mut w = vec![0.0; total];
    let mut e = vec![0.0; total];
    for t in 0..total {
        e[t] = normal.sample(&mut rng);
        let mut v = e[t];
        for (k, a) in ex.a.iter().enumerate().skip(1) {
            if t >= k {
                v += a * w[t - k];
            }
        }
        for (k, b) in ex.b.iter().enumerate().skip(1) {
            if t >= k {
                v += b * e[t - k];
            }
        }
        w[t] = v;
    }
    let mut x = w[burn..].to_vec();
    for &lag in order.diff_lags().iter().rev() {
        x = crate::series::undifference(&x, &vec![0.0; lag], lag)?;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_of_seasonal_ar() {
        let ex = expand(&[0.5], &[], &[0.3], &[], 7);
        assert_eq!(ex.a.len(), 9);
        assert!((ex.a[1] - 0.5).abs() < 1e-15);
        assert!((ex.a[7] - 0.3).abs() < 1e-15);
        assert!((ex.a[8] + 0.15).abs() < 1e-15);
        assert!(ex.a[2..7].iter().all(|&c| c == 0.0));
        assert_eq!(ex.b, vec![1.0]);
    }

    #[test]
    fn stationarity_checks() {
        assert!(is_stationary(&[0.5]));
        assert!(!is_stationary(&[1.0]));
        assert!(!is_stationary(&[-1.2]));
        // AR(2) triangle: phi2 < 1 - phi1 fails here
        assert!(!is_stationary(&[0.7, 0.4]));
        assert!(is_stationary(&[0.5, -0.3]));
        assert!(is_stationary(&[]));
        assert!(is_invertible(&[0.9]));
        assert!(!is_invertible(&[-1.5]));
    }

    #[test]
    fn order_validation() {
        assert!(SarimaOrder::new((1, 1, 0), (1, 1, 0), 1).is_err());
        assert!(SarimaOrder::new((1, 1, 0), (0, 0, 0), 0).is_err());
        assert_eq!(SarimaOrder::airline_ar(7).to_string(), "(1,1,0)x(1,1,0)_7");
    }

    #[test]
    fn fully_difference_lengths() {
        let x: Vec<f64> = (0..30).map(f64::from).collect();
        let w = fully_difference(&x, &SarimaOrder::airline_ar(7)).unwrap();
        assert_eq!(w.len(), 22);
        assert!(w.iter().all(|&v| v == 0.0));
    }
}
