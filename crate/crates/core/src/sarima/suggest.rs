use serde::{Deserialize, Serialize};

use super::{fully_difference, SarimaOrder};
use crate::error::{Error, Result};
use crate::series::{acf, pacf_from_acf};

/// A differencing candidate must cut the variance below this fraction of the
/// current best to be preferred.
const VARIANCE_RATIO: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderDiagnostics {
    /// `(d, D, variance)` of every differencing candidate.
    pub variances: Vec<(usize, usize, f64)>,
    /// ACF and PACF of the chosen differenced series, lags `0..=3S`.
    pub acf: Vec<f64>,
    pub pacf: Vec<f64>,
    /// Two-sided significance band `2 / sqrt(n)`.
    pub band: f64,
}

impl OrderDiagnostics {
    pub fn is_significant(&self, value: f64) -> bool {
        value.abs() > self.band
    }

    /// Tab-separated `lag acf pacf flags` rows.
    pub fn table(&self) -> String {
        let mut out = String::from("lag\tacf\tpacf\tsig_acf\tsig_pacf\n");
        for lag in 1..self.acf.len() {
            out.push_str(&format!(
                "{lag}\t{:.4}\t{:.4}\t{}\t{}\n",
                self.acf[lag],
                self.pacf[lag],
                u8::from(self.is_significant(self.acf[lag])),
                u8::from(self.is_significant(self.pacf[lag]))
            ));
        }
        out
    }
}

/// Picks differencing by variance reduction, then AR/MA orders from ACF/PACF
/// spikes at lags 1, 2, 3 and S, 2S.
pub fn suggest_order(series: &[f64], period: usize) -> Result<(SarimaOrder, OrderDiagnostics)> {
    let seasonal = period >= 2;
    let max_lag = if seasonal { 3 * period } else { 3 };
    let candidates: &[(usize, usize)] = if seasonal { &[(0, 0), (1, 0), (0, 1), (1, 1)] } else { &[(0, 0), (1, 0)] };
    let needed = 1 + period + max_lag + 2;
    if series.len() < needed {
        return Err(Error::InsufficientData { needed, got: series.len() });
    }

    let mut variances = Vec::new();
    let mut best: Option<(usize, usize, f64)> = None;
    for &(d, sd) in candidates {
        let order = SarimaOrder { p: 0, d, q: 0, seasonal_p: 0, seasonal_d: sd, seasonal_q: 0, period: period.max(1) };
        let w = fully_difference(series, &order)?;
        let v = crate::util::variance(&w);
        variances.push((d, sd, v));
        if best.is_none_or(|(_, _, b)| v < VARIANCE_RATIO * b) {
            best = Some((d, sd, v));
        }
    }
    let (d, sd, _) = best.expect("candidates");
    let base = SarimaOrder { p: 0, d, q: 0, seasonal_p: 0, seasonal_d: sd, seasonal_q: 0, period: period.max(1) };
    let w = fully_difference(series, &base)?;

    let rho = match acf(&w, max_lag) {
        Ok(r) => r,
        // a perfectly annihilated series has nothing left to model
        Err(Error::ZeroVariance) => {
            let diag = OrderDiagnostics { variances, acf: vec![], pacf: vec![], band: 0.0 };
            return Ok((base, diag));
        }
        Err(e) => return Err(e),
    };
    let phi = pacf_from_acf(&rho);
    let diag = OrderDiagnostics { variances, band: 2.0 / (w.len() as f64).sqrt(), acf: rho, pacf: phi };
    let sig = |v: f64| diag.is_significant(v);

    let (p, q) = pick(&diag.acf, &diag.pacf, 1, &sig, true);
    let (sp, sq) = if seasonal { pick(&diag.acf, &diag.pacf, period, &sig, false) } else { (0, 0) };
    let order = SarimaOrder { p, q, seasonal_p: sp, seasonal_q: sq, ..base };
    Ok((order, diag))
}

/// `(ar, ma)` order at lag multiples of `step`. An ACF spike at one step that
/// cuts off while the PACF decays marks an MA(1); otherwise a PACF spike at one
/// step marks an AR(1).
fn pick(rho: &[f64], phi: &[f64], step: usize, sig: &dyn Fn(f64) -> bool, check_third: bool) -> (usize, usize) {
    let acf_cut = !sig(rho[2 * step]) && (!check_third || !sig(rho[3 * step]));
    if sig(rho[step]) && acf_cut && sig(phi[2 * step]) {
        (0, 1)
    } else if sig(phi[step]) {
        (1, 0)
    } else {
        (0, 0)
    }
}
