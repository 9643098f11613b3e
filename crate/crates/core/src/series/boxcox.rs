use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Box-Cox power transform parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformParams {
    pub lambda: f64,
    /// Added to every input before transforming.
    pub shift: f64,
}

impl TransformParams {
    pub fn new(lambda: f64, shift: f64) -> Self {
        Self { lambda, shift }
    }

    pub fn identity_shift() -> Self {
        Self { lambda: 1.0, shift: 0.0 }
    }

    fn is_log(&self) -> bool {
        self.lambda.abs() < 1e-12
    }

    pub fn apply_all(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.iter().map(|&x| boxcox_apply(x, self)).collect()
    }

    pub fn invert_all(&self, ys: &[f64]) -> Result<Vec<f64>> {
        ys.iter().map(|&y| boxcox_invert(y, self)).collect()
    }
}

const GRID_MIN: i32 = -100;
const GRID_MAX: i32 = 200;

pub fn boxcox_apply(x: f64, params: &TransformParams) -> Result<f64> {
    let z = x + params.shift;
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain { value: x });
    }
    Ok(if params.is_log() { z.ln() } else { (z.powf(params.lambda) - 1.0) / params.lambda })
}

pub fn boxcox_invert(y: f64, params: &TransformParams) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::Domain { value: y });
    }
    let z = if params.is_log() {
        y.exp()
    } else {
        let base = params.lambda * y + 1.0;
        if !(base > 0.0) {
            return Err(Error::Domain { value: y });
        }
        base.powf(1.0 / params.lambda)
    };
    if !z.is_finite() {
        return Err(Error::Domain { value: y });
    }
    Ok(z - params.shift)
}

/// Profile log-likelihood of `lambda` for already-shifted positive data.
pub fn boxcox_log_likelihood(shifted: &[f64], lambda: f64) -> f64 {
    let n = shifted.len() as f64;
    let params = TransformParams::new(lambda, 0.0);
    let ys: Vec<f64> = shifted.iter().map(|&x| boxcox_apply(x, &params).expect("positive input")).collect();
    let var = crate::util::variance(&ys);
    let log_sum: f64 = shifted.iter().map(|x| x.ln()).sum();
    -0.5 * n * var.ln() + (lambda - 1.0) * log_sum
}

/// Maximize the profile log-likelihood over lambda in [-1, 2], step 0.01.
///
/// The shift is `1 - min(x)` when the minimum is not positive, otherwise 0.
pub fn boxcox_fit(values: &[f64]) -> Result<TransformParams> {
    if values.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: values.len() });
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("box-cox input {v}")));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return Err(Error::ZeroVariance);
    }
    let shift = if min <= 0.0 { 1.0 - min } else { 0.0 };
    let shifted: Vec<f64> = values.iter().map(|x| x + shift).collect();

    let mut best = (f64::NEG_INFINITY, 1.0);
    for step in GRID_MIN..=GRID_MAX {
        let lambda = step as f64 / 100.0;
        let ll = boxcox_log_likelihood(&shifted, lambda);
        if ll > best.0 {
            best = (ll, lambda);
        }
    }
    if !best.0.is_finite() {
        return Err(Error::ZeroVariance);
    }
    Ok(TransformParams { lambda: best.1, shift })
}
