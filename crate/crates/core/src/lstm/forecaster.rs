use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{make_windows, LstmConfig, LstmNetwork, TrainingReport};
use crate::error::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;

/// Z-score standardization fitted on the training series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: f64,
    pub std: f64,
}

impl Scaler {
    pub fn fit(series: &[f64]) -> Self {
        let std = crate::util::variance(series).sqrt();
        Self { mean: crate::util::mean(series), std: if std > 0.0 { std } else { 1.0 } }
    }

    pub fn apply(&self, v: f64) -> f64 {
        (v - self.mean) / self.std
    }

    pub fn invert(&self, v: f64) -> f64 {
        v * self.std + self.mean
    }
}

/// A trained network together with its input scaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmForecaster {
    pub version: u32,
    pub config: LstmConfig,
    pub scaler: Scaler,
    pub network: LstmNetwork,
}

impl LstmForecaster {
    pub fn fit(series: &[f64], config: LstmConfig) -> Result<(Self, TrainingReport)> {
        config.validate()?;
        let scaler = Scaler::fit(series);
        let scaled: Vec<f64> = series.iter().map(|&v| scaler.apply(v)).collect();
        let pairs = make_windows(&scaled, config.input_len, config.output_len)?;
        let mut network = LstmNetwork::new(config)?;
        let report = network.train(&pairs)?;
        Ok((Self { version: CHECKPOINT_VERSION, config, scaler, network }, report))
    }

    /// `output_len` values following the last `input_len` samples of `history`.
    pub fn forecast(&self, history: &[f64]) -> Result<Vec<f64>> {
        let l = self.config.input_len;
        if history.len() < l {
            return Err(Error::InsufficientData { needed: l, got: history.len() });
        }
        let window: Vec<f64> = history[history.len() - l..].iter().map(|&v| self.scaler.apply(v)).collect();
        Ok(self.network.forward(&window)?.into_iter().map(|v| self.scaler.invert(v)).collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(s)?;
        if f.version != CHECKPOINT_VERSION {
            return Err(Error::invalid(format!("unsupported checkpoint version {}", f.version)));
        }
        if f.network.config != f.config || f.network.params.len() != f.config.param_count() {
            return Err(Error::invalid("checkpoint header does not match its weights"));
        }
        Ok(f)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::util::write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
