use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use bhcast_core::clustering::{Normalization, DEFAULT_EXCLUSION_THRESHOLD};
use bhcast_core::lstm::{LstmConfig, Profile};
use bhcast_core::pipeline::{Approach, ForecastSettings, GridSpec, Method, MAX_TL};
use bhcast_core::sarima::SarimaOrder;
use bhcast_core::series::MissingPolicy;
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Parsed run configuration. Every field has a default, so an empty file is valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Traffic CSV to read.
    pub dataset: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub profile: Profile,
    /// Worker threads for grid jobs; 0 uses every available core.
    pub workers: usize,
    /// Reject duplicate (cell, hour) rows.
    pub strict: bool,
    pub missing: MissingPolicy,
    pub clustering: ClusteringConfig,
    pub forecast: ForecastConfig,
    pub synth: SynthConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClusteringConfig {
    /// Days of history used for signatures, ending at `window_end`.
    pub window_days: u32,
    /// Defaults to the forecast training end.
    pub window_end: Option<NaiveDate>,
    /// Fixed k; when absent k is chosen by silhouette over `k_min..=k_max`.
    pub k: Option<usize>,
    pub k_min: usize,
    pub k_max: usize,
    pub restarts: usize,
    /// Clusters serving less than this share of traffic are not forecast.
    pub exclusion_threshold: f64,
    pub normalization: Normalization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForecastConfig {
    pub methods: Vec<Method>,
    pub approaches: Vec<Approach>,
    pub tl: Vec<u32>,
    pub la: Vec<u32>,
    /// Defaults to the latest day leaving `max(la)` months of test data.
    pub train_end: Option<NaiveDate>,
    /// Pin the Box-Cox lambda instead of fitting it per series.
    pub boxcox_lambda: Option<f64>,
    pub sa_order: SarimaOrder,
    pub ad_robust: bool,
    pub lstm: LstmOverrides,
}

/// Changes to the profile's LSTM preset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LstmOverrides {
    pub encoder_cells: Option<usize>,
    pub fc_width: Option<usize>,
    pub epochs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub batch_size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub start: NaiveDate,
    pub days: usize,
    /// Cells per built-in archetype (R1, R2, B, T, U).
    pub cells: BTreeMap<String, usize>,
    /// Overrides every archetype's noise level.
    pub noise_sigma: Option<f64>,
    /// Overrides every archetype's daily trend.
    pub trend_slope: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            output_dir: PathBuf::from("out"),
            seed: 0,
            profile: Profile::Paper,
            workers: 0,
            strict: false,
            missing: MissingPolicy::Reject,
            clustering: ClusteringConfig::default(),
            forecast: ForecastConfig::default(),
            synth: SynthConfig::default(),
        }
    }
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        Self {
            window_days: 28,
            window_end: None,
            k: None,
            k_min: 2,
            k_max: 10,
            restarts: 10,
            exclusion_threshold: DEFAULT_EXCLUSION_THRESHOLD,
            normalization: Normalization::Max,
        }
    }
}

impl Default for ForecastConfig {
    fn default() -> Self {
        Self {
            methods: Method::ALL.to_vec(),
            approaches: vec![Approach::Cu, Approach::Ca],
            tl: (1..=MAX_TL).collect(),
            la: vec![1, 2],
            train_end: None,
            boxcox_lambda: None,
            sa_order: SarimaOrder::airline_ar(7),
            ad_robust: false,
            lstm: LstmOverrides::default(),
        }
    }
}

impl Default for SynthConfig {
    fn default() -> Self {
        let cells = [("R1", 40), ("R2", 25), ("B", 15), ("T", 15), ("U", 5)];
        Self {
            start: NaiveDate::from_ymd_opt(2021, 1, 1).expect("valid date"),
            days: 212,
            cells: cells.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            noise_sigma: None,
            trend_slope: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let c = &self.clustering;
        if c.window_days < 7 {
            return bad(format!("clustering.window_days must be at least 7, got {}", c.window_days));
        }
        if c.k_min < 2 || c.k_max < c.k_min {
            return bad(format!("clustering k range {}..={} is invalid", c.k_min, c.k_max));
        }
        if matches!(c.k, Some(k) if k == 0) {
            return bad("clustering.k must be positive".into());
        }
        if c.restarts == 0 {
            return bad("clustering.restarts must be positive".into());
        }
        if !(0.0..1.0).contains(&c.exclusion_threshold) {
            return bad(format!("clustering.exclusion_threshold must be in [0, 1), got {}", c.exclusion_threshold));
        }
        let f = &self.forecast;
        let spec = self.grid_spec(None);
        spec.validate().map_err(|e| CliError::Config(format!("forecast: {e}")))?;
        f.sa_order.validate().map_err(|e| CliError::Config(format!("forecast.sa_order: {e}")))?;
        if let Some(l) = f.boxcox_lambda {
            if !l.is_finite() {
                return bad("forecast.boxcox_lambda must be finite".into());
            }
        }
        self.lstm_config().validate().map_err(|e| CliError::Config(format!("forecast.lstm: {e}")))?;
        if let MissingPolicy::Interpolate { max_gap: 0 } = self.missing {
            return bad("missing.max_gap must be positive".into());
        }
        if self.synth.days < 7 {
            return bad("synth.days must be at least 7".into());
        }
        for name in self.synth.cells.keys() {
            if bhcast_core::synth::builtin_archetype(name).is_none() {
                return bad(format!("synth.cells: unknown archetype {name:?} (expected R1, R2, B, T or U)"));
            }
        }
        if self.synth.cells.values().sum::<usize>() == 0 {
            return bad("synth.cells must request at least one cell".into());
        }
        Ok(())
    }

    pub fn lstm_config(&self) -> LstmConfig {
        let o = &self.forecast.lstm;
        let mut c = LstmConfig::preset(self.profile);
        if let Some(n) = o.encoder_cells {
            c.encoder_cells = n;
            c.decoder_cells = n;
        }
        c.fc_width = o.fc_width.unwrap_or(c.fc_width);
        c.epochs = o.epochs.unwrap_or(c.epochs);
        c.learning_rate = o.learning_rate.unwrap_or(c.learning_rate);
        c.batch_size = o.batch_size.unwrap_or(c.batch_size);
        c
    }

    pub fn settings(&self) -> ForecastSettings {
        let mut s = ForecastSettings::for_profile(self.profile);
        s.sa_order = self.forecast.sa_order;
        s.ad.robust = self.forecast.ad_robust;
        s.lstm = self.lstm_config();
        s.boxcox_lambda = self.forecast.boxcox_lambda;
        s
    }

    pub fn grid_spec(&self, train_end: Option<NaiveDate>) -> GridSpec {
        GridSpec {
            methods: self.forecast.methods.clone(),
            approaches: self.forecast.approaches.clone(),
            tls: self.forecast.tl.clone(),
            las: self.forecast.la.clone(),
            train_end: train_end.or(self.forecast.train_end),
            settings: self.settings(),
            seed: self.seed,
        }
    }

    pub fn max_la(&self) -> u32 {
        self.forecast.la.iter().copied().max().unwrap_or(1)
    }
}
