use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{EvaluationReport, GridRow, RowStatus};
use super::{
    default_train_end, forecast_series, mape, mpe_peak, Approach, Dataset, ForecastSettings, Method, SplitSpec,
};
use crate::clustering::{forecastable_clusters, ClusterModel};
use crate::error::{Error, Result};
use crate::series::{aggregate_network, extract_busy_hours, sample_at_timestamps, BusyHourSeries, TransformParams};
use crate::util::mix_seed;

/// Forecast of the aggregate busy-hour series over one test window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellForecast {
    pub method: Method,
    pub approach: Approach,
    pub split: SplitSpec,
    pub dates: Vec<NaiveDate>,
    pub actual: Vec<f64>,
    pub predicted: Vec<f64>,
    /// Clusters forecast separately; `[0]` for CU.
    pub clusters: Vec<usize>,
    pub transforms: Vec<TransformParams>,
}

impl CellForecast {
    pub fn mape(&self) -> Result<f64> {
        mape(&self.actual, &self.predicted)
    }

    pub fn mpe_peak(&self) -> Result<f64> {
        mpe_peak(&self.actual, &self.predicted)
    }
}

/// Aggregate busy hours plus the busy-hour series of each forecast cluster.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub busy: BusyHourSeries,
    /// `(cluster, values)` sampled at the aggregate busy-hour timestamps.
    pub clusters: Vec<(usize, Vec<f64>)>,
}

impl Prepared {
    pub fn new(dataset: &Dataset, ca: Option<(&ClusterModel, &[usize])>) -> Result<Self> {
        let window = dataset.common_window()?;
        let aggregate = aggregate_network(&dataset.traces, &window, dataset.policy)?;
        let busy = extract_busy_hours(&aggregate)?;
        let clusters = match ca {
            None => Vec::new(),
            Some((model, included)) => {
                if included.is_empty() {
                    return Err(Error::invalid("cluster-aware forecasting needs at least one cluster"));
                }
                let all = cluster_busy_series(dataset, model, &busy)?;
                included
                    .iter()
                    .map(|&c| {
                        all.get(c)
                            .cloned()
                            .map(|v| (c, v))
                            .ok_or_else(|| Error::invalid(format!("cluster {c} does not exist (k = {})", model.k)))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(Self { busy, clusters })
    }

    pub fn last_day(&self) -> NaiveDate {
        self.busy.entries.last().expect("non-empty").date
    }

    /// Index range of `first..=last` in the busy-hour series, which must hold every day.
    fn day_range(&self, first: NaiveDate, last: NaiveDate) -> Result<std::ops::Range<usize>> {
        let entries = &self.busy.entries;
        let start = entries.iter().position(|e| e.date == first);
        let end = entries.iter().position(|e| e.date == last);
        let days = (last - first).num_days() as usize + 1;
        match (start, end) {
            (Some(s), Some(e)) if e + 1 - s == days => Ok(s..e + 1),
            _ => Err(Error::NotCovered(format!("days {first} to {last}"))),
        }
    }

    pub fn forecast(
        &self,
        method: Method,
        approach: Approach,
        split: &SplitSpec,
        settings: &ForecastSettings,
        seed: u64,
    ) -> Result<CellForecast> {
        let train = self.day_range(split.train_start(), split.train_end)?;
        let test = self.day_range(split.test_start(), split.test_end())?;
        let horizon = test.len();
        let base = split_seed(seed, split);
        let values = self.busy.values();
        let (clusters, transforms, predicted) = match approach {
            Approach::Cu => {
                let f = forecast_series(method, &values[train], horizon, settings, mix_seed(base, 0))?;
                (vec![0], vec![f.transform], f.predicted)
            }
            Approach::Ca => {
                if self.clusters.is_empty() {
                    return Err(Error::invalid("no clusters prepared for cluster-aware forecasting"));
                }
                let mut sum = vec![0.0; horizon];
                let mut transforms = Vec::with_capacity(self.clusters.len());
                for (j, (c, series)) in self.clusters.iter().enumerate() {
                    let f =
                        forecast_series(method, &series[train.clone()], horizon, settings, mix_seed(base, j as u64))
                            .map_err(|e| Error::Cluster { cluster: *c, source: Box::new(e) })?;
                    for (acc, v) in sum.iter_mut().zip(&f.predicted) {
                        *acc += v;
                    }
                    transforms.push(f.transform);
                }
                (self.clusters.iter().map(|(c, _)| *c).collect(), transforms, sum)
            }
        };
        Ok(CellForecast {
            method,
            approach,
            split: *split,
            dates: self.busy.entries[test.clone()].iter().map(|e| e.date).collect(),
            actual: values[test].to_vec(),
            predicted,
            clusters,
            transforms,
        })
    }
}

fn split_seed(seed: u64, split: &SplitSpec) -> u64 {
    mix_seed(seed, (u64::from(split.tl) << 8) | u64::from(split.la))
}

/// Busy-hour values of every cluster, read at the aggregate busy-hour timestamps.
pub fn cluster_busy_series(dataset: &Dataset, model: &ClusterModel, busy: &BusyHourSeries) -> Result<Vec<Vec<f64>>> {
    for cell in &model.cell_ids {
        if !dataset.traces.iter().any(|t| t.cell_id() == cell) {
            return Err(Error::invalid(format!("no trace for clustered cell {cell}")));
        }
    }
    let window = dataset.common_window()?;
    let timestamps = busy.timestamps();
    (0..model.k)
        .map(|c| {
            let members = dataset.traces.iter().filter(|t| model.cluster_of(t.cell_id()) == Some(c));
            let aggregate = aggregate_network(members, &window, dataset.policy)
                .map_err(|e| Error::Cluster { cluster: c, source: Box::new(e) })?;
            sample_at_timestamps(&aggregate, &timestamps)
        })
        .collect()
}

/// Clusters carrying at least `threshold` of the traffic, or all clusters when
/// the model has no traffic shares.
pub fn ca_clusters(model: &ClusterModel, threshold: f64) -> Vec<usize> {
    match &model.traffic_share {
        Some(shares) => forecastable_clusters(shares, threshold),
        None => (0..model.k).collect(),
    }
}

pub fn run_cu(
    dataset: &Dataset,
    method: Method,
    split: &SplitSpec,
    settings: &ForecastSettings,
    seed: u64,
) -> Result<CellForecast> {
    Prepared::new(dataset, None)?.forecast(method, Approach::Cu, split, settings, seed)
}

pub fn run_ca(
    dataset: &Dataset,
    model: &ClusterModel,
    clusters: &[usize],
    method: Method,
    split: &SplitSpec,
    settings: &ForecastSettings,
    seed: u64,
) -> Result<CellForecast> {
    Prepared::new(dataset, Some((model, clusters)))?.forecast(method, Approach::Ca, split, settings, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub methods: Vec<Method>,
    pub approaches: Vec<Approach>,
    pub tls: Vec<u32>,
    pub las: Vec<u32>,
    /// Defaults to the latest day leaving `max(las)` months of test data.
    pub train_end: Option<NaiveDate>,
    pub settings: ForecastSettings,
    pub seed: u64,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() || self.approaches.is_empty() || self.tls.is_empty() || self.las.is_empty() {
            return Err(Error::invalid("grid needs at least one method, approach, TL and LA"));
        }
        let probe = NaiveDate::from_ymd_opt(2000, 1, 31).expect("valid date");
        for &tl in &self.tls {
            for &la in &self.las {
                SplitSpec::new(probe, tl, la)?;
            }
        }
        Ok(())
    }
}

/// Evaluate every (method, approach, TL, LA) cell; failed cells are reported, not fatal.
pub fn grid_evaluate(
    dataset: &Dataset,
    ca: Option<(&ClusterModel, &[usize])>,
    spec: &GridSpec,
) -> Result<EvaluationReport> {
    spec.validate()?;
    if spec.approaches.contains(&Approach::Ca) && ca.is_none() {
        return Err(Error::invalid("cluster-aware rows need a cluster model"));
    }
    let prepared = Prepared::new(dataset, if spec.approaches.contains(&Approach::Ca) { ca } else { None })?;
    let max_la = *spec.las.iter().max().expect("validated");
    let train_end = spec.train_end.unwrap_or_else(|| default_train_end(prepared.last_day(), max_la));

    let mut jobs = Vec::new();
    for &method in &spec.methods {
        for &approach in &spec.approaches {
            for &tl in &spec.tls {
                for &la in &spec.las {
                    jobs.push((method, approach, SplitSpec::new(train_end, tl, la)?));
                }
            }
        }
    }
    jobs.sort_by_key(|(m, a, s)| (*m, *a, s.tl, s.la));
    jobs.dedup();

    let results: Vec<(GridRow, Option<CellForecast>)> = jobs
        .par_iter()
        .map(|(method, approach, split)| {
            let outcome = prepared
                .forecast(*method, *approach, split, &spec.settings, spec.seed)
                .and_then(|f| Ok((f.mape()?, f.mpe_peak()?, f)));
            let mut row = GridRow {
                method: *method,
                approach: *approach,
                tl: split.tl,
                la: split.la,
                status: RowStatus::Ok,
                mape: None,
                mpe_peak: None,
                n: split.test_days(),
                error: None,
            };
            match outcome {
                Ok((m, p, f)) => {
                    row.mape = Some(m);
                    row.mpe_peak = Some(p);
                    row.n = f.actual.len();
                    (row, Some(f))
                }
                Err(e) => {
                    row.status = RowStatus::Failed;
                    row.error = Some(e.to_string());
                    (row, None)
                }
            }
        })
        .collect();

    let (rows, forecasts): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok(EvaluationReport { train_end, seed: spec.seed, rows, forecasts: forecasts.into_iter().flatten().collect() })
}
