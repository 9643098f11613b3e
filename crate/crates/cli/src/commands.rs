use std::path::{Path, PathBuf};
use std::time::Instant;

use bhcast_core::clustering::{kmeans, select_k, served_traffic_share, weekly_signatures, ClusterModel};
use bhcast_core::io::{read_traffic_csv_path, write_labels_csv, write_traffic_csv, IngestOptions, IngestSummary};
use bhcast_core::pipeline::{
    ca_clusters, default_train_end, grid_evaluate, Approach, Dataset, EvaluationReport, Method, RowStatus,
};
use bhcast_core::series::TimeWindow;
use bhcast_core::synth::{builtin_archetype, generate_scenario, ScenarioSpec};
use bhcast_core::util::{mix_seed, write_atomic};
use chrono::{Duration, NaiveDate};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

const CLUSTER_SEED_STREAM: u64 = 0xC1;

pub fn ingest(path: &Path, strict: bool) -> Result<IngestSummary, CliError> {
    if !path.is_file() {
        return Err(CliError::Config(format!("dataset {} does not exist", path.display())));
    }
    let started = Instant::now();
    let ingested = read_traffic_csv_path(path, IngestOptions { strict }).map_err(to_input_error)?;
    let secs = started.elapsed().as_secs_f64();
    let s = &ingested.summary;
    outln!("file        {}", path.display());
    outln!("rows        {}", s.rows);
    outln!("cells       {}", s.cells);
    outln!("days        {}", s.days);
    if let (Some(first), Some(last)) = (s.first, s.last) {
        outln!(
            "span        {} .. {}",
            bhcast_core::io::format_timestamp(first),
            bhcast_core::io::format_timestamp(last)
        );
    }
    outln!("missing     {} NA values, {} absent hours", s.missing_values, s.absent_hours);
    outln!("duplicates  {}", s.duplicates);
    outln!("throughput  {:.0} rows/s ({secs:.2} s)", s.rows as f64 / secs.max(1e-9));
    Ok(ingested.summary)
}

fn to_input_error(e: bhcast_core::Error) -> CliError {
    match e {
        bhcast_core::Error::Io(io) => CliError::Io(io),
        other => CliError::Input(other),
    }
}

pub fn load_dataset(config: &RunConfig) -> Result<Dataset, CliError> {
    let path = config
        .dataset
        .as_ref()
        .ok_or_else(|| CliError::Config("no dataset given (set `dataset` in the config or pass --data)".into()))?;
    if !path.is_file() {
        return Err(CliError::Config(format!("dataset {} does not exist", path.display())));
    }
    let ingested = read_traffic_csv_path(path, IngestOptions { strict: config.strict }).map_err(to_input_error)?;
    Dataset::new(ingested.traces, config.missing).map_err(CliError::Input)
}

fn train_end_for(config: &RunConfig, dataset: &Dataset) -> Result<NaiveDate, CliError> {
    match config.forecast.train_end {
        Some(d) => Ok(d),
        None => {
            let last = dataset.last_day().map_err(CliError::Input)?;
            Ok(default_train_end(last, config.max_la()))
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ClusterOutcome {
    pub window_first: NaiveDate,
    pub window_last: NaiveDate,
    pub k: usize,
    /// `(k, mean silhouette)` for every k tried; empty when k was fixed.
    pub scores: Vec<(usize, f64)>,
    pub mean_silhouette: Option<f64>,
    pub weak_structure: bool,
    pub sizes: Vec<usize>,
    pub traffic_share: Vec<f64>,
    /// Clusters forecast in cluster-aware mode.
    pub forecast_clusters: Vec<usize>,
    pub model: ClusterModel,
}

pub fn fit_clusters(config: &RunConfig, dataset: &Dataset, train_end: NaiveDate) -> Result<ClusterOutcome, CliError> {
    let c = &config.clustering;
    let last = c.window_end.unwrap_or(train_end);
    let first = last - Duration::days(i64::from(c.window_days) - 1);
    let window = TimeWindow::days(first, last).map_err(CliError::Input)?;
    let set = weekly_signatures(&dataset.traces, &window, dataset.policy, c.normalization)
        .map_err(CliError::run("building weekly signatures"))?;
    let seed = mix_seed(config.seed, CLUSTER_SEED_STREAM);
    let (mut model, scores, weak_structure) = match c.k {
        Some(k) => {
            let model = kmeans(&set.signatures, k, seed, c.restarts).map_err(CliError::run("k-means"))?;
            let weak = model.mean_silhouette().is_some_and(|s| s < bhcast_core::clustering::WEAK_STRUCTURE_THRESHOLD);
            (model, Vec::new(), weak)
        }
        None => {
            let sel =
                select_k(&set.signatures, c.k_min..=c.k_max, seed, c.restarts).map_err(CliError::run("choosing k"))?;
            (sel.model, sel.scores, sel.weak_structure)
        }
    };
    model.unclassified = set.unclassifiable;
    let shares = served_traffic_share(&model, &dataset.traces, &window, dataset.policy)
        .map_err(CliError::run("computing traffic shares"))?;
    model.traffic_share = Some(shares.clone());
    let forecast_clusters = ca_clusters(&model, c.exclusion_threshold);
    Ok(ClusterOutcome {
        window_first: first,
        window_last: last,
        k: model.k,
        scores,
        mean_silhouette: model.mean_silhouette(),
        weak_structure,
        sizes: model.sizes(),
        traffic_share: shares,
        forecast_clusters,
        model,
    })
}

fn write_clusters(dir: &Path, outcome: &ClusterOutcome) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let mut csv = String::from("cell_id,cluster\n");
    for (cell, a) in outcome.model.cell_ids.iter().zip(&outcome.model.assignments) {
        csv.push_str(&format!("{cell},{a}\n"));
    }
    for cell in &outcome.model.unclassified {
        csv.push_str(&format!("{cell},\n"));
    }
    write_atomic(&dir.join("clusters.csv"), csv.as_bytes()).map_err(CliError::run("writing clusters.csv"))?;
    let json = serde_json::to_string_pretty(outcome).expect("cluster outcome serializes");
    write_atomic(&dir.join("clusters.json"), json.as_bytes()).map_err(CliError::run("writing clusters.json"))?;
    Ok(())
}

fn write_resolved_config(dir: &Path, config: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    write_atomic(&dir.join("run_config.toml"), config.to_toml().as_bytes())
        .map_err(CliError::run("writing run_config.toml"))
}

pub fn cluster(config: &RunConfig) -> Result<ClusterOutcome, CliError> {
    let dataset = load_dataset(config)?;
    let train_end = train_end_for(config, &dataset)?;
    let outcome = fit_clusters(config, &dataset, train_end)?;
    write_resolved_config(&config.output_dir, config)?;
    write_clusters(&config.output_dir, &outcome)?;
    outln!("window      {} .. {}", outcome.window_first, outcome.window_last);
    outln!("k           {}", outcome.k);
    for (k, s) in &outcome.scores {
        outln!("silhouette  k={k:<2} {s:.4}");
    }
    if outcome.weak_structure {
        outln!("warning     weak cluster structure (mean silhouette below 0.5)");
    }
    for (c, (size, share)) in outcome.sizes.iter().zip(&outcome.traffic_share).enumerate() {
        let note = if outcome.forecast_clusters.contains(&c) { "" } else { "  (excluded)" };
        outln!("cluster {c}   {size} cells, {:.2}% of traffic{note}", 100.0 * share);
    }
    if !outcome.model.unclassified.is_empty() {
        outln!("unclassified {} cells", outcome.model.unclassified.len());
    }
    Ok(outcome)
}

/// Run the configured grid and write its outputs; fails if any cell failed.
pub fn evaluate(config: &RunConfig) -> Result<EvaluationReport, CliError> {
    let dataset = load_dataset(config)?;
    let train_end = train_end_for(config, &dataset)?;
    let clusters = if config.forecast.approaches.contains(&Approach::Ca) {
        Some(fit_clusters(config, &dataset, train_end)?)
    } else {
        None
    };
    let ca = clusters.as_ref().map(|o| (&o.model, o.forecast_clusters.as_slice()));
    let report =
        grid_evaluate(&dataset, ca, &config.grid_spec(Some(train_end))).map_err(CliError::run("evaluating grid"))?;

    write_resolved_config(&config.output_dir, config)?;
    if let Some(o) = &clusters {
        write_clusters(&config.output_dir, o)?;
    }
    report.write_dir(&config.output_dir).map_err(CliError::run("writing report"))?;
    print_rows(&report);
    match report.failed() {
        0 => Ok(report),
        failed => Err(CliError::CellsFailed { failed, total: report.rows.len() }),
    }
}

fn print_rows(report: &EvaluationReport) {
    outln!("train_end {}", report.train_end);
    for r in &report.rows {
        let cell = format!("{:<4} {} TL={} LA={}", r.method.to_string(), r.approach, r.tl, r.la);
        match r.status {
            RowStatus::Ok => outln!(
                "{cell}  MAPE {:>7.3}%  MPE_P {:>8.3}%  n={}",
                r.mape.unwrap_or(f64::NAN),
                r.mpe_peak.unwrap_or(f64::NAN),
                r.n
            ),
            RowStatus::Failed => outln!("{cell}  failed: {}", r.error.as_deref().unwrap_or("")),
        }
    }
}

/// One grid cell with the given coordinates.
pub fn forecast(
    config: &RunConfig,
    method: Method,
    approach: Approach,
    tl: u32,
    la: u32,
) -> Result<EvaluationReport, CliError> {
    let mut single = config.clone();
    single.forecast.methods = vec![method];
    single.forecast.approaches = vec![approach];
    single.forecast.tl = vec![tl];
    single.forecast.la = vec![la];
    single.validate()?;
    evaluate(&single)
}

pub fn synth(config: &RunConfig, out: &Path) -> Result<PathBuf, CliError> {
    let s = &config.synth;
    let mix = s
        .cells
        .iter()
        .filter(|(_, n)| **n > 0)
        .map(|(name, n)| {
            let mut a = builtin_archetype(name).ok_or_else(|| CliError::Config(format!("unknown archetype {name}")))?;
            if let Some(sigma) = s.noise_sigma {
                a = a.with_noise(sigma);
            }
            if let Some(slope) = s.trend_slope {
                a = a.with_trend(slope);
            }
            Ok((a, *n))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let spec = ScenarioSpec { mix, start: s.start, days: s.days, seed: config.seed };
    let scenario = generate_scenario(&spec).map_err(|e| CliError::Config(e.to_string()))?;
    std::fs::create_dir_all(out)?;
    let mut traffic = Vec::new();
    write_traffic_csv(&scenario.traces, &mut traffic).map_err(CliError::run("encoding traffic"))?;
    let data_path = out.join("traffic.csv");
    write_atomic(&data_path, &traffic).map_err(CliError::run("writing traffic.csv"))?;
    let mut labels = Vec::new();
    write_labels_csv(&scenario.labels, &mut labels).map_err(CliError::run("encoding labels"))?;
    write_atomic(&out.join("labels.csv"), &labels).map_err(CliError::run("writing labels.csv"))?;
    outln!(
        "wrote {} cells x {} days ({} rows) to {}",
        spec.cell_count(),
        spec.days,
        spec.cell_count() * spec.days * 24,
        data_path.display()
    );
    Ok(data_path)
}
