//! Median daily/weekly signatures and k-means grouping of cells.

mod kmeans;
mod silhouette;

pub use kmeans::{kmeans, lloyd_objectives, ClusterModel, KMEANS_MAX_ITER};
pub use silhouette::{
    adjusted_rand_index, select_k, silhouette, KSelection, SilhouetteScores, WEAK_STRUCTURE_THRESHOLD,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{midnight, DayClass, HourlyTrace, MissingPolicy, TimeWindow};

pub const HOURS_PER_WEEK: usize = 168;

/// Clusters carrying less than this share of traffic are treated as noise.
pub const DEFAULT_EXCLUSION_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailySignature {
    pub day_class: DayClass,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeeklySignature {
    pub cell_id: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Divide by the maximum so the peak is 1.
    #[default]
    Max,
    UnitL2,
}

/// Hourly medians per day class over the complete UTC days in `window`.
///
/// Returns signatures in `DayClass::ALL` order.
pub fn median_daily_signatures(
    trace: &HourlyTrace,
    window: &TimeWindow,
    policy: MissingPolicy,
) -> Result<[DailySignature; 3]> {
    let values = trace.window_values(window, policy)?;
    let mut by_class: [Vec<&[f64]>; 3] = Default::default();
    let first_day = window.start.date_naive();
    let skip = (window.start - midnight(first_day)).num_hours() as usize;
    let skip = if skip == 0 { 0 } else { 24 - skip };
    let mut offset = skip;
    while offset + 24 <= values.len() {
        let date = (window.start + chrono::Duration::hours(offset as i64)).date_naive();
        let idx = DayClass::ALL.iter().position(|&c| c == DayClass::of(date)).expect("class");
        by_class[idx].push(&values[offset..offset + 24]);
        offset += 24;
    }
    let mut out = Vec::with_capacity(3);
    for (class, days) in DayClass::ALL.into_iter().zip(by_class) {
        if days.is_empty() {
            return Err(Error::invalid(format!("window lacks a complete {class:?} for cell {}", trace.cell_id())));
        }
        let values = (0..24).map(|h| crate::util::median(&days.iter().map(|d| d[h]).collect::<Vec<_>>())).collect();
        out.push(DailySignature { day_class: class, values });
    }
    Ok(out.try_into().expect("three classes"))
}

/// Five workday copies followed by Saturday and Sunday.
pub fn build_mws(
    cell_id: impl Into<String>,
    workday: &DailySignature,
    saturday: &DailySignature,
    sunday: &DailySignature,
) -> Result<WeeklySignature> {
    for (sig, class) in [(workday, DayClass::Workday), (saturday, DayClass::Saturday), (sunday, DayClass::Sunday)] {
        if sig.values.len() != 24 || sig.day_class != class {
            return Err(Error::invalid(format!("expected a 24-hour {class:?} signature")));
        }
    }
    let mut values = Vec::with_capacity(HOURS_PER_WEEK);
    for _ in 0..5 {
        values.extend_from_slice(&workday.values);
    }
    values.extend_from_slice(&saturday.values);
    values.extend_from_slice(&sunday.values);
    Ok(WeeklySignature { cell_id: cell_id.into(), values })
}

pub fn normalize_mws(sig: &WeeklySignature, method: Normalization) -> Result<WeeklySignature> {
    let scale = match method {
        Normalization::Max => sig.values.iter().copied().fold(0.0, f64::max),
        Normalization::UnitL2 => sig.values.iter().map(|v| v * v).sum::<f64>().sqrt(),
    };
    if !(scale > 0.0) {
        return Err(Error::invalid(format!("cell {} has an all-zero signature", sig.cell_id)));
    }
    Ok(WeeklySignature { cell_id: sig.cell_id.clone(), values: sig.values.iter().map(|v| v / scale).collect() })
}

/// Normalized signatures for clusterable cells plus the ids of cells whose
/// signature is identically zero.
#[derive(Debug, Clone)]
pub struct SignatureSet {
    pub signatures: Vec<WeeklySignature>,
    pub unclassifiable: Vec<String>,
}

pub fn weekly_signatures(
    traces: &[HourlyTrace],
    window: &TimeWindow,
    policy: MissingPolicy,
    method: Normalization,
) -> Result<SignatureSet> {
    let raw = traces
        .par_iter()
        .map(|t| {
            let [w, sa, su] = median_daily_signatures(t, window, policy)?;
            build_mws(t.cell_id(), &w, &sa, &su)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut signatures = Vec::with_capacity(raw.len());
    let mut unclassifiable = Vec::new();
    for sig in raw {
        match normalize_mws(&sig, method) {
            Ok(n) => signatures.push(n),
            Err(_) => unclassifiable.push(sig.cell_id),
        }
    }
    Ok(SignatureSet { signatures, unclassifiable })
}

/// Fraction of the window's total volume served by each cluster.
pub fn served_traffic_share(
    model: &ClusterModel,
    traces: &[HourlyTrace],
    window: &TimeWindow,
    policy: MissingPolicy,
) -> Result<Vec<f64>> {
    let mut volume = vec![0.0; model.k];
    for trace in traces {
        let Some(c) = model.cluster_of(trace.cell_id()) else { continue };
        volume[c] += trace.window_values(window, policy)?.iter().sum::<f64>();
    }
    for cell in &model.cell_ids {
        if !traces.iter().any(|t| t.cell_id() == cell) {
            return Err(Error::invalid(format!("no trace for clustered cell {cell}")));
        }
    }
    let total: f64 = volume.iter().sum();
    if !(total > 0.0) {
        return Err(Error::invalid("network volume is zero"));
    }
    Ok(volume.iter().map(|v| v / total).collect())
}

/// Cluster indices whose traffic share reaches `threshold`.
pub fn forecastable_clusters(shares: &[f64], threshold: f64) -> Vec<usize> {
    (0..shares.len()).filter(|&c| shares[c] >= threshold).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn day(class: DayClass, values: Vec<f64>) -> DailySignature {
        DailySignature { day_class: class, values }
    }

    #[test]
    fn identical_days_reproduce_profile() {
        let start = NaiveDate::from_ymd_opt(2020, 1, 6).unwrap();
        let profile: Vec<f64> = (0..24).map(|h| (h * h) as f64).collect();
        let vals: Vec<f64> = (0..14).flat_map(|_| profile.clone()).collect();
        let t = HourlyTrace::from_values("c", midnight(start), vals).unwrap();
        let w = TimeWindow::days(start, start + chrono::Duration::days(13)).unwrap();
        let sigs = median_daily_signatures(&t, &w, MissingPolicy::Reject).unwrap();
        for s in &sigs {
            assert_eq!(s.values, profile);
        }
    }

    #[test]
    fn median_resists_outlier() {
        // Wed..Sun: three workdays with hour-9 values 1, 2, 100
        let start = NaiveDate::from_ymd_opt(2020, 1, 8).unwrap();
        let mut vals = vec![0.0; 5 * 24];
        vals[9] = 1.0;
        vals[24 + 9] = 100.0;
        vals[48 + 9] = 2.0;
        let t = HourlyTrace::from_values("c", midnight(start), vals).unwrap();
        let w = TimeWindow::days(start, start + chrono::Duration::days(4)).unwrap();
        let [work, sat, sun] = median_daily_signatures(&t, &w, MissingPolicy::Reject).unwrap();
        assert_eq!(work.values[9], 2.0);
        assert_eq!(sat.day_class, DayClass::Saturday);
        assert_eq!(sun.values[9], 0.0);

        let no_weekend = TimeWindow::days(start, start + chrono::Duration::days(2)).unwrap();
        assert!(median_daily_signatures(&t, &no_weekend, MissingPolicy::Reject).is_err());
    }

    #[test]
    fn mws_layout() {
        let ramp: Vec<f64> = (1..=24).map(f64::from).collect();
        let w = day(DayClass::Workday, ramp.clone());
        let sa = day(DayClass::Saturday, ramp.iter().map(|v| 2.0 * v).collect());
        let su = day(DayClass::Sunday, ramp.iter().map(|v| 3.0 * v).collect());
        let m = build_mws("c", &w, &sa, &su).unwrap();
        assert_eq!(m.values.len(), 168);
        assert_eq!(m.values[0], m.values[24]);
        assert_eq!(m.values[120], 2.0 * m.values[0]);
        for h in 0..24 {
            for j in 1..5 {
                assert_eq!(m.values[h], m.values[h + 24 * j]);
            }
        }
        let ones = build_mws(
            "c",
            &day(DayClass::Workday, vec![1.0; 24]),
            &day(DayClass::Saturday, vec![1.0; 24]),
            &day(DayClass::Sunday, vec![1.0; 24]),
        )
        .unwrap();
        assert!(ones.values.iter().all(|&v| v == 1.0));
        assert!(build_mws("c", &sa, &w, &su).is_err());
    }

    #[test]
    fn normalization_scales_peak_to_one() {
        let mut values = vec![2.0; 168];
        values[30] = 10.0;
        let sig = WeeklySignature { cell_id: "c".into(), values };
        let n = normalize_mws(&sig, Normalization::Max).unwrap();
        assert_eq!(n.values[30], 1.0);
        assert_eq!(n.values[0], 0.2);
        assert_eq!(normalize_mws(&n, Normalization::Max).unwrap(), n);
        let five = WeeklySignature { cell_id: "c".into(), values: sig.values.iter().map(|v| v * 5.0).collect() };
        let n5 = normalize_mws(&five, Normalization::Max).unwrap();
        for (a, b) in n.values.iter().zip(&n5.values) {
            assert!((a - b).abs() <= 1e-12);
        }
        let l2 = normalize_mws(&sig, Normalization::UnitL2).unwrap();
        assert!((l2.values.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
        let zero = WeeklySignature { cell_id: "z".into(), values: vec![0.0; 168] };
        assert!(normalize_mws(&zero, Normalization::Max).is_err());
    }
}
