use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::{kmeans, ClusterModel, WeeklySignature};
use crate::error::{Error, Result};

/// Mean silhouette below this is reported as weak structure.
pub const WEAK_STRUCTURE_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SilhouetteScores {
    pub per_cell: Vec<f64>,
    pub mean: f64,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Euclidean silhouette per cell. Cells alone in their cluster score 0, as do
/// cells with `a = b = 0`.
pub fn silhouette(model: &ClusterModel, signatures: &[WeeklySignature]) -> Result<SilhouetteScores> {
    if model.k < 2 {
        return Err(Error::invalid("silhouette is undefined for k = 1"));
    }
    if signatures.len() != model.assignments.len() {
        return Err(Error::invalid("signature count does not match the model"));
    }
    let sizes = model.sizes();
    if sizes.contains(&0) {
        return Err(Error::invalid("model has an empty cluster"));
    }
    let n = signatures.len();
    let per_cell: Vec<f64> = (0..n)
        .map(|i| {
            let own = model.assignments[i];
            if sizes[own] == 1 {
                return 0.0;
            }
            let mut sums = vec![0.0; model.k];
            for j in 0..n {
                if i != j {
                    sums[model.assignments[j]] += dist(&signatures[i].values, &signatures[j].values);
                }
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..model.k).filter(|&c| c != own).map(|c| sums[c] / sizes[c] as f64).fold(f64::INFINITY, f64::min);
            let denom = a.max(b);
            if denom > 0.0 {
                ((b - a) / denom).clamp(-1.0, 1.0)
            } else {
                0.0
            }
        })
        .collect();
    let mean = crate::util::mean(&per_cell);
    Ok(SilhouetteScores { per_cell, mean })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KSelection {
    pub best_k: usize,
    /// `(k, mean silhouette)` for every k tried.
    pub scores: Vec<(usize, f64)>,
    pub weak_structure: bool,
    pub model: ClusterModel,
}

/// Fit k-means for each k in `k_range` and keep the one with the highest mean
/// silhouette; the smaller k wins ties.
pub fn select_k(
    signatures: &[WeeklySignature],
    k_range: std::ops::RangeInclusive<usize>,
    seed: u64,
    restarts: usize,
) -> Result<KSelection> {
    if signatures.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: signatures.len() });
    }
    let lo = (*k_range.start()).max(2);
    let hi = (*k_range.end()).min(signatures.len() - 1);
    if lo > hi {
        return Err(Error::invalid("empty k grid"));
    }
    let mut scores = Vec::new();
    let mut best: Option<(f64, ClusterModel)> = None;
    for k in lo..=hi {
        let model = kmeans(signatures, k, seed, restarts)?;
        let mean = model.mean_silhouette().expect("k >= 2");
        scores.push((k, mean));
        if best.as_ref().is_none_or(|(b, _)| mean > *b) {
            best = Some((mean, model));
        }
    }
    let (mean, model) = best.expect("non-empty grid");
    Ok(KSelection { best_k: model.k, scores, weak_structure: mean < WEAK_STRUCTURE_THRESHOLD, model })
}

/// Adjusted Rand index between two labelings of the same items.
pub fn adjusted_rand_index<A: Eq + Hash, B: Eq + Hash>(a: &[A], b: &[B]) -> f64 {
    assert_eq!(a.len(), b.len(), "labelings differ in length");
    let n = a.len();
    let comb2 = |x: usize| (x * x.saturating_sub(1)) as f64 / 2.0;
    let mut table: HashMap<(&A, &B), usize> = HashMap::new();
    let mut rows: HashMap<&A, usize> = HashMap::new();
    let mut cols: HashMap<&B, usize> = HashMap::new();
    for (x, y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = table.values().map(|&c| comb2(c)).sum();
    let sum_a: f64 = rows.values().map(|&c| comb2(c)).sum();
    let sum_b: f64 = cols.values().map(|&c| comb2(c)).sum();
    let expected = sum_a * sum_b / comb2(n);
    let max = 0.5 * (sum_a + sum_b);
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}
