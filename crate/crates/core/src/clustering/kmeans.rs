use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::WeeklySignature;
use crate::error::{Error, Result};
use crate::util::rng_for;

pub const KMEANS_MAX_ITER: usize = 300;

/// A fitted partition of cells by weekly signature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub k: usize,
    pub centroids: Vec<Vec<f64>>,
    /// Cell ids in input order; `assignments[i]` is the cluster of `cell_ids[i]`.
    pub cell_ids: Vec<String>,
    pub assignments: Vec<usize>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
    /// Empty when k = 1.
    pub per_cell_silhouette: Vec<f64>,
    pub labels: Vec<Option<String>>,
    pub traffic_share: Option<Vec<f64>>,
    /// Cells left out of clustering (all-zero signatures).
    pub unclassified: Vec<String>,
}

impl ClusterModel {
    pub fn cluster_of(&self, cell_id: &str) -> Option<usize> {
        self.cell_ids.iter().position(|c| c == cell_id).map(|i| self.assignments[i])
    }

    pub fn members(&self, cluster: usize) -> Vec<&str> {
        self.cell_ids.iter().zip(&self.assignments).filter(|(_, &a)| a == cluster).map(|(c, _)| c.as_str()).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }

    pub fn mean_silhouette(&self) -> Option<f64> {
        (!self.per_cell_silhouette.is_empty()).then(|| crate::util::mean(&self.per_cell_silhouette))
    }

    /// A model that puts every cell in one cluster.
    pub fn single_cluster(signatures: &[WeeklySignature]) -> Result<Self> {
        kmeans(signatures, 1, 0, 1)
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn kmeans_pp(data: &[&[f64]], k: usize, seed: u64, restart: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_for(seed, restart);
    let n = data.len();
    let mut centroids = vec![data[rng.gen_range(0..n)].to_vec()];
    let mut d2: Vec<f64> = data.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        centroids.push(data[pick].to_vec());
        for (i, p) in data.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, centroids.last().expect("pushed")));
        }
    }
    centroids
}

struct LloydRun {
    centroids: Vec<Vec<f64>>,
    assignments: Vec<usize>,
    inertia: f64,
    objectives: Vec<f64>,
}

fn lloyd(data: &[&[f64]], mut centroids: Vec<Vec<f64>>) -> LloydRun {
    let k = centroids.len();
    let dim = data[0].len();
    let mut assignments: Vec<usize> = data.iter().map(|p| nearest(p, &centroids).0).collect();
    let mut objectives = Vec::new();
    for iter in 0..KMEANS_MAX_ITER {
        // update step
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &a) in data.iter().zip(&assignments) {
            counts[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(p.iter()) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        // empty clusters take the point farthest from its centroid
        for c in 0..k {
            if counts[c] == 0 {
                let (far, _) = data
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| counts[assignments[*i]] > 1)
                    .map(|(i, p)| (i, sq_dist(p, &centroids[assignments[i]])))
                    .fold((usize::MAX, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
                if far != usize::MAX {
                    counts[assignments[far]] -= 1;
                    assignments[far] = c;
                    counts[c] = 1;
                    centroids[c] = data[far].to_vec();
                }
            }
        }
        objectives.push(objective(data, &centroids, &assignments));

        let next: Vec<usize> = data.iter().map(|p| nearest(p, &centroids).0).collect();
        let changed = next != assignments;
        assignments = next;
        if !changed && iter > 0 {
            break;
        }
    }
    // final centroid update so centroids are the member means of the final assignment
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &a) in data.iter().zip(&assignments) {
        counts[a] += 1;
        for (s, v) in sums[a].iter_mut().zip(p.iter()) {
            *s += v;
        }
    }
    for c in 0..k {
        if counts[c] > 0 {
            centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
        }
    }
    let inertia = objective(data, &centroids, &assignments);
    objectives.push(inertia);
    LloydRun { centroids, assignments, inertia, objectives }
}

fn objective(data: &[&[f64]], centroids: &[Vec<f64>], assignments: &[usize]) -> f64 {
    data.iter().zip(assignments).map(|(p, &a)| sq_dist(p, &centroids[a])).sum()
}

fn check_input(signatures: &[WeeklySignature], k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if k > signatures.len() {
        return Err(Error::invalid(format!("k = {k} exceeds {} signatures", signatures.len())));
    }
    let dim = signatures[0].values.len();
    if signatures.iter().any(|s| s.values.len() != dim) {
        return Err(Error::invalid("signatures differ in length"));
    }
    Ok(())
}

/// Within-cluster objective after each Lloyd iteration of the first restart.
pub fn lloyd_objectives(signatures: &[WeeklySignature], k: usize, seed: u64) -> Result<Vec<f64>> {
    check_input(signatures, k)?;
    let data: Vec<&[f64]> = signatures.iter().map(|s| s.values.as_slice()).collect();
    Ok(lloyd(&data, kmeans_pp(&data, k, seed, 0)).objectives)
}

/// Lloyd's algorithm from the best of `restarts` k-means++ seedings.
pub fn kmeans(signatures: &[WeeklySignature], k: usize, seed: u64, restarts: usize) -> Result<ClusterModel> {
    check_input(signatures, k)?;
    let data: Vec<&[f64]> = signatures.iter().map(|s| s.values.as_slice()).collect();
    let runs: Vec<LloydRun> =
        (0..restarts.max(1) as u64).into_par_iter().map(|r| lloyd(&data, kmeans_pp(&data, k, seed, r))).collect();
    let best = runs
        .into_iter()
        .reduce(|best, run| if run.inertia < best.inertia { run } else { best })
        .expect("at least one restart");

    let mut model = ClusterModel {
        k,
        centroids: best.centroids,
        cell_ids: signatures.iter().map(|s| s.cell_id.clone()).collect(),
        assignments: best.assignments,
        inertia: best.inertia,
        per_cell_silhouette: Vec::new(),
        labels: vec![None; k],
        traffic_share: None,
        unclassified: Vec::new(),
    };
    if k >= 2 {
        model.per_cell_silhouette = super::silhouette(&model, signatures)?.per_cell;
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(id: &str, values: Vec<f64>) -> WeeklySignature {
        WeeklySignature { cell_id: id.into(), values }
    }

    #[test]
    fn two_identical_groups_split_perfectly() {
        let mut sigs = Vec::new();
        for i in 0..5 {
            sigs.push(sig(&format!("a{i}"), vec![0.0, 0.0, 1.0]));
            sigs.push(sig(&format!("b{i}"), vec![5.0, 5.0, 0.0]));
        }
        let m = kmeans(&sigs, 2, 1, 10).unwrap();
        assert_eq!(m.cluster_of("a0"), m.cluster_of("a4"));
        assert_ne!(m.cluster_of("a0"), m.cluster_of("b0"));
        assert!(m.per_cell_silhouette.iter().all(|&s| s == 1.0));
        assert_eq!(m.inertia, 0.0);
    }

    #[test]
    fn single_cluster_centroid_is_mean() {
        let sigs = vec![sig("a", vec![1.0, 2.0]), sig("b", vec![3.0, 6.0]), sig("c", vec![5.0, 1.0])];
        let m = kmeans(&sigs, 1, 9, 3).unwrap();
        assert_eq!(m.assignments, vec![0, 0, 0]);
        assert!((m.centroids[0][0] - 3.0).abs() < 1e-12);
        assert!((m.centroids[0][1] - 3.0).abs() < 1e-12);
        assert!(m.per_cell_silhouette.is_empty());
    }

    #[test]
    fn k_larger_than_input_rejected() {
        let sigs = vec![sig("a", vec![1.0]), sig("b", vec![2.0])];
        assert!(kmeans(&sigs, 3, 0, 1).is_err());
        assert!(kmeans(&sigs, 0, 0, 1).is_err());
    }

    fn scattered(n: usize) -> Vec<WeeklySignature> {
        (0..n)
            .map(|i| {
                let x = i as f64;
                sig(&format!("c{i}"), vec![(x * 0.37).sin(), (x * 1.3).cos(), (x * 0.11).sin() * 2.0])
            })
            .collect()
    }

    #[test]
    fn objective_never_increases() {
        let sigs = scattered(60);
        for seed in 0..5 {
            let obj = lloyd_objectives(&sigs, 4, seed).unwrap();
            for w in obj.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{obj:?}");
            }
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let sigs = scattered(40);
        let a = kmeans(&sigs, 3, 17, 5).unwrap();
        let b = kmeans(&sigs, 3, 17, 5).unwrap();
        assert_eq!(a.assignments, b.assignments);
        assert_eq!(a.centroids, b.centroids);
    }

    #[test]
    fn every_cluster_non_empty() {
        // many duplicates make empty clusters likely during seeding
        let mut sigs: Vec<WeeklySignature> = (0..20).map(|i| sig(&format!("d{i}"), vec![1.0, 1.0])).collect();
        sigs.push(sig("x", vec![2.0, 2.0]));
        sigs.push(sig("y", vec![3.0, 0.0]));
        let m = kmeans(&sigs, 3, 5, 4).unwrap();
        assert!(m.sizes().iter().all(|&s| s >= 1));
    }
}
