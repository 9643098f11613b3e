use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{LstmNetwork, Pair};
use crate::error::{Error, Result};
use crate::util::rng_for;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    pub fn new(n_params: usize, lr: f64) -> Self {
        Self { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8, m: vec![0.0; n_params], v: vec![0.0; n_params], t: 0 }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for k in 0..params.len() {
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * grad[k];
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * grad[k] * grad[k];
            params[k] -= self.lr * (self.m[k] / c1) / ((self.v[k] / c2).sqrt() + self.eps);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    /// Mean training MSE of each epoch, averaged over its mini-batches.
    pub epoch_losses: Vec<f64>,
    pub initial_loss: f64,
    pub final_loss: f64,
    pub wall_clock_secs: f64,
    pub seed: u64,
}

impl LstmNetwork {
    /// Mini-batch Adam for `config.epochs` epochs with seeded shuffling.
    pub fn train(&mut self, pairs: &[Pair]) -> Result<TrainingReport> {
        if pairs.is_empty() {
            return Err(Error::invalid("training needs at least one pair"));
        }
        let started = Instant::now();
        let cfg = self.config;
        let mut rng = rng_for(cfg.seed, 1);
        let mut adam = Adam::new(self.params.len(), cfg.learning_rate);
        let initial_loss = self.loss(pairs)?;
        let mut order: Vec<usize> = (0..pairs.len()).collect();
        let mut epoch_losses = Vec::with_capacity(cfg.epochs);
        for epoch in 0..cfg.epochs {
            order.shuffle(&mut rng);
            let mut total = 0.0;
            for idx in order.chunks(cfg.batch_size) {
                let batch: Vec<Pair> = idx.iter().map(|&i| pairs[i].clone()).collect();
                let (loss, grad) = self
                    .gradients(&batch)
                    .map_err(|e| Error::NonFinite(format!("training diverged in epoch {epoch}: {e}")))?;
                adam.step(&mut self.params, &grad);
                if !self.is_finite() {
                    return Err(Error::NonFinite(format!("parameters became non-finite in epoch {epoch}")));
                }
                total += loss * batch.len() as f64;
            }
            epoch_losses.push(total / pairs.len() as f64);
        }
        let final_loss = self.loss(pairs)?;
        Ok(TrainingReport {
            epoch_losses,
            initial_loss,
            final_loss,
            wall_clock_secs: started.elapsed().as_secs_f64(),
            seed: cfg.seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adam_first_step_moves_by_lr() {
        let mut adam = Adam::new(2, 0.1);
        let mut p = vec![1.0, -1.0];
        adam.step(&mut p, &[3.0, -0.5]);
        assert!((p[0] - 0.9).abs() < 1e-6);
        assert!((p[1] + 0.9).abs() < 1e-6);
    }
}
