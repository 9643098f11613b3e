//! Encoder-decoder LSTM with per-step fully connected heads.

mod forecaster;
mod train;

pub use forecaster::{LstmForecaster, Scaler};
pub use train::{Adam, TrainingReport};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::rng_for;

/// Samples per gradient chunk; chunks are summed in a fixed order.
const GRAD_CHUNK: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    #[default]
    Paper,
    Test,
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Profile::Paper),
            "test" => Ok(Profile::Test),
            other => Err(Error::invalid(format!("unknown profile {other:?} (expected paper or test)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LstmConfig {
    pub encoder_cells: usize,
    pub decoder_cells: usize,
    pub fc_branches: usize,
    pub fc_width: usize,
    pub input_len: usize,
    pub output_len: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl LstmConfig {
    pub fn preset(profile: Profile) -> Self {
        match profile {
            Profile::Paper => Self {
                encoder_cells: 200,
                decoder_cells: 200,
                fc_branches: 7,
                fc_width: 100,
                input_len: 14,
                output_len: 7,
                learning_rate: 1e-3,
                epochs: 200,
                batch_size: 32,
                seed: 0,
            },
            Profile::Test => Self {
                encoder_cells: 8,
                decoder_cells: 8,
                fc_branches: 7,
                fc_width: 4,
                input_len: 14,
                output_len: 7,
                learning_rate: 1e-3,
                epochs: 300,
                batch_size: 32,
                seed: 0,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.encoder_cells == 0 || self.fc_width == 0 {
            return Err(Error::invalid("layer sizes must be positive"));
        }
        if self.decoder_cells != self.encoder_cells {
            return Err(Error::invalid("decoder must have as many cells as the encoder"));
        }
        if self.output_len != self.fc_branches {
            return Err(Error::invalid("output_len must equal fc_branches"));
        }
        if self.input_len == 0 || self.output_len == 0 {
            return Err(Error::invalid("input_len and output_len must be positive"));
        }
        if self.batch_size == 0 || self.epochs == 0 {
            return Err(Error::invalid("batch_size and epochs must be positive"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning_rate must be positive"));
        }
        Ok(())
    }

    pub fn param_count(&self) -> usize {
        Layout::new(self).total
    }
}

/// A supervised window: `input_len` samples followed by `output_len` targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pair {
    pub input: Vec<f64>,
    pub target: Vec<f64>,
}

/// Stride-1 sliding windows.
pub fn make_windows(series: &[f64], input_len: usize, output_len: usize) -> Result<Vec<Pair>> {
    let span = input_len + output_len;
    if input_len == 0 || output_len == 0 {
        return Err(Error::invalid("window lengths must be positive"));
    }
    if series.len() < span {
        return Err(Error::InsufficientData { needed: span, got: series.len() });
    }
    Ok(series.windows(span).map(|w| Pair { input: w[..input_len].to_vec(), target: w[input_len..].to_vec() }).collect())
}

#[derive(Debug, Clone, Copy)]
struct FcOffsets {
    w1: usize,
    b1: usize,
    w2: usize,
    b2: usize,
}

/// Offsets of each block inside the flat parameter vector.
#[derive(Debug, Clone)]
struct Layout {
    n: usize,
    m: usize,
    enc_wx: usize,
    enc_wh: usize,
    enc_b: usize,
    dec_wh: usize,
    dec_b: usize,
    fc: Vec<FcOffsets>,
    total: usize,
}

impl Layout {
    fn new(cfg: &LstmConfig) -> Self {
        let n = cfg.encoder_cells;
        let m = cfg.fc_width;
        let mut at = 0;
        let mut take = |len: usize| {
            let o = at;
            at += len;
            o
        };
        let enc_wx = take(4 * n);
        let enc_wh = take(4 * n * n);
        let enc_b = take(4 * n);
        let dec_wh = take(4 * n * n);
        let dec_b = take(4 * n);
        let fc = (0..cfg.fc_branches)
            .map(|_| FcOffsets { w1: take(m * n), b1: take(m), w2: take(m), b2: take(1) })
            .collect();
        Layout { n, m, enc_wx, enc_wh, enc_b, dec_wh, dec_b, fc, total: at }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmNetwork {
    pub config: LstmConfig,
    pub params: Vec<f64>,
}

struct Step {
    x: f64,
    h_prev: Vec<f64>,
    c_prev: Vec<f64>,
    i: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    o: Vec<f64>,
    tanh_c: Vec<f64>,
    h: Vec<f64>,
    c: Vec<f64>,
}

struct Trace {
    enc: Vec<Step>,
    dec: Vec<Step>,
    fc_pre: Vec<Vec<f64>>,
    outputs: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl LstmNetwork {
    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases, forget bias 1.
    pub fn new(config: LstmConfig) -> Result<Self> {
        config.validate()?;
        let lay = Layout::new(&config);
        let mut params = vec![0.0; lay.total];
        let mut rng = rng_for(config.seed, 0);
        let (n, m) = (lay.n, lay.m);
        let mut fill = |range: std::ops::Range<usize>, fan_in: usize| {
            let a = 1.0 / (fan_in as f64).sqrt();
            for p in &mut params[range] {
                *p = rng.gen_range(-a..=a);
            }
        };
        fill(lay.enc_wx..lay.enc_wx + 4 * n, 1);
        fill(lay.enc_wh..lay.enc_wh + 4 * n * n, n);
        fill(lay.dec_wh..lay.dec_wh + 4 * n * n, n);
        for fc in &lay.fc {
            fill(fc.w1..fc.w1 + m * n, n);
            fill(fc.w2..fc.w2 + m, m);
        }
        for b in [lay.enc_b, lay.dec_b] {
            params[b + n..b + 2 * n].fill(1.0);
        }
        Ok(Self { config, params })
    }

    pub fn zeroed(config: LstmConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { params: vec![0.0; config.param_count()], config })
    }

    fn layout(&self) -> Layout {
        Layout::new(&self.config)
    }

    fn step(&self, wx: Option<usize>, wh: usize, b: usize, x: f64, h_prev: &[f64], c_prev: &[f64]) -> Step {
        let n = h_prev.len();
        let p = &self.params;
        let mut z = p[b..b + 4 * n].to_vec();
        for (r, zr) in z.iter_mut().enumerate() {
            if let Some(wx) = wx {
                *zr += p[wx + r] * x;
            }
            let row = &p[wh + r * n..wh + (r + 1) * n];
            *zr += row.iter().zip(h_prev).map(|(w, h)| w * h).sum::<f64>();
        }
        let i: Vec<f64> = z[..n].iter().map(|&v| sigmoid(v)).collect();
        let f: Vec<f64> = z[n..2 * n].iter().map(|&v| sigmoid(v)).collect();
        let g: Vec<f64> = z[2 * n..3 * n].iter().map(|v| v.tanh()).collect();
        let o: Vec<f64> = z[3 * n..].iter().map(|&v| sigmoid(v)).collect();
        let c: Vec<f64> = (0..n).map(|j| f[j] * c_prev[j] + i[j] * g[j]).collect();
        let tanh_c: Vec<f64> = c.iter().map(|v| v.tanh()).collect();
        let h: Vec<f64> = (0..n).map(|j| o[j] * tanh_c[j]).collect();
        Step { x, h_prev: h_prev.to_vec(), c_prev: c_prev.to_vec(), i, f, g, o, tanh_c, h, c }
    }

    fn run(&self, window: &[f64]) -> Result<Trace> {
        if window.len() != self.config.input_len {
            return Err(Error::invalid(format!(
                "window has {} samples, expected {}",
                window.len(),
                self.config.input_len
            )));
        }
        let lay = self.layout();
        let n = lay.n;
        let mut h = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut enc = Vec::with_capacity(window.len());
        for &x in window {
            let s = self.step(Some(lay.enc_wx), lay.enc_wh, lay.enc_b, x, &h, &c);
            h.clone_from(&s.h);
            c.clone_from(&s.c);
            enc.push(s);
        }
        let mut dec = Vec::with_capacity(self.config.output_len);
        let mut fc_pre = Vec::with_capacity(self.config.output_len);
        let mut outputs = Vec::with_capacity(self.config.output_len);
        let p = &self.params;
        for fc in &lay.fc {
            let s = self.step(None, lay.dec_wh, lay.dec_b, 0.0, &h, &c);
            let a: Vec<f64> = (0..lay.m)
                .map(|r| {
                    p[fc.b1 + r]
                        + p[fc.w1 + r * n..fc.w1 + (r + 1) * n].iter().zip(&s.h).map(|(w, v)| w * v).sum::<f64>()
                })
                .collect();
            let y = p[fc.b2] + a.iter().enumerate().map(|(r, v)| p[fc.w2 + r] * v.max(0.0)).sum::<f64>();
            h.clone_from(&s.h);
            c.clone_from(&s.c);
            dec.push(s);
            fc_pre.push(a);
            outputs.push(y);
        }
        Ok(Trace { enc, dec, fc_pre, outputs })
    }

    pub fn forward(&self, window: &[f64]) -> Result<Vec<f64>> {
        Ok(self.run(window)?.outputs)
    }

    /// Backpropagate one step; returns `(dh_prev, dc_prev)`.
    fn step_backward(
        &self,
        s: &Step,
        wx: Option<usize>,
        wh: usize,
        b: usize,
        dh: &[f64],
        dc_next: &[f64],
        grad: &mut [f64],
    ) -> (Vec<f64>, Vec<f64>) {
        let n = dh.len();
        let mut dz = vec![0.0; 4 * n];
        let mut dc_prev = vec![0.0; n];
        for j in 0..n {
            let dc = dc_next[j] + dh[j] * s.o[j] * (1.0 - s.tanh_c[j] * s.tanh_c[j]);
            dz[j] = dc * s.g[j] * s.i[j] * (1.0 - s.i[j]);
            dz[n + j] = dc * s.c_prev[j] * s.f[j] * (1.0 - s.f[j]);
            dz[2 * n + j] = dc * s.i[j] * (1.0 - s.g[j] * s.g[j]);
            dz[3 * n + j] = dh[j] * s.tanh_c[j] * s.o[j] * (1.0 - s.o[j]);
            dc_prev[j] = dc * s.f[j];
        }
        let mut dh_prev = vec![0.0; n];
        for (r, &d) in dz.iter().enumerate() {
            grad[b + r] += d;
            if let Some(wx) = wx {
                grad[wx + r] += d * s.x;
            }
            let row = wh + r * n;
            for j in 0..n {
                grad[row + j] += d * s.h_prev[j];
                dh_prev[j] += self.params[row + j] * d;
            }
        }
        (dh_prev, dc_prev)
    }

    /// Add `scale * d(loss)/d(params)` for one pair into `grad`; returns the
    /// pair's mean squared error.
    fn accumulate(&self, pair: &Pair, scale: f64, grad: &mut [f64]) -> Result<f64> {
        if pair.target.len() != self.config.output_len {
            return Err(Error::invalid("target length does not match output_len"));
        }
        let lay = self.layout();
        let (n, m) = (lay.n, lay.m);
        let tr = self.run(&pair.input)?;
        let steps = self.config.output_len as f64;
        let mut loss = 0.0;
        let mut dh_fc = vec![vec![0.0; n]; tr.dec.len()];
        for (s, fc) in lay.fc.iter().enumerate() {
            let err = tr.outputs[s] - pair.target[s];
            loss += err * err / steps;
            let dy = scale * 2.0 * err / steps;
            grad[fc.b2] += dy;
            let h = &tr.dec[s].h;
            for r in 0..m {
                let a = tr.fc_pre[s][r];
                grad[fc.w2 + r] += dy * a.max(0.0);
                if a > 0.0 {
                    let da = dy * self.params[fc.w2 + r];
                    grad[fc.b1 + r] += da;
                    let row = fc.w1 + r * n;
                    for j in 0..n {
                        grad[row + j] += da * h[j];
                        dh_fc[s][j] += da * self.params[row + j];
                    }
                }
            }
        }
        let mut dh = vec![0.0; n];
        let mut dc = vec![0.0; n];
        for s in (0..tr.dec.len()).rev() {
            let total: Vec<f64> = dh.iter().zip(&dh_fc[s]).map(|(a, b)| a + b).collect();
            (dh, dc) = self.step_backward(&tr.dec[s], None, lay.dec_wh, lay.dec_b, &total, &dc, grad);
        }
        for s in tr.enc.iter().rev() {
            (dh, dc) = self.step_backward(s, Some(lay.enc_wx), lay.enc_wh, lay.enc_b, &dh, &dc, grad);
        }
        Ok(loss)
    }

    /// Mean loss over `batch` and its exact gradient.
    pub fn gradients(&self, batch: &[Pair]) -> Result<(f64, Vec<f64>)> {
        if batch.is_empty() {
            return Err(Error::invalid("empty batch"));
        }
        let scale = 1.0 / batch.len() as f64;
        let parts = batch
            .par_chunks(GRAD_CHUNK)
            .map(|chunk| {
                let mut g = vec![0.0; self.params.len()];
                let mut loss = 0.0;
                for pair in chunk {
                    loss += self.accumulate(pair, scale, &mut g)?;
                }
                Ok((loss, g))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut grad = vec![0.0; self.params.len()];
        let mut loss = 0.0;
        for (l, g) in parts {
            loss += l;
            for (a, b) in grad.iter_mut().zip(&g) {
                *a += b;
            }
        }
        loss *= scale;
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite(format!("gradient (batch loss {loss})")));
        }
        Ok((loss, grad))
    }

    /// Mean loss over `pairs`.
    pub fn loss(&self, pairs: &[Pair]) -> Result<f64> {
        if pairs.is_empty() {
            return Err(Error::invalid("no pairs"));
        }
        let mut total = 0.0;
        for p in pairs {
            let out = self.forward(&p.input)?;
            total += out.iter().zip(&p.target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / out.len() as f64;
        }
        Ok(total / pairs.len() as f64)
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }
}
