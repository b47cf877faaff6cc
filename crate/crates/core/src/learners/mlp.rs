//! One-hidden-layer perceptron for binary targets: tanh hidden units, a
//! sigmoid output and mean binary cross-entropy, trained by mini-batch SGD
//! on standardised inputs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpParams {
    pub hidden_units: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams { hidden_units: 64, learning_rate: 0.1, epochs: 200, batch_size: 32, seed: 0 }
    }
}

impl MlpParams {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_units == 0 || self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::param("mlp hidden_units, epochs and batch_size must be positive"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::param("mlp learning_rate must be positive"));
        }
        Ok(())
    }
}

/// Network parameters. `w1` is `hidden x inputs`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpWeights {
    pub inputs: usize,
    pub hidden: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl MlpWeights {
    /// Xavier-uniform weights, zero biases.
    pub fn init(inputs: usize, hidden: usize, rng: &mut impl Rng) -> Self {
        let l1 = (6.0 / (inputs + hidden) as f64).sqrt();
        let l2 = (6.0 / (hidden + 1) as f64).sqrt();
        let w1 = (0..inputs * hidden).map(|_| rng.random_range(-l1..=l1)).collect();
        let w2 = (0..hidden).map(|_| rng.random_range(-l2..=l2)).collect();
        MlpWeights { inputs, hidden, w1, b1: vec![0.0; hidden], w2, b2: 0.0 }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.w1.len() + 2 * self.hidden + 1);
        v.extend(&self.w1);
        v.extend(&self.b1);
        v.extend(&self.w2);
        v.push(self.b2);
        v
    }

    pub fn from_flat(inputs: usize, hidden: usize, flat: &[f64]) -> Self {
        let (w1, rest) = flat.split_at(inputs * hidden);
        let (b1, rest) = rest.split_at(hidden);
        let (w2, rest) = rest.split_at(hidden);
        MlpWeights {
            inputs,
            hidden,
            w1: w1.to_vec(),
            b1: b1.to_vec(),
            w2: w2.to_vec(),
            b2: rest[0],
        }
    }

    /// `self -= lr * grad`, with `grad` in flat layout.
    pub fn step(&mut self, grad: &[f64], lr: f64) {
        let params = self
            .w1
            .iter_mut()
            .chain(self.b1.iter_mut())
            .chain(self.w2.iter_mut())
            .chain(std::iter::once(&mut self.b2));
        for (p, g) in params.zip(grad) {
            *p -= lr * g;
        }
    }

    fn hidden_activations(&self, x: &[f64], out: &mut [f64]) {
        for (h, o) in out.iter_mut().enumerate() {
            let row = &self.w1[h * self.inputs..(h + 1) * self.inputs];
            let z: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.b1[h];
            *o = z.tanh();
        }
    }

    /// Output logit for an (already standardised) input.
    pub fn logit(&self, x: &[f64]) -> f64 {
        let mut a = vec![0.0; self.hidden];
        self.hidden_activations(x, &mut a);
        a.iter().zip(&self.w2).map(|(a, w)| a * w).sum::<f64>() + self.b2
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Binary cross-entropy of a logit against a 0/1 target, computed stably.
fn bce_from_logit(z: f64, y: f64) -> f64 {
    z.max(0.0) - z * y + (-z.abs()).exp().ln_1p()
}

/// Mean cross-entropy over `rows` and its gradient, flattened like
/// [`MlpWeights::to_flat`].
pub fn loss_and_gradient(w: &MlpWeights, x: &Matrix, y: &[f64], rows: &[usize]) -> (f64, Vec<f64>) {
    let (d, h) = (w.inputs, w.hidden);
    let mut grad = vec![0.0; d * h + 2 * h + 1];
    let mut loss = 0.0;
    let mut a = vec![0.0; h];
    for &i in rows {
        let xi = x.row(i);
        w.hidden_activations(xi, &mut a);
        let z = a.iter().zip(&w.w2).map(|(a, w)| a * w).sum::<f64>() + w.b2;
        loss += bce_from_logit(z, y[i]);
        let dz = sigmoid(z) - y[i];
        let (gw1, rest) = grad.split_at_mut(d * h);
        let (gb1, rest) = rest.split_at_mut(h);
        let (gw2, gb2) = rest.split_at_mut(h);
        gb2[0] += dz;
        for k in 0..h {
            gw2[k] += dz * a[k];
            let dh = dz * w.w2[k] * (1.0 - a[k] * a[k]);
            gb1[k] += dh;
            for (g, v) in gw1[k * d..(k + 1) * d].iter_mut().zip(xi) {
                *g += dh * v;
            }
        }
    }
    let n = rows.len() as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    (loss / n, grad)
}

/// Per-feature mean and scale (standard deviation, or 1 for constant columns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &Matrix) -> Self {
        let (m, d) = x.shape();
        let mut mean = vec![0.0; d];
        for r in x.iter_rows() {
            for (a, v) in mean.iter_mut().zip(r) {
                *a += v;
            }
        }
        mean.iter_mut().for_each(|a| *a /= m as f64);
        let mut var = vec![0.0; d];
        for r in x.iter_rows() {
            for ((s, v), mu) in var.iter_mut().zip(r).zip(&mean) {
                *s += (v - mu) * (v - mu);
            }
        }
        let scale = var
            .into_iter()
            .map(|s| {
                let sd = (s / m as f64).sqrt();
                if sd > 0.0 { sd } else { 1.0 }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn apply_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn apply(&self, x: &Matrix) -> Matrix {
        let mut out = Vec::with_capacity(x.rows() * x.cols());
        for r in x.iter_rows() {
            out.extend(self.apply_row(r));
        }
        Matrix::from_vec(x.rows(), x.cols(), out).expect("same shape")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub standardizer: Standardizer,
    pub weights: MlpWeights,
    /// Mean training loss after each epoch.
    pub loss_history: Vec<f64>,
}

impl MlpModel {
    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        sigmoid(self.weights.logit(&self.standardizer.apply_row(row)))
    }
}

/// Trains on rows of `x` with 0/1 targets `y`. `seed` fixes the
/// initialisation and the per-epoch shuffles.
pub fn mlp_binary_train(x: &Matrix, y: &[bool], params: &MlpParams, seed: u64) -> Result<MlpModel> {
    params.validate()?;
    if !x.is_finite() {
        return Err(Error::Numeric("non-finite feature value in MLP training data".into()));
    }
    let standardizer = Standardizer::fit(x);
    let xs = standardizer.apply(x);
    let targets: Vec<f64> = y.iter().map(|&b| f64::from(u8::from(b))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = MlpWeights::init(x.cols(), params.hidden_units, &mut rng);
    let mut order: Vec<usize> = (0..x.rows()).collect();
    let mut loss_history = Vec::with_capacity(params.epochs);
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(params.batch_size) {
            let (loss, grad) = loss_and_gradient(&w, &xs, &targets, batch);
            epoch_loss += loss * batch.len() as f64;
            w.step(&grad, params.learning_rate);
        }
        let epoch_loss = epoch_loss / x.rows() as f64;
        if !epoch_loss.is_finite() {
            return Err(Error::Numeric("MLP training loss diverged".into()));
        }
        loss_history.push(epoch_loss);
    }
    Ok(MlpModel { standardizer, weights: w, loss_history })
}
