//! Feed-forward sigmoid network trained by full-batch gradient descent with
//! momentum on the half mean squared error.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{column_moments, Samples};
use crate::error::{Error, Result};
use crate::rng::seeded;

/// Loss increases smaller than this are treated as rounding noise.
const INCREASE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    /// Hidden layer widths; `None` is one layer of `⌈(p + 2) / 2⌉` units.
    pub hidden_layers: Option<Vec<usize>>,
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden_layers: None,
            learning_rate: 0.3,
            momentum: 0.2,
            epochs: 500,
            seed: 0,
        }
    }
}

impl MlpParams {
    pub fn layer_sizes(&self, n_inputs: usize) -> Vec<usize> {
        let hidden = self.hidden_layers.clone().unwrap_or_else(|| vec![(n_inputs + 2).div_ceil(2)]);
        let mut sizes = vec![n_inputs];
        sizes.extend(hidden);
        sizes.push(1);
        sizes
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// `weights[o][i]` connects input `i` to unit `o`.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    /// Input standardization `(mean, sd)` per feature.
    pub input_moments: Vec<(f64, f64)>,
    pub layers: Vec<Layer>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MlpTrace {
    /// Training loss before each update.
    pub losses: Vec<f64>,
    /// First epoch whose loss exceeded the previous one.
    pub first_increase: Option<usize>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl Mlp {
    /// Network with weights drawn uniformly from [−0.5, 0.5].
    pub fn random(sizes: &[usize], input_moments: Vec<(f64, f64)>, seed: u64) -> Self {
        let mut rng = seeded(seed);
        let layers = sizes
            .windows(2)
            .map(|w| Layer {
                weights: (0..w[1])
                    .map(|_| (0..w[0]).map(|_| rng.random_range(-0.5..=0.5)).collect())
                    .collect(),
                bias: (0..w[1]).map(|_| rng.random_range(-0.5..=0.5)).collect(),
            })
            .collect();
        Mlp { input_moments, layers }
    }

    fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.input_moments).map(|(v, (m, s))| (v - m) / s).collect()
    }

    /// Activations of every layer, input first.
    fn forward(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = vec![self.standardize(x)];
        for layer in &self.layers {
            let prev = acts.last().expect("input present");
            let next = layer
                .weights
                .iter()
                .zip(&layer.bias)
                .map(|(w, b)| sigmoid(b + w.iter().zip(prev).map(|(a, c)| a * c).sum::<f64>()))
                .collect();
            acts.push(next);
        }
        acts
    }

    pub fn probability(&self, x: &[f64]) -> f64 {
        self.forward(x).last().expect("output layer")[0]
    }

    /// `1/(2n) Σ (o − y)²`.
    pub fn loss(&self, rows: &[Vec<f64>], labels: &[u8]) -> f64 {
        let n = rows.len() as f64;
        rows.iter()
            .zip(labels)
            .map(|(x, &y)| (self.probability(x) - f64::from(y)).powi(2))
            .sum::<f64>()
            / (2.0 * n)
    }

    /// Gradient of [`Mlp::loss`] with the layout of [`Mlp::params`].
    pub fn gradient(&self, rows: &[Vec<f64>], labels: &[u8]) -> Vec<f64> {
        let n = rows.len() as f64;
        let mut grads: Vec<Layer> = self
            .layers
            .iter()
            .map(|l| Layer {
                weights: vec![vec![0.0; l.weights[0].len()]; l.weights.len()],
                bias: vec![0.0; l.bias.len()],
            })
            .collect();
        for (x, &y) in rows.iter().zip(labels) {
            let acts = self.forward(x);
            let out = acts.last().expect("output")[0];
            let mut delta = vec![(out - f64::from(y)) * out * (1.0 - out) / n];
            for li in (0..self.layers.len()).rev() {
                let input = &acts[li];
                let g = &mut grads[li];
                for (o, d) in delta.iter().enumerate() {
                    g.bias[o] += d;
                    for (i, a) in input.iter().enumerate() {
                        g.weights[o][i] += d * a;
                    }
                }
                if li > 0 {
                    let w = &self.layers[li].weights;
                    delta = (0..input.len())
                        .map(|i| {
                            let back: f64 = delta.iter().enumerate().map(|(o, d)| d * w[o][i]).sum();
                            back * input[i] * (1.0 - input[i])
                        })
                        .collect();
                }
            }
        }
        flatten(&grads)
    }

    /// All weights and biases, layer by layer, each layer's weight rows then its biases.
    pub fn params(&self) -> Vec<f64> {
        flatten(&self.layers)
    }

    pub fn set_params(&mut self, flat: &[f64]) {
        let mut it = flat.iter().copied();
        for l in &mut self.layers {
            for row in &mut l.weights {
                row.iter_mut().for_each(|w| *w = it.next().expect("param count"));
            }
            l.bias.iter_mut().for_each(|b| *b = it.next().expect("param count"));
        }
    }
}

fn flatten(layers: &[Layer]) -> Vec<f64> {
    layers
        .iter()
        .flat_map(|l| l.weights.iter().flatten().chain(&l.bias).copied())
        .collect()
}

pub fn fit_mlp(s: &Samples, p: &MlpParams) -> Result<(Mlp, MlpTrace)> {
    if s.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let sizes = p.layer_sizes(s.n_features());
    let mut net = Mlp::random(&sizes, column_moments(&s.rows, s.n_features()), p.seed);
    let mut theta = net.params();
    let mut velocity = vec![0.0; theta.len()];
    let mut trace = MlpTrace::default();

    for epoch in 0..p.epochs {
        let loss = net.loss(&s.rows, &s.labels);
        if !loss.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        if let Some(&prev) = trace.losses.last() {
            if loss > prev + INCREASE_TOLERANCE && trace.first_increase.is_none() {
                trace.first_increase = Some(epoch);
            }
        }
        trace.losses.push(loss);
        let g = net.gradient(&s.rows, &s.labels);
        for ((t, v), gi) in theta.iter_mut().zip(&mut velocity).zip(&g) {
            *v = p.momentum * *v - p.learning_rate * gi;
            *t += *v;
        }
        net.set_params(&theta);
    }
    let last = net.loss(&s.rows, &s.labels);
    if !last.is_finite() {
        return Err(Error::Diverged { epoch: p.epochs });
    }
    Ok((net, trace))
}
