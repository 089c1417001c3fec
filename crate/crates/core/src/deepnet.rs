//! From-scratch multi-layer feed-forward regression network.
//!
//! Hidden layers use tanh, the output layer sigmoid, so targets must be
//! scaled into [0, 1] before training. Training is full-batch gradient
//! descent on the mean squared error with classical momentum:
//!
//! ```text
//! v ← μ·v − lr·∇L(θ);   θ ← θ + v
//! ```
//!
//! Two presets mirror the reference configurations: a 10-weight-layer
//! network (9 tanh hidden layers of 50 nodes) trained for 900 epochs for
//! disintegration time, and a 9-weight-layer network (8 hidden layers of
//! 30 nodes) trained for 2600 epochs for multi-output release profiles.
//! "Layers" counts weight layers; the sigmoid output layer is one of them.
//!
//! Everything here is deterministic: initialization draws from a seeded
//! ChaCha stream in a fixed order and training is single-threaded.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Layer widths from input to output, plus the initialization seed.
/// Activations are fixed (tanh hidden, sigmoid output).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub layer_widths: Vec<usize>,
    pub seed: u64,
}

impl NetworkSpec {
    pub fn new(layer_widths: Vec<usize>, seed: u64) -> Result<Self> {
        if layer_widths.len() < 2 {
            return Err(Error::Argument(
                "a network needs at least input and output widths".into(),
            ));
        }
        if layer_widths.contains(&0) {
            return Err(Error::Argument("layer widths must be >= 1".into()));
        }
        Ok(NetworkSpec { layer_widths, seed })
    }

    pub fn input_width(&self) -> usize {
        self.layer_widths[0]
    }

    pub fn output_width(&self) -> usize {
        *self.layer_widths.last().expect("validated non-empty")
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// One weight layer: `weights[out][in]` and one bias per output node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerParams {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl LayerParams {
    fn zeros(fan_out: usize, fan_in: usize) -> Self {
        LayerParams {
            weights: vec![vec![0.0; fan_in]; fan_out],
            bias: vec![0.0; fan_out],
        }
    }
}

/// All weight layers of a network, outermost order = layer order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub layers: Vec<LayerParams>,
}

impl NetworkParams {
    pub fn input_width(&self) -> usize {
        self.layers[0].weights[0].len()
    }

    pub fn output_width(&self) -> usize {
        self.layers.last().map_or(0, |l| l.bias.len())
    }

    fn zeros_like(&self) -> Vec<LayerParams> {
        self.layers
            .iter()
            .map(|l| LayerParams::zeros(l.bias.len(), l.weights[0].len()))
            .collect()
    }
}

/// Full-batch training parameters. The loss is mean squared error over all
/// outputs and rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
}

impl TrainConfig {
    pub fn new(learning_rate: f64, momentum: f64, epochs: usize) -> Result<Self> {
        if !(learning_rate.is_finite() && learning_rate > 0.0) {
            return Err(Error::Argument("learning_rate must be > 0".into()));
        }
        if !(momentum.is_finite() && (0.0..1.0).contains(&momentum)) {
            return Err(Error::Argument("momentum must be in [0, 1)".into()));
        }
        Ok(TrainConfig {
            learning_rate,
            momentum,
            epochs,
        })
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Uniform fan-based initialization: weights from
/// ±sqrt(6 / (fan_in + fan_out)), biases zero. Bit-identical given the seed.
pub fn init(spec: &NetworkSpec) -> NetworkParams {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut layers = Vec::with_capacity(spec.layer_widths.len() - 1);
    for w in spec.layer_widths.windows(2) {
        let (fan_in, fan_out) = (w[0], w[1]);
        let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
        let weights = (0..fan_out)
            .map(|_| {
                (0..fan_in)
                    .map(|_| bound * (2.0 * rng.gen::<f64>() - 1.0))
                    .collect()
            })
            .collect();
        layers.push(LayerParams {
            weights,
            bias: vec![0.0; fan_out],
        });
    }
    NetworkParams { layers }
}

fn affine(layer: &LayerParams, input: &[f64], out: &mut Vec<f64>) {
    out.clear();
    for (row, b) in layer.weights.iter().zip(&layer.bias) {
        let z: f64 = row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>() + b;
        out.push(z);
    }
}

/// Forward pass for one input row. Outputs are strictly inside (0, 1).
pub fn forward(params: &NetworkParams, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != params.input_width() {
        return Err(Error::Argument(format!(
            "input width {} does not match network input {}",
            x.len(),
            params.input_width()
        )));
    }
    let mut current = x.to_vec();
    let mut next = Vec::new();
    let last = params.layers.len() - 1;
    for (l, layer) in params.layers.iter().enumerate() {
        affine(layer, &current, &mut next);
        if l == last {
            for z in next.iter_mut() {
                *z = sigmoid(*z);
            }
        } else {
            for z in next.iter_mut() {
                *z = z.tanh();
            }
        }
        std::mem::swap(&mut current, &mut next);
    }
    Ok(current)
}

/// Activations of every layer for one row: `[h_1, …, h_L]` where `h_L` is
/// the sigmoid output.
fn forward_trace(params: &NetworkParams, x: &[f64]) -> Vec<Vec<f64>> {
    let mut acts = Vec::with_capacity(params.layers.len());
    let mut current = x.to_vec();
    let last = params.layers.len() - 1;
    for (l, layer) in params.layers.iter().enumerate() {
        let mut next = Vec::new();
        affine(layer, &current, &mut next);
        if l == last {
            for z in next.iter_mut() {
                *z = sigmoid(*z);
            }
        } else {
            for z in next.iter_mut() {
                *z = z.tanh();
            }
        }
        acts.push(next.clone());
        current = next;
    }
    acts
}

fn check_batch(params: &NetworkParams, x: &Matrix, y: &Matrix) -> Result<()> {
    if x.rows() == 0 {
        return Err(Error::Argument("batch is empty".into()));
    }
    if x.rows() != y.rows() {
        return Err(Error::Argument(format!(
            "{} input rows vs {} target rows",
            x.rows(),
            y.rows()
        )));
    }
    if x.cols() != params.input_width() {
        return Err(Error::Argument(format!(
            "input width {} does not match network input {}",
            x.cols(),
            params.input_width()
        )));
    }
    if y.cols() != params.output_width() {
        return Err(Error::Argument(format!(
            "target width {} does not match network output {}",
            y.cols(),
            params.output_width()
        )));
    }
    Ok(())
}

/// Mean squared error of the network over a batch:
/// `(1/(N·M))·Σ‖forward(x)−y‖²`.
pub fn loss_mse(params: &NetworkParams, x: &Matrix, y: &Matrix) -> Result<f64> {
    check_batch(params, x, y)?;
    let mut total = 0.0;
    for i in 0..x.rows() {
        let out = forward(params, x.row(i))?;
        total += out
            .iter()
            .zip(y.row(i))
            .map(|(o, t)| (o - t) * (o - t))
            .sum::<f64>();
    }
    Ok(total / (x.rows() * y.cols()) as f64)
}

/// Exact analytic gradient of the batch MSE, in parameter shape.
pub fn gradient(params: &NetworkParams, x: &Matrix, y: &Matrix) -> Result<Vec<LayerParams>> {
    Ok(loss_and_gradient(params, x, y)?.1)
}

/// Loss and gradient in one pass over the batch (backpropagation).
pub fn loss_and_gradient(
    params: &NetworkParams,
    x: &Matrix,
    y: &Matrix,
) -> Result<(f64, Vec<LayerParams>)> {
    check_batch(params, x, y)?;
    let n = x.rows();
    let m = y.cols();
    let scale = 1.0 / (n * m) as f64;
    let mut grad = params.zeros_like();
    let mut loss = 0.0;
    let last = params.layers.len() - 1;

    for row in 0..n {
        let input = x.row(row);
        let target = y.row(row);
        let acts = forward_trace(params, input);
        let out = &acts[last];
        loss += out
            .iter()
            .zip(target)
            .map(|(o, t)| (o - t) * (o - t))
            .sum::<f64>();

        // output delta: d(MSE)/dz = 2(o−t)/(N·M) · σ'(z), σ' = o(1−o)
        let mut delta: Vec<f64> = out
            .iter()
            .zip(target)
            .map(|(o, t)| 2.0 * (o - t) * scale * o * (1.0 - o))
            .collect();

        for l in (0..params.layers.len()).rev() {
            let below: &[f64] = if l == 0 { input } else { &acts[l - 1] };
            {
                let gl = &mut grad[l];
                for (j, &d) in delta.iter().enumerate() {
                    gl.bias[j] += d;
                    let grow = &mut gl.weights[j];
                    for (g, &h) in grow.iter_mut().zip(below) {
                        *g += d * h;
                    }
                }
            }
            if l > 0 {
                // propagate: delta_below = (Wᵀ delta) ⊙ (1 − h²)
                let layer = &params.layers[l];
                let h = &acts[l - 1];
                let mut next_delta = vec![0.0; h.len()];
                for (j, &d) in delta.iter().enumerate() {
                    for (nd, &w) in next_delta.iter_mut().zip(&layer.weights[j]) {
                        *nd += w * d;
                    }
                }
                for (nd, &hv) in next_delta.iter_mut().zip(h) {
                    *nd *= 1.0 - hv * hv;
                }
                delta = next_delta;
            }
        }
    }
    Ok((loss * scale, grad))
}

/// Trained parameters plus the per-epoch loss trace
/// (`epochs + 1` entries, starting at the initial loss).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub params: NetworkParams,
    pub loss_trace: Vec<f64>,
}

/// Trains a fresh network by full-batch momentum descent for exactly
/// `cfg.epochs` updates. Targets must already be scaled into [0, 1].
pub fn train(spec: &NetworkSpec, cfg: &TrainConfig, x: &Matrix, y: &Matrix) -> Result<TrainOutcome> {
    for i in 0..y.rows() {
        for &t in y.row(i) {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::Argument(format!(
                    "target {t} outside [0, 1]; scale targets before training"
                )));
            }
        }
    }
    let mut params = init(spec);
    check_batch(&params, x, y)?;
    let mut velocity = params.zeros_like();
    let mut trace = Vec::with_capacity(cfg.epochs + 1);

    for _ in 0..cfg.epochs {
        let (loss, grad) = loss_and_gradient(&params, x, y)?;
        trace.push(loss);
        for ((pl, vl), gl) in params.layers.iter_mut().zip(&mut velocity).zip(&grad) {
            for ((pw, vw), gw) in pl
                .weights
                .iter_mut()
                .zip(&mut vl.weights)
                .zip(&gl.weights)
            {
                for ((p, v), g) in pw.iter_mut().zip(vw.iter_mut()).zip(gw) {
                    *v = cfg.momentum * *v - cfg.learning_rate * g;
                    *p += *v;
                }
            }
            for ((p, v), g) in pl.bias.iter_mut().zip(&mut vl.bias).zip(&gl.bias) {
                *v = cfg.momentum * *v - cfg.learning_rate * g;
                *p += *v;
            }
        }
    }
    trace.push(loss_mse(&params, x, y)?);
    Ok(TrainOutcome {
        params,
        loss_trace: trace,
    })
}

/// The two reference network configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetName {
    /// Disintegration time: 9 tanh hidden layers of 50 nodes + sigmoid
    /// output (10 weight layers), 900 epochs.
    OfdfDnn,
    /// Release profiles: 8 tanh hidden layers of 30 nodes + sigmoid output
    /// (9 weight layers), 2600 epochs, multi-output.
    SrmtDnn,
}

impl std::str::FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ofdf-dnn" | "dnn-ofdf" => Ok(PresetName::OfdfDnn),
            "srmt-dnn" | "dnn-srmt" => Ok(PresetName::SrmtDnn),
            other => Err(Error::Argument(format!("unknown network preset {other:?}"))),
        }
    }
}

impl PresetName {
    /// Output width the preset was designed for: 1 (disintegration time) or
    /// 4 (release profile time points).
    pub fn default_output_width(self) -> usize {
        match self {
            PresetName::OfdfDnn => 1,
            PresetName::SrmtDnn => 4,
        }
    }
}

/// Builds the spec and training configuration for a preset. Learning rate
/// 0.01 and momentum 0.8 apply to both. Panics on zero widths.
pub fn preset(name: PresetName, input_width: usize, output_width: usize) -> (NetworkSpec, TrainConfig) {
    let (hidden_layers, hidden_width, epochs) = match name {
        PresetName::OfdfDnn => (9, 50, 900),
        PresetName::SrmtDnn => (8, 30, 2600),
    };
    let mut widths = Vec::with_capacity(hidden_layers + 2);
    widths.push(input_width);
    widths.extend(std::iter::repeat_n(hidden_width, hidden_layers));
    widths.push(output_width);
    (
        NetworkSpec::new(widths, 0).expect("preset widths must be >= 1"),
        TrainConfig {
            learning_rate: 0.01,
            momentum: 0.8,
            epochs,
        },
    )
}
