//! Fully connected regression network with explicit backpropagation.
//!
//! Hidden layers are affine maps followed by the selected activation and
//! (in training mode) inverted dropout; the output layer is affine with
//! identity activation. The loss is the summed squared error
//! `E = Σ (y - y_t)²`.

mod adam;
mod metrics;
mod serialize;
mod train;

pub use adam::{AdamState, ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON};
pub use metrics::RegressionMetrics;
pub use serialize::{
    load_model, model_from_str, model_to_string, save_model, MODEL_FORMAT, MODEL_VERSION,
};
pub use train::{
    train, write_history_csv, EpochRecord, TrainConfig, TrainOutcome, DEFAULT_BATCH_SIZE,
    DEFAULT_DROPOUT, DEFAULT_LEARNING_RATE, DEFAULT_MAX_EPOCHS, DEFAULT_PATIENCE,
};

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureVector, FEATURE_COUNT};

/// Default layout: 9 inputs, eight hidden layers of 15, one output.
pub fn default_layer_sizes() -> Vec<usize> {
    let mut sizes = vec![FEATURE_COUNT];
    sizes.extend([15; 8]);
    sizes.push(1);
    sizes
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative expressed through the pre-activation.
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "relu" | "rectifier" => Ok(Activation::Relu),
            "tanh" => Ok(Activation::Tanh),
            other => Err(Error::Config(format!("unknown activation '{other}'"))),
        }
    }
}

/// Dense layer; `weights` is `outputs × inputs`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Layer {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            biases: vec![0.0; outputs],
        }
    }

    #[inline]
    pub fn weight(&self, out: usize, inp: usize) -> f64 {
        self.weights[out * self.inputs + inp]
    }

    fn affine(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.biases.iter().enumerate().map(|(o, b)| {
            let row = &self.weights[o * self.inputs..(o + 1) * self.inputs];
            b + row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>()
        }));
    }
}

/// Per-feature affine normalization `(x - mean) / scale`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    /// Mean and population standard deviation of each column; a column
    /// with (near) zero spread gets scale 1.
    pub fn fit<'a>(rows: impl IntoIterator<Item = &'a [f64]>, width: usize) -> Self {
        let mut n = 0usize;
        let mut sum = vec![0.0; width];
        let mut sq = vec![0.0; width];
        let rows: Vec<&[f64]> = rows.into_iter().collect();
        for r in &rows {
            n += 1;
            for (s, v) in sum.iter_mut().zip(r.iter()) {
                *s += v;
            }
        }
        let mean: Vec<f64> = sum.iter().map(|s| s / n.max(1) as f64).collect();
        for r in &rows {
            for ((q, v), m) in sq.iter_mut().zip(r.iter()).zip(&mean) {
                *q += (v - m) * (v - m);
            }
        }
        let scale = sq
            .iter()
            .zip(&mean)
            .map(|(q, m)| {
                let sd = (q / n.max(1) as f64).sqrt();
                if sd > 1e-12 * m.abs().max(1.0) {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn apply(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            x.iter()
                .zip(&self.mean)
                .zip(&self.scale)
                .map(|((v, m), s)| (v - m) / s),
        );
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Train,
    Infer,
}

/// Intermediate values of one forward pass, consumed by [`MlpModel::backward`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ForwardCache {
    /// Network input after standardization.
    pub input: Vec<f64>,
    /// Pre-activations per layer.
    pub pre: Vec<Vec<f64>>,
    /// Layer outputs after activation and dropout (the next layer's input).
    pub post: Vec<Vec<f64>>,
    /// Dropout multipliers per hidden layer (`0` or `1/(1-rate)`), train mode only.
    pub masks: Vec<Option<Vec<f64>>>,
}

/// Gradient (or any parameter-shaped quantity) per layer.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(model: &MlpModel) -> Self {
        Gradients {
            weights: model
                .layers
                .iter()
                .map(|l| vec![0.0; l.weights.len()])
                .collect(),
            biases: model
                .layers
                .iter()
                .map(|l| vec![0.0; l.biases.len()])
                .collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        for (a, b) in self.biases.iter_mut().zip(&other.biases) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
    }

    pub fn fill(&mut self, value: f64) {
        self.weights.iter_mut().flatten().for_each(|x| *x = value);
        self.biases.iter_mut().flatten().for_each(|x| *x = value);
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.weights
            .iter()
            .flatten()
            .chain(self.biases.iter().flatten())
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MlpModel {
    pub layer_sizes: Vec<usize>,
    pub activation: Activation,
    pub dropout: f64,
    pub standardization: Option<Standardizer>,
    pub layers: Vec<Layer>,
}

fn check_sizes(sizes: &[usize], dropout: f64) -> Result<()> {
    if sizes.len() < 2 {
        return Err(Error::Config(format!(
            "network needs at least an input and an output layer, got {sizes:?}"
        )));
    }
    if let Some(i) = sizes.iter().position(|s| *s == 0) {
        return Err(Error::Config(format!(
            "layer {i} has zero width in {sizes:?}"
        )));
    }
    if !(0.0..1.0).contains(&dropout) {
        return Err(Error::Config(format!(
            "dropout rate must be in [0, 1), got {dropout}"
        )));
    }
    Ok(())
}

/// Uniform Xavier bound `√(6 / (fan_in + fan_out))`.
pub fn xavier_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

/// Xavier-uniform weights, zero biases, deterministic in `seed`.
pub fn xavier_init(
    layer_sizes: &[usize],
    activation: Activation,
    dropout: f64,
    seed: u64,
) -> Result<MlpModel> {
    check_sizes(layer_sizes, dropout)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = layer_sizes
        .windows(2)
        .map(|w| {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = xavier_bound(fan_in, fan_out);
            let mut layer = Layer::zeros(fan_in, fan_out);
            for v in layer.weights.iter_mut() {
                *v = bound * (2.0 * rng.random::<f64>() - 1.0);
            }
            layer
        })
        .collect();
    Ok(MlpModel {
        layer_sizes: layer_sizes.to_vec(),
        activation,
        dropout,
        standardization: None,
        layers,
    })
}

impl MlpModel {
    /// All-zero parameters.
    pub fn zeros(layer_sizes: &[usize], activation: Activation) -> Result<Self> {
        check_sizes(layer_sizes, 0.0)?;
        Ok(MlpModel {
            layer_sizes: layer_sizes.to_vec(),
            activation,
            dropout: 0.0,
            standardization: None,
            layers: layer_sizes
                .windows(2)
                .map(|w| Layer::zeros(w[0], w[1]))
                .collect(),
        })
    }

    pub fn input_width(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    /// Structural and numeric consistency.
    pub fn validate(&self) -> Result<()> {
        check_sizes(&self.layer_sizes, self.dropout)?;
        if self.layers.len() != self.layer_sizes.len() - 1 {
            return Err(Error::Internal(format!(
                "{} layers for sizes {:?}",
                self.layers.len(),
                self.layer_sizes
            )));
        }
        for (i, (l, w)) in self
            .layers
            .iter()
            .zip(self.layer_sizes.windows(2))
            .enumerate()
        {
            if l.inputs != w[0] || l.outputs != w[1] {
                return Err(Error::Internal(format!(
                    "layer {i} is {}x{}, expected {}x{}",
                    l.outputs, l.inputs, w[1], w[0]
                )));
            }
            if l.weights.len() != l.inputs * l.outputs || l.biases.len() != l.outputs {
                return Err(Error::Internal(format!(
                    "layer {i} parameter count mismatch"
                )));
            }
            if !l.weights.iter().chain(&l.biases).all(|v| v.is_finite()) {
                return Err(Error::Internal(format!(
                    "layer {i} has non-finite parameters"
                )));
            }
        }
        if let Some(s) = &self.standardization {
            let n = self.input_width();
            if s.mean.len() != n || s.scale.len() != n {
                return Err(Error::Internal("standardization width mismatch".into()));
            }
            if s.scale.iter().any(|v| !(v.is_finite() && *v != 0.0)) {
                return Err(Error::Internal(
                    "standardization scale must be finite and nonzero".into(),
                ));
            }
        }
        Ok(())
    }

    /// One forward pass. `rng` is only drawn from in training mode with
    /// dropout enabled.
    pub fn forward<R: Rng + ?Sized>(
        &self,
        x: &[f64],
        mode: Mode,
        rng: &mut R,
    ) -> Result<(f64, ForwardCache)> {
        let mut cache = ForwardCache::default();
        let y = self.forward_into(x, mode, rng, &mut cache)?;
        Ok((y, cache))
    }

    /// Like [`forward`](Self::forward) but reuses `cache` allocations.
    pub fn forward_into<R: Rng + ?Sized>(
        &self,
        x: &[f64],
        mode: Mode,
        rng: &mut R,
        cache: &mut ForwardCache,
    ) -> Result<f64> {
        if x.len() != self.input_width() {
            return Err(Error::Schema(format!(
                "input has {} features, model expects {}",
                x.len(),
                self.input_width()
            )));
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::Domain(format!("non-finite network input {x:?}")));
        }
        match &self.standardization {
            Some(s) => s.apply(x, &mut cache.input),
            None => {
                cache.input.clear();
                cache.input.extend_from_slice(x);
            }
        }
        let n_layers = self.layers.len();
        cache.pre.resize_with(n_layers, Vec::new);
        cache.post.resize_with(n_layers, Vec::new);
        cache.masks.resize(n_layers, None);
        let keep = 1.0 - self.dropout;
        for (li, layer) in self.layers.iter().enumerate() {
            let input = if li == 0 {
                &cache.input
            } else {
                &cache.post[li - 1]
            };
            let mut pre = std::mem::take(&mut cache.pre[li]);
            layer.affine(input, &mut pre);
            let mut post = std::mem::take(&mut cache.post[li]);
            post.clear();
            if li + 1 == n_layers {
                post.extend_from_slice(&pre);
                cache.masks[li] = None;
            } else {
                post.extend(pre.iter().map(|z| self.activation.apply(*z)));
                if mode == Mode::Train && self.dropout > 0.0 {
                    let mask: Vec<f64> = (0..post.len())
                        .map(|_| {
                            if rng.random::<f64>() < keep {
                                1.0 / keep
                            } else {
                                0.0
                            }
                        })
                        .collect();
                    post.iter_mut().zip(&mask).for_each(|(a, m)| *a *= m);
                    cache.masks[li] = Some(mask);
                } else {
                    cache.masks[li] = None;
                }
            }
            cache.pre[li] = pre;
            cache.post[li] = post;
        }
        Ok(cache.post[n_layers - 1][0])
    }

    /// Inference-mode prediction.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let mut cache = ForwardCache::default();
        // no randomness is consumed in inference mode
        self.forward_into(x, Mode::Infer, &mut NoRng, &mut cache)
    }

    /// Gradients of `(y - y_true)²` for the sample in `cache`, accumulated
    /// into `grads`.
    pub fn backward_into(
        &self,
        cache: &ForwardCache,
        y_true: f64,
        grads: &mut Gradients,
    ) -> Result<()> {
        let n_layers = self.layers.len();
        if cache.pre.len() != n_layers
            || cache.post.len() != n_layers
            || grads.weights.len() != n_layers
        {
            return Err(Error::Internal("forward cache does not match model".into()));
        }
        let y = cache.post[n_layers - 1][0];
        // dE/dz at the output: identity activation
        let mut delta = vec![2.0 * (y - y_true)];
        for li in (0..n_layers).rev() {
            let layer = &self.layers[li];
            let input = if li == 0 {
                &cache.input
            } else {
                &cache.post[li - 1]
            };
            if delta.len() != layer.outputs || input.len() != layer.inputs {
                return Err(Error::Internal(format!(
                    "cache shape mismatch at layer {li}"
                )));
            }
            let gw = &mut grads.weights[li];
            for (o, d) in delta.iter().enumerate() {
                let row = &mut gw[o * layer.inputs..(o + 1) * layer.inputs];
                row.iter_mut().zip(input).for_each(|(g, x)| *g += d * x);
            }
            grads.biases[li]
                .iter_mut()
                .zip(&delta)
                .for_each(|(g, d)| *g += d);
            if li == 0 {
                break;
            }
            // dE/dy of the previous layer, then through mask and activation
            let prev = li - 1;
            let mut next = vec![0.0; layer.inputs];
            for (o, d) in delta.iter().enumerate() {
                let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                next.iter_mut().zip(row).for_each(|(n, w)| *n += w * d);
            }
            if let Some(mask) = &cache.masks[prev] {
                next.iter_mut().zip(mask).for_each(|(n, m)| *n *= m);
            }
            next.iter_mut()
                .zip(&cache.pre[prev])
                .for_each(|(n, z)| *n *= self.activation.derivative(*z));
            delta = next;
        }
        Ok(())
    }

    pub fn backward(&self, cache: &ForwardCache, y_true: f64) -> Result<Gradients> {
        let mut g = Gradients::zeros_like(self);
        self.backward_into(cache, y_true, &mut g)?;
        Ok(g)
    }

    pub fn parameters(&self) -> impl Iterator<Item = &f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter())
            .chain(self.layers.iter().flat_map(|l| l.biases.iter()))
    }
}

/// Placeholder RNG for inference; never actually drawn from.
pub(crate) struct NoRng;

impl rand::RngCore for NoRng {
    fn next_u32(&mut self) -> u32 {
        unreachable!("inference does not sample")
    }

    fn next_u64(&mut self) -> u64 {
        unreachable!("inference does not sample")
    }

    fn fill_bytes(&mut self, _dst: &mut [u8]) {
        unreachable!("inference does not sample")
    }
}

/// Summed squared error `Σ (y - y_t)²`.
pub fn loss(predicted: &[f64], target: &[f64]) -> Result<f64> {
    if predicted.len() != target.len() {
        return Err(Error::Domain(format!(
            "loss over {} predictions and {} targets",
            predicted.len(),
            target.len()
        )));
    }
    Ok(predicted
        .iter()
        .zip(target)
        .map(|(y, t)| (y - t) * (y - t))
        .sum())
}

/// Per-sample mean of [`loss`].
pub fn mean_loss(predicted: &[f64], target: &[f64]) -> Result<f64> {
    let e = loss(predicted, target)?;
    Ok(if predicted.is_empty() {
        0.0
    } else {
        e / predicted.len() as f64
    })
}

/// Network output per point, clamped to `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldPrediction {
    pub values: Vec<f64>,
    pub raw: Vec<f64>,
    /// Points whose raw output fell outside `[0, 1]`.
    pub clamped: usize,
}

pub fn clamp_predictions(raw: Vec<f64>) -> FieldPrediction {
    let mut clamped = 0;
    let values = raw
        .iter()
        .map(|&v| {
            let c = v.clamp(0.0, 1.0);
            if c != v {
                clamped += 1;
            }
            c
        })
        .collect();
    FieldPrediction {
        values,
        raw,
        clamped,
    }
}

pub fn predict_field(model: &MlpModel, features: &[FeatureVector]) -> Result<FieldPrediction> {
    if model.input_width() != FEATURE_COUNT {
        return Err(Error::Schema(format!(
            "model expects {} inputs, feature vectors have {FEATURE_COUNT}",
            model.input_width()
        )));
    }
    let mut cache = ForwardCache::default();
    let raw = features
        .iter()
        .map(|f| model.forward_into(&f.0, Mode::Infer, &mut NoRng, &mut cache))
        .collect::<Result<Vec<_>>>()?;
    Ok(clamp_predictions(raw))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(99)
    }

    #[test]
    fn xavier_bound_for_first_layer() {
        assert_eq!(xavier_bound(9, 15), 0.5);
        let m = xavier_init(&default_layer_sizes(), Activation::Relu, 0.1, 3).unwrap();
        assert!(m.layers[0].weights.iter().all(|w| w.abs() <= 0.5));
        assert!(m.layers.iter().all(|l| l.biases.iter().all(|b| *b == 0.0)));
        let again = xavier_init(&default_layer_sizes(), Activation::Relu, 0.1, 3).unwrap();
        assert_eq!(m, again);
        assert_eq!(m.layer_sizes, vec![9, 15, 15, 15, 15, 15, 15, 15, 15, 1]);
    }

    #[test]
    fn zero_width_layer_is_config_error() {
        assert!(matches!(
            xavier_init(&[9, 0, 1], Activation::Relu, 0.0, 1),
            Err(Error::Config(_))
        ));
        assert!(xavier_init(&[9, 4, 1], Activation::Relu, 1.0, 1).is_err());
    }

    #[test]
    fn zero_model_outputs_zero() {
        let m = MlpModel::zeros(&default_layer_sizes(), Activation::Relu).unwrap();
        assert_eq!(m.predict(&[0.3; 9]).unwrap(), 0.0);
        let p = predict_field(&m, &[FeatureVector([1.0; 9]); 4]).unwrap();
        assert_eq!(p.values, vec![0.0; 4]);
        assert_eq!(p.clamped, 0);
    }

    #[test]
    fn no_dropout_train_equals_infer() {
        let m = xavier_init(&[9, 6, 6, 1], Activation::Relu, 0.0, 5).unwrap();
        let x = [0.1, -0.2, 0.3, 0.0, 0.5, 0.9, 0.2, 0.01, 0.7];
        let (a, _) = m.forward(&x, Mode::Train, &mut rng()).unwrap();
        assert_eq!(a, m.predict(&x).unwrap());
    }

    #[test]
    fn hand_computed_forward() {
        // 2 -> 2 (relu) -> 1
        let mut m = MlpModel::zeros(&[2, 2, 1], Activation::Relu).unwrap();
        m.layers[0].weights = vec![1.0, 0.0, 0.0, 1.0];
        m.layers[0].biases = vec![0.5, -1.0];
        m.layers[1].weights = vec![2.0, 3.0];
        m.layers[1].biases = vec![0.25];
        // hidden = relu(0.3 + 0.5, -0.4 - 1.0) = (0.8, 0); y = 1.6 + 0 + 0.25
        let y = m.predict(&[0.3, -0.4]).unwrap();
        assert!((y - 1.85).abs() < 1e-15);
    }

    #[test]
    fn non_finite_input_rejected() {
        let m = MlpModel::zeros(&[2, 1], Activation::Tanh).unwrap();
        assert!(matches!(m.predict(&[f64::NAN, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(m.predict(&[0.0]), Err(Error::Schema(_))));
    }

    #[test]
    fn loss_examples() {
        assert_eq!(loss(&[0.4, 0.2], &[0.4, 0.2]).unwrap(), 0.0);
        assert_eq!(loss(&[1.0, 2.0], &[0.0, 0.0]).unwrap(), 5.0);
        assert!((loss(&[0.3], &[0.1]).unwrap() - 0.04).abs() < 1e-15);
        assert!(loss(&[0.3], &[]).is_err());
        assert_eq!(mean_loss(&[1.0, 2.0], &[0.0, 0.0]).unwrap(), 2.5);
    }

    #[test]
    fn exact_fit_has_zero_gradient() {
        let m = xavier_init(&[3, 4, 1], Activation::Tanh, 0.0, 8).unwrap();
        let x = [0.2, -0.1, 0.4];
        let (y, cache) = m.forward(&x, Mode::Infer, &mut rng()).unwrap();
        let g = m.backward(&cache, y).unwrap();
        assert!(g.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_linear_neuron_gradient() {
        let mut m = MlpModel::zeros(&[1, 1], Activation::Tanh).unwrap();
        let (w, x, t) = (0.7, 1.3, 0.2);
        m.layers[0].weights = vec![w];
        let (_, cache) = m.forward(&[x], Mode::Infer, &mut rng()).unwrap();
        let g = m.backward(&cache, t).unwrap();
        assert!((g.weights[0][0] - 2.0 * (w * x - t) * x).abs() < 1e-15);
        assert!((g.biases[0][0] - 2.0 * (w * x - t)).abs() < 1e-15);
    }

    #[test]
    fn clamp_rule() {
        let p = clamp_predictions(vec![-0.2, 0.5, 1.7]);
        assert_eq!(p.values, vec![0.0, 0.5, 1.0]);
        assert_eq!(p.clamped, 2);
    }

    #[test]
    fn standardizer_handles_constant_columns() {
        let rows: Vec<Vec<f64>> = vec![vec![1.0, 5.0], vec![3.0, 5.0]];
        let s = Standardizer::fit(rows.iter().map(Vec::as_slice), 2);
        assert_eq!(s.mean, vec![2.0, 5.0]);
        assert_eq!(s.scale, vec![1.0, 1.0]);
        let mut out = Vec::new();
        s.apply(&[3.0, 5.0], &mut out);
        assert_eq!(out, vec![1.0, 0.0]);
    }

    #[test]
    fn predict_field_checks_width() {
        let m = MlpModel::zeros(&[4, 1], Activation::Relu).unwrap();
        assert!(matches!(
            predict_field(&m, &[FeatureVector([0.0; 9])]),
            Err(Error::Schema(_))
        ));
    }
}
