//! Fully connected tansig network (inputs → 16 → 16 → 1) with batch
//! backpropagation on the mean squared error.

mod io;
mod train;

pub use io::{decode_model, encode_model, load_model, save_model, MODEL_MAGIC};
pub use train::{fit, train, StopReason, TrainConfig, TrainHistory, TrainRecord};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::{FeatureVector, Layout, SCALING_VERSION};
use crate::label::Label;
use crate::scalar::Scalar;

pub const HIDDEN_UNITS: usize = 16;
pub const FORMAT_VERSION: u32 = 1;

/// Hyperbolic tangent sigmoid, 2/(1+e^(−2v)) − 1.
#[inline]
pub fn tansig<T: Scalar>(v: T) -> T {
    let two = T::lit(2.0);
    two / (T::one() + (-two * v).exp()) - T::one()
}

/// Derivative of tansig expressed through its output `a`.
#[inline]
pub fn tansig_deriv_from_output<T: Scalar>(a: T) -> T {
    T::one() - a * a
}

/// Dot product with four interleaved partial sums (fixed order, so results
/// are reproducible).
#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = [T::zero(); 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] = acc[k] + x[k] * y[k];
        }
    }
    let tail = ra.iter().zip(rb).fold(T::zero(), |s, (&x, &y)| s + x * y);
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// One dense layer; `weights` is row-major `rows × cols` (neurons × inputs).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer<T> {
    rows: usize,
    cols: usize,
    weights: Vec<T>,
    biases: Vec<T>,
}

impl<T: Scalar> DenseLayer<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            weights: vec![T::zero(); rows * cols],
            biases: vec![T::zero(); rows],
        }
    }

    pub fn from_parts(rows: usize, cols: usize, weights: Vec<T>, biases: Vec<T>) -> Result<Self> {
        if weights.len() != rows * cols || biases.len() != rows {
            return Err(Error::BadDims(format!(
                "layer {rows}x{cols} given {} weights and {} biases",
                weights.len(),
                biases.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            weights,
            biases,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn biases(&self) -> &[T] {
        &self.biases
    }

    pub fn weights_mut(&mut self) -> &mut [T] {
        &mut self.weights
    }

    pub fn biases_mut(&mut self) -> &mut [T] {
        &mut self.biases
    }

    pub fn weight(&self, row: usize, col: usize) -> T {
        self.weights[row * self.cols + col]
    }

    /// Weights followed by biases.
    pub fn params(&self) -> impl Iterator<Item = &T> {
        self.weights.iter().chain(self.biases.iter())
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut T> {
        self.weights.iter_mut().chain(self.biases.iter_mut())
    }

    fn activate_into(&self, input: &[T], out: &mut Vec<T>) {
        out.clear();
        out.extend(
            self.weights
                .chunks_exact(self.cols)
                .zip(&self.biases)
                .map(|(row, &b)| tansig(b + dot(row, input))),
        );
    }
}

/// One training or evaluation example.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub input: Vec<T>,
    pub target: T,
}

impl<T: Scalar> Sample<T> {
    pub fn new(input: Vec<T>, target: T) -> Self {
        Self { input, target }
    }

    pub fn labelled(features: FeatureVector<T>, label: Label) -> Self {
        Self {
            input: features.into_values(),
            target: T::lit(label.target()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel<T> {
    /// `None` for networks whose input width is not a feature layout.
    layout: Option<Layout>,
    layers: Vec<DenseLayer<T>>,
    decision_threshold: T,
    scaling_version: u32,
    format_version: u32,
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.len() != 4 {
        return Err(Error::BadDims(format!(
            "expected [inputs, hidden, hidden, 1], got {dims:?}"
        )));
    }
    if dims.contains(&0) || dims[3] != 1 {
        return Err(Error::BadDims(format!("invalid layer sizes {dims:?}")));
    }
    Ok(())
}

impl<T: Scalar> MlpModel<T> {
    /// Draws every weight and bias uniformly from ±1/√fan_in with a seeded
    /// ChaCha stream: layer by layer, weights row-major, then biases.
    pub fn init(dims: &[usize], seed: u64) -> Result<Self> {
        check_dims(dims)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = dims
            .windows(2)
            .map(|w| {
                let (fan_in, rows) = (w[0], w[1]);
                let bound = 1.0 / (fan_in as f64).sqrt();
                let mut layer = DenseLayer::zeros(rows, fan_in);
                for p in layer.params_mut() {
                    *p = T::lit(rng.gen_range(-bound..=bound));
                }
                layer
            })
            .collect();
        Ok(Self::with_layers(layers))
    }

    /// Standard topology for a feature layout.
    pub fn for_layout(layout: Layout, seed: u64) -> Result<Self> {
        Self::init(&[layout.len(), HIDDEN_UNITS, HIDDEN_UNITS, 1], seed)
    }

    /// Assembles a model from explicit layers; shapes must chain.
    pub fn from_layers(layers: Vec<DenseLayer<T>>) -> Result<Self> {
        if layers.len() != 3 {
            return Err(Error::BadDims(format!(
                "expected 3 layers, got {}",
                layers.len()
            )));
        }
        let mut dims = vec![layers[0].cols];
        for (i, l) in layers.iter().enumerate() {
            if l.cols != dims[i] {
                return Err(Error::BadDims(format!(
                    "layer {i} takes {} inputs but previous layer has {}",
                    l.cols, dims[i]
                )));
            }
            dims.push(l.rows);
        }
        check_dims(&dims)?;
        if layers
            .iter()
            .flat_map(DenseLayer::params)
            .any(|p| !p.is_finite())
        {
            return Err(Error::BadDims("non-finite parameter".into()));
        }
        Ok(Self::with_layers(layers))
    }

    fn with_layers(layers: Vec<DenseLayer<T>>) -> Self {
        Self {
            layout: Layout::from_input_len(layers[0].cols),
            layers,
            decision_threshold: T::zero(),
            scaling_version: SCALING_VERSION,
            format_version: FORMAT_VERSION,
        }
    }

    pub fn layout(&self) -> Option<Layout> {
        self.layout
    }

    pub fn layers(&self) -> &[DenseLayer<T>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer<T>] {
        &mut self.layers
    }

    pub fn layer_dims(&self) -> [usize; 4] {
        [
            self.layers[0].cols,
            self.layers[0].rows,
            self.layers[1].rows,
            self.layers[2].rows,
        ]
    }

    pub fn input_len(&self) -> usize {
        self.layers[0].cols
    }

    pub fn decision_threshold(&self) -> T {
        self.decision_threshold
    }

    pub fn set_decision_threshold(&mut self, t: T) {
        self.decision_threshold = t;
    }

    pub fn scaling_version(&self) -> u32 {
        self.scaling_version
    }

    pub fn format_version(&self) -> u32 {
        self.format_version
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    fn check_input(&self, x: &[T]) -> Result<()> {
        if x.len() != self.input_len() {
            return Err(Error::LayoutMismatch(format!(
                "model takes {} inputs, got {}",
                self.input_len(),
                x.len()
            )));
        }
        Ok(())
    }

    /// Activations of every layer, input first, network output last.
    pub fn activations(&self, x: &[T]) -> Result<Vec<Vec<T>>> {
        self.check_input(x)?;
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.to_vec());
        for layer in &self.layers {
            let mut out = Vec::with_capacity(layer.rows);
            layer.activate_into(acts.last().expect("input pushed"), &mut out);
            acts.push(out);
        }
        Ok(acts)
    }

    /// Network output for a raw input slice.
    pub fn output(&self, x: &[T]) -> Result<T> {
        self.check_input(x)?;
        let mut a = Vec::new();
        let mut b = Vec::new();
        self.layers[0].activate_into(x, &mut a);
        for layer in &self.layers[1..] {
            layer.activate_into(&a, &mut b);
            std::mem::swap(&mut a, &mut b);
        }
        Ok(a[0])
    }

    /// Output plus per-layer activations for a feature vector of the
    /// model's layout.
    pub fn forward(&self, x: &FeatureVector<T>) -> Result<(T, Vec<Vec<T>>)> {
        self.check_layout(x)?;
        let acts = self.activations(x.values())?;
        let out = acts.last().expect("three layers")[0];
        Ok((out, acts))
    }

    /// Scores above the threshold are genuine; ties reject.
    pub fn decide(&self, score: T) -> Label {
        if score > self.decision_threshold {
            Label::Genuine
        } else {
            Label::Forgery
        }
    }

    pub fn classify(&self, x: &FeatureVector<T>) -> Result<Label> {
        Ok(self.decide(self.forward(x)?.0))
    }

    fn check_layout(&self, x: &FeatureVector<T>) -> Result<()> {
        if self.layout != Some(x.layout()) {
            return Err(Error::LayoutMismatch(format!(
                "model expects {}, got {}",
                self.layout.map_or("raw inputs", Layout::tag),
                x.layout()
            )));
        }
        Ok(())
    }

    /// Mean of (target − output)² over the batch.
    pub fn mse(&self, batch: &[Sample<T>]) -> Result<T> {
        if batch.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let mut total = T::zero();
        for s in batch {
            let e = s.target - self.output(&s.input)?;
            total = total + e * e;
        }
        Ok(total / T::lit(batch.len() as f64))
    }

    /// Analytic gradient of [`MlpModel::mse`].
    pub fn gradients(&self, batch: &[Sample<T>]) -> Result<Gradients<T>> {
        Ok(self.loss_and_gradients(batch)?.1)
    }

    /// Batch mse and its gradient from a single forward/backward sweep.
    pub fn loss_and_gradients(&self, batch: &[Sample<T>]) -> Result<(T, Gradients<T>)> {
        if batch.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let n = T::lit(batch.len() as f64);
        let mut grads = Gradients::zeros_like(self);
        let mut loss = T::zero();
        let mut delta: Vec<T> = Vec::new();
        let mut prev_delta: Vec<T> = Vec::new();
        for s in batch {
            let acts = self.activations(&s.input)?;
            let y = acts[3][0];
            let err = y - s.target;
            loss = loss + err * err;

            delta.clear();
            delta.push(T::lit(2.0) * err / n * tansig_deriv_from_output(y));
            for k in (0..self.layers.len()).rev() {
                let layer = &self.layers[k];
                let input = &acts[k];
                let g = &mut grads.layers[k];
                for (r, &d) in delta.iter().enumerate() {
                    g.biases[r] = g.biases[r] + d;
                    let row = &mut g.weights[r * layer.cols..(r + 1) * layer.cols];
                    for (gw, &x) in row.iter_mut().zip(input) {
                        *gw = *gw + d * x;
                    }
                }
                if k > 0 {
                    prev_delta.clear();
                    prev_delta.extend(input.iter().map(|&a| tansig_deriv_from_output(a)));
                    for (c, pd) in prev_delta.iter_mut().enumerate() {
                        let back = delta.iter().enumerate().fold(T::zero(), |acc, (r, &d)| {
                            acc + layer.weights[r * layer.cols + c] * d
                        });
                        *pd = *pd * back;
                    }
                    std::mem::swap(&mut delta, &mut prev_delta);
                }
            }
        }
        Ok((loss / n, grads))
    }
}

/// Gradient (or update) buffers shaped like a model's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T> {
    pub layers: Vec<DenseLayer<T>>,
}

impl<T: Scalar> Gradients<T> {
    pub fn zeros_like(model: &MlpModel<T>) -> Self {
        Self {
            layers: model
                .layers
                .iter()
                .map(|l| DenseLayer::zeros(l.rows, l.cols))
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.layers.iter().flat_map(DenseLayer::params)
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut T> {
        self.layers.iter_mut().flat_map(DenseLayer::params_mut)
    }
}
