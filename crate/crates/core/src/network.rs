//! The coordinate MLP: construction, forward pass with cache, reverse pass.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::activations::{
    activate, activate_with_grad_into, make_fm_multipliers_with, positional_encode, positional_encode_into,
    ActivationKind, ActivationSpec, FmOptions, PositionalEncodingSpec,
};
use crate::numerics::{
    matmul_into, matmul_transpose_a_into, matmul_transpose_b, matmul_transpose_b_into, uniform_matrix, Matrix, Rng,
};
use crate::{Error, Result};

/// Rows per forward chunk in [`Model::predict`].
const PREDICT_CHUNK: usize = 8192;

/// One affine map followed by its activation. `weights` is `fan_out × fan_in`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Layer {
    pub weights: Matrix,
    pub bias: Option<Vec<f64>>,
    pub activation: ActivationSpec,
}

impl Layer {
    pub fn fan_in(&self) -> usize {
        self.weights.cols()
    }

    pub fn fan_out(&self) -> usize {
        self.weights.rows()
    }

    pub fn param_count(&self) -> usize {
        self.weights.rows() * self.weights.cols() + self.bias.as_ref().map_or(0, Vec::len)
    }

    /// `a · Wᵀ + b`
    fn affine(&self, input: &Matrix) -> Result<Matrix> {
        let mut z = matmul_transpose_b(input, &self.weights)?;
        if let Some(bias) = &self.bias {
            for r in 0..z.rows() {
                for (v, b) in z.row_mut(r).iter_mut().zip(bias) {
                    *v += b;
                }
            }
        }
        Ok(z)
    }

    fn affine_into(&self, input: &Matrix, z: &mut Matrix) -> Result<()> {
        matmul_transpose_b_into(z, input, &self.weights)?;
        if let Some(bias) = &self.bias {
            for row in z.data_mut().chunks_exact_mut(bias.len().max(1)) {
                for (v, b) in row.iter_mut().zip(bias) {
                    *v += b;
                }
            }
        }
        Ok(())
    }
}

/// Architecture and activation hyperparameters for [`build_model`].
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelSpec {
    pub input_dim: usize,
    pub hidden: Vec<usize>,
    pub output_dim: usize,
    /// Activation of the hidden layers.
    pub kind: ActivationKind,
    /// ω₀ of the first layer.
    pub first_omega0: f64,
    /// ω₀ of every later layer, also the divisor of their init bound.
    pub hidden_omega0: f64,
    pub gauss_scale: f64,
    /// Required for FM kinds, in cycles per signal.
    pub f_nyquist: Option<f64>,
    pub fm: FmOptions,
    pub encoder: Option<PositionalEncodingSpec>,
    pub outermost_linear: bool,
}

impl ModelSpec {
    /// SIREN-style defaults for the given shape; callers override fields.
    pub fn new(input_dim: usize, hidden: Vec<usize>, output_dim: usize, kind: ActivationKind) -> Self {
        Self {
            input_dim,
            hidden,
            output_dim,
            kind,
            first_omega0: 30.0,
            hidden_omega0: 30.0,
            gauss_scale: 16.0,
            f_nyquist: None,
            fm: FmOptions::default(),
            encoder: None,
            outermost_linear: !kind.is_finer_family(),
        }
    }
}

/// Stack of layers mapping coordinates in `[-1, 1]^d` to signal values.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Model {
    pub layers: Vec<Layer>,
    pub input_dim: usize,
    pub encoder: Option<PositionalEncodingSpec>,
    pub outermost_linear: bool,
}

/// Everything the reverse pass needs from a forward pass.
#[derive(Clone, Debug)]
pub struct ForwardCache {
    /// Network input after the optional encoder.
    pub input: Matrix,
    /// Pre-activations `z` per layer.
    pub pre: Vec<Matrix>,
    /// Post-activations `a` per layer; the last one is the output.
    pub post: Vec<Matrix>,
    /// Activation derivatives at `z` per layer.
    pub slope: Vec<Matrix>,
}

impl Default for ForwardCache {
    fn default() -> Self {
        Self {
            input: Matrix::zeros(0, 0),
            pre: Vec::new(),
            post: Vec::new(),
            slope: Vec::new(),
        }
    }
}

impl ForwardCache {
    pub fn output(&self) -> &Matrix {
        self.post.last().expect("model has at least one layer")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayerGradient {
    pub weights: Matrix,
    pub bias: Option<Vec<f64>>,
}

/// Per-layer parameter gradients, same order and shapes as the model.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGradient>,
}

impl Gradients {
    /// Zero gradients shaped like `model`.
    pub fn zeros_like(model: &Model) -> Self {
        Self {
            layers: model
                .layers
                .iter()
                .map(|l| LayerGradient {
                    weights: Matrix::zeros(l.fan_out(), l.fan_in()),
                    bias: l.bias.as_ref().map(|b| vec![0.0; b.len()]),
                })
                .collect(),
        }
    }

    /// Flattened in [`Model::parameters`] order.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for g in &self.layers {
            out.extend_from_slice(g.weights.data());
            if let Some(b) = &g.bias {
                out.extend_from_slice(b);
            }
        }
        out
    }

    /// Gradient tensors in [`Model::tensors_mut`] order.
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(2 * self.layers.len());
        for g in &self.layers {
            out.push(g.weights.data());
            if let Some(b) = &g.bias {
                out.push(b.as_slice());
            }
        }
        out
    }
}

/// Reusable buffers for [`Model::backward_into`].
#[derive(Clone, Debug)]
pub struct BackwardScratch {
    delta: Matrix,
    upstream: Matrix,
}

impl Default for BackwardScratch {
    fn default() -> Self {
        Self {
            delta: Matrix::zeros(0, 0),
            upstream: Matrix::zeros(0, 0),
        }
    }
}

/// Initializes a model.
///
/// First-layer weights are drawn from `U(-1/fan_in, 1/fan_in)`. Later layers
/// use `U(-sqrt(6/fan_in)/ω₀, sqrt(6/fan_in)/ω₀)` for periodic kinds and
/// `U(-sqrt(6/fan_in), sqrt(6/fan_in))` otherwise. Biases are
/// `U(-1/sqrt(fan_in), 1/sqrt(fan_in))`, except the FINER-family first layer,
/// which uses `U(-1, 1)`, and the first layer behind a positional encoder,
/// which has none.
pub fn build_model(spec: &ModelSpec, rng: &mut Rng) -> Result<Model> {
    if spec.hidden.is_empty() {
        return Err(Error::Build("at least one hidden layer is required".into()));
    }
    if spec.input_dim == 0 || spec.output_dim == 0 || spec.hidden.contains(&0) {
        return Err(Error::Build(format!(
            "zero width in {} -> {:?} -> {}",
            spec.input_dim, spec.hidden, spec.output_dim
        )));
    }
    let kind = spec.kind;
    if kind.is_fm() && spec.f_nyquist.is_none() {
        return Err(Error::Build(format!("{kind:?} needs a Nyquist frequency")));
    }
    if kind.is_periodic() && !(spec.first_omega0 > 0.0 && spec.hidden_omega0 > 0.0) {
        return Err(Error::Build("omega0 must be positive for periodic kinds".into()));
    }
    if kind == ActivationKind::Gauss && !(spec.gauss_scale > 0.0) {
        return Err(Error::Build("gauss scale must be positive".into()));
    }
    let first_fan_in = match &spec.encoder {
        Some(enc) => {
            enc.validate()?;
            if enc.input_dim != spec.input_dim {
                return Err(Error::Build(format!(
                    "encoder expects {} input dims, model has {}",
                    enc.input_dim, spec.input_dim
                )));
            }
            enc.total_embed
        }
        None => spec.input_dim,
    };

    let mut dims = Vec::with_capacity(spec.hidden.len() + 2);
    dims.push(first_fan_in);
    dims.extend_from_slice(&spec.hidden);
    dims.push(spec.output_dim);

    let n_layers = dims.len() - 1;
    let mut layers = Vec::with_capacity(n_layers);
    for i in 0..n_layers {
        let (fan_in, fan_out) = (dims[i], dims[i + 1]);
        let is_output = i == n_layers - 1;
        let activation = layer_activation(spec, i, fan_out, is_output)?;

        let weight_bound = if i == 0 {
            1.0 / fan_in as f64
        } else if kind.is_periodic() {
            libm::sqrt(6.0 / fan_in as f64) / spec.hidden_omega0
        } else {
            libm::sqrt(6.0 / fan_in as f64)
        };
        let weights = uniform_matrix(rng, fan_out, fan_in, -weight_bound, weight_bound)?;

        let bias = if i == 0 && spec.encoder.is_some() {
            None
        } else {
            let bound = if i == 0 && kind.is_finer_family() {
                1.0
            } else {
                1.0 / libm::sqrt(fan_in as f64)
            };
            Some(uniform_matrix(rng, 1, fan_out, -bound, bound)?.into_data())
        };
        layers.push(Layer {
            weights,
            bias,
            activation,
        });
    }
    let model = Model {
        layers,
        input_dim: spec.input_dim,
        encoder: spec.encoder.clone(),
        outermost_linear: spec.outermost_linear,
    };
    model.validate()?;
    Ok(model)
}

fn layer_activation(spec: &ModelSpec, index: usize, width: usize, is_output: bool) -> Result<ActivationSpec> {
    use ActivationKind::*;
    let omega0 = if index == 0 {
        spec.first_omega0
    } else {
        spec.hidden_omega0
    };
    if is_output {
        if spec.outermost_linear {
            return Ok(ActivationSpec::linear());
        }
        // a width-1 ladder is the single frequency 0, so FM outputs use the
        // fixed-frequency kind
        return Ok(match spec.kind.fixed_frequency() {
            Sine => ActivationSpec::sine(spec.hidden_omega0),
            Finer => ActivationSpec::finer(spec.hidden_omega0),
            Gauss => ActivationSpec::gauss(spec.gauss_scale),
            Relu => ActivationSpec::relu(),
            _ => ActivationSpec::linear(),
        });
    }
    Ok(match spec.kind {
        Sine => ActivationSpec::sine(omega0),
        Finer => ActivationSpec::finer(omega0),
        FmSine | FmFiner if index > 0 && spec.fm.first_layer_only => {
            if spec.kind == FmSine {
                ActivationSpec::sine(omega0)
            } else {
                ActivationSpec::finer(omega0)
            }
        }
        FmSine | FmFiner => {
            let f_nyquist = spec
                .f_nyquist
                .ok_or_else(|| Error::Build("FM layer without Nyquist frequency".into()))?;
            let ladder = make_fm_multipliers_with(width, f_nyquist, &spec.fm)?;
            if spec.kind == FmSine {
                ActivationSpec::fm_sine(ladder, omega0)
            } else {
                ActivationSpec::fm_finer(ladder, omega0)
            }
        }
        Gauss => ActivationSpec::gauss(spec.gauss_scale),
        Relu => ActivationSpec::relu(),
        Linear => ActivationSpec::linear(),
    })
}

/// `Σ fan_out·fan_in + [bias]·fan_out`; the encoder has no parameters.
pub fn param_count(model: &Model) -> usize {
    model.layers.iter().map(Layer::param_count).sum()
}

impl Model {
    pub fn param_count(&self) -> usize {
        param_count(self)
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, Layer::fan_out)
    }

    /// Neuron counts of the hidden layers.
    pub fn hidden_widths(&self) -> Vec<usize> {
        self.layers[..self.layers.len().saturating_sub(1)]
            .iter()
            .map(Layer::fan_out)
            .collect()
    }

    /// Checks the structural invariants; used after deserialization.
    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Build("model has no layers".into()));
        }
        let expected_in = match &self.encoder {
            Some(enc) => {
                enc.validate()?;
                if enc.input_dim != self.input_dim {
                    return Err(Error::Build("encoder input_dim does not match model".into()));
                }
                enc.total_embed
            }
            None => self.input_dim,
        };
        let mut fan_in = expected_in;
        for (i, layer) in self.layers.iter().enumerate() {
            if layer.fan_in() != fan_in {
                return Err(Error::Build(format!(
                    "layer {i} expects {} inputs, previous layer gives {fan_in}",
                    layer.fan_in()
                )));
            }
            if let Some(b) = &layer.bias {
                if b.len() != layer.fan_out() {
                    return Err(Error::Build(format!(
                        "layer {i} bias length {} != {}",
                        b.len(),
                        layer.fan_out()
                    )));
                }
            }
            layer.activation.validate(Some(layer.fan_out()))?;
            fan_in = layer.fan_out();
        }
        if self.outermost_linear && self.layers.last().unwrap().activation.kind != ActivationKind::Linear {
            return Err(Error::Build("outermost_linear model must end in a linear layer".into()));
        }
        Ok(())
    }

    fn check_input(&self, coords: &Matrix) -> Result<()> {
        if coords.cols() != self.input_dim {
            return Err(Error::Shape {
                op: "forward",
                left: coords.shape(),
                right: (coords.rows(), self.input_dim),
            });
        }
        Ok(())
    }

    fn encode(&self, coords: &Matrix) -> Result<Matrix> {
        self.check_input(coords)?;
        match &self.encoder {
            Some(enc) => positional_encode(enc, coords),
            None => Ok(coords.clone()),
        }
    }

    /// Forward pass retaining every intermediate for [`Model::backward`].
    pub fn forward(&self, coords: &Matrix) -> Result<ForwardCache> {
        let mut cache = ForwardCache::default();
        self.forward_into(coords, &mut cache)?;
        Ok(cache)
    }

    /// [`Model::forward`] reusing the buffers of an earlier cache.
    pub fn forward_into(&self, coords: &Matrix, cache: &mut ForwardCache) -> Result<()> {
        self.check_input(coords)?;
        match &self.encoder {
            Some(enc) => positional_encode_into(enc, coords, &mut cache.input)?,
            None => {
                cache.input.reshape_scratch(coords.rows(), coords.cols());
                cache.input.data_mut().copy_from_slice(coords.data());
            }
        }
        let n = self.layers.len();
        for buffers in [&mut cache.pre, &mut cache.post, &mut cache.slope] {
            buffers.truncate(n);
            while buffers.len() < n {
                buffers.push(Matrix::zeros(0, 0));
            }
        }
        for (i, layer) in self.layers.iter().enumerate() {
            let (done, rest) = cache.post.split_at_mut(i);
            let input = done.last().unwrap_or(&cache.input);
            layer.affine_into(input, &mut cache.pre[i])?;
            activate_with_grad_into(&layer.activation, &cache.pre[i], &mut rest[0], &mut cache.slope[i])?;
        }
        Ok(())
    }

    /// Output only, evaluated in row chunks to bound memory.
    pub fn predict(&self, coords: &Matrix) -> Result<Matrix> {
        self.features(coords, self.layers.len() - 1)
    }

    /// Post-activations of layer `layer_index` (0 is the first hidden layer).
    pub fn features(&self, coords: &Matrix, layer_index: usize) -> Result<Matrix> {
        if layer_index >= self.layers.len() {
            return Err(Error::InvalidArgument(format!(
                "layer {layer_index} out of range for {} layers",
                self.layers.len()
            )));
        }
        let width = self.layers[layer_index].fan_out();
        let mut out = Vec::with_capacity(coords.rows() * width);
        let mut start = 0;
        while start < coords.rows() {
            let end = (start + PREDICT_CHUNK).min(coords.rows());
            let mut a = self.encode(&coords.slice_rows(start, end))?;
            for layer in &self.layers[..=layer_index] {
                a = activate(&layer.activation, &layer.affine(&a)?)?;
            }
            out.extend_from_slice(a.data());
            start = end;
        }
        Matrix::new(coords.rows(), width, out)
    }

    /// Exact parameter gradients of a scalar loss whose derivative with
    /// respect to the network output is `grad_output`.
    pub fn backward(&self, cache: &ForwardCache, grad_output: &Matrix) -> Result<Gradients> {
        let mut grads = Gradients::zeros_like(self);
        self.backward_into(cache, grad_output, &mut grads, &mut BackwardScratch::default())?;
        Ok(grads)
    }

    fn check_cache(&self, cache: &ForwardCache, grad_output: &Matrix) -> Result<()> {
        let n_layers = self.layers.len();
        if cache.pre.len() != n_layers || cache.post.len() != n_layers || cache.slope.len() != n_layers {
            return Err(Error::InvalidArgument(format!(
                "cache holds {} layers, model has {n_layers}",
                cache.post.len()
            )));
        }
        for (i, layer) in self.layers.iter().enumerate() {
            if cache.post[i].cols() != layer.fan_out() || cache.post[i].rows() != cache.input.rows() {
                return Err(Error::InvalidArgument(format!(
                    "cache layer {i} does not match the model"
                )));
            }
        }
        if cache.input.cols() != self.layers[0].fan_in() {
            return Err(Error::InvalidArgument("cache input does not match the model".into()));
        }
        if grad_output.shape() != cache.output().shape() {
            return Err(Error::Shape {
                op: "backward",
                left: grad_output.shape(),
                right: cache.output().shape(),
            });
        }
        Ok(())
    }

    /// [`Model::backward`] writing into existing gradient buffers. `grads`
    /// must be shaped like the model (see [`Gradients::zeros_like`]).
    pub fn backward_into(
        &self,
        cache: &ForwardCache,
        grad_output: &Matrix,
        grads: &mut Gradients,
        scratch: &mut BackwardScratch,
    ) -> Result<()> {
        self.check_cache(cache, grad_output)?;
        let n_layers = self.layers.len();
        let shaped = grads.layers.len() == n_layers
            && grads.layers.iter().zip(&self.layers).all(|(g, l)| {
                g.weights.shape() == l.weights.shape() && g.bias.as_ref().map(Vec::len) == l.bias.as_ref().map(Vec::len)
            });
        if !shaped {
            return Err(Error::InvalidArgument("gradient buffers do not match the model".into()));
        }
        let BackwardScratch { delta, upstream } = scratch;
        hadamard_into(delta, grad_output, &cache.slope[n_layers - 1]);
        for i in (0..n_layers).rev() {
            let layer = &self.layers[i];
            let input = if i == 0 { &cache.input } else { &cache.post[i - 1] };
            let g = &mut grads.layers[i];
            matmul_transpose_a_into(&mut g.weights, delta, input)?;
            if let Some(b) = &mut g.bias {
                delta.column_sums_into(b);
            }
            if i > 0 {
                matmul_into(upstream, delta, &layer.weights)?;
                hadamard_into(delta, upstream, &cache.slope[i - 1]);
            }
        }
        Ok(())
    }

    /// All parameters, per layer weights (row-major) then bias.
    pub fn parameters(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            out.extend_from_slice(layer.weights.data());
            if let Some(b) = &layer.bias {
                out.extend_from_slice(b);
            }
        }
        out
    }

    /// Inverse of [`Model::parameters`].
    pub fn set_parameters(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.param_count() {
            return Err(Error::Shape {
                op: "set_parameters",
                left: (values.len(), 1),
                right: (self.param_count(), 1),
            });
        }
        let mut offset = 0;
        for layer in &mut self.layers {
            let w = layer.weights.data_mut();
            w.copy_from_slice(&values[offset..offset + w.len()]);
            offset += w.len();
            if let Some(b) = &mut layer.bias {
                let len = b.len();
                b.copy_from_slice(&values[offset..offset + len]);
                offset += len;
            }
        }
        Ok(())
    }

    /// Mutable parameter tensors in [`Gradients::tensors`] order.
    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(2 * self.layers.len());
        for layer in &mut self.layers {
            out.push(layer.weights.data_mut());
            if let Some(b) = &mut layer.bias {
                out.push(b.as_mut_slice());
            }
        }
        out
    }
}

fn hadamard_into(out: &mut Matrix, a: &Matrix, b: &Matrix) {
    out.reshape_scratch(a.rows(), a.cols());
    for ((o, x), y) in out.data_mut().iter_mut().zip(a.data()).zip(b.data()) {
        *o = x * y;
    }
}
