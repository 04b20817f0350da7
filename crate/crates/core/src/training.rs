//! MSE loss, Adam, the step learning-rate schedule and the epoch loop.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::data::SignalDataset;
use crate::network::{BackwardScratch, ForwardCache, Gradients, Model};
use crate::numerics::{Matrix, Rng};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum BatchSize {
    Full,
    Size(usize),
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub lr_decay_gamma: f64,
    pub lr_decay_every: usize,
    pub batch_size: BatchSize,
    pub seed: u64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            epochs: 500,
            lr_decay_gamma: 0.1,
            lr_decay_every: 100,
            batch_size: BatchSize::Full,
            seed: 0,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("train config: {what}")));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(self.lr_decay_gamma > 0.0 && self.lr_decay_gamma <= 1.0) {
            return bad("lr_decay_gamma must be in (0, 1]");
        }
        if self.lr_decay_every == 0 {
            return bad("lr_decay_every must be at least 1");
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return bad("adam betas must be in [0, 1)");
        }
        if !(self.adam_eps > 0.0) {
            return bad("adam_eps must be positive");
        }
        if self.batch_size == BatchSize::Size(0) {
            return bad("batch size must be at least 1");
        }
        Ok(())
    }
}

/// `lr₀ · γ^⌊epoch / every⌋`, applied as repeated multiplication like a
/// step scheduler does.
pub fn scheduled_lr(config: &TrainConfig, epoch: usize) -> f64 {
    let decays = epoch / config.lr_decay_every.max(1);
    let mut lr = config.learning_rate;
    for _ in 0..decays {
        lr *= config.lr_decay_gamma;
    }
    lr
}

/// Mean squared error over all elements and its gradient `2 (pred - target) / N`.
pub fn mse_loss(pred: &Matrix, target: &Matrix) -> Result<(f64, Matrix)> {
    if pred.shape() != target.shape() {
        return Err(Error::Shape {
            op: "mse_loss",
            left: pred.shape(),
            right: target.shape(),
        });
    }
    let n = pred.data().len();
    if n == 0 {
        return Ok((0.0, Matrix::zeros(pred.rows(), pred.cols())));
    }
    let scale = 2.0 / n as f64;
    let mut sum = 0.0;
    let grad: Vec<f64> = pred
        .data()
        .iter()
        .zip(target.data())
        .map(|(p, t)| {
            let d = p - t;
            sum += d * d;
            scale * d
        })
        .collect();
    Ok((sum / n as f64, Matrix::new(pred.rows(), pred.cols(), grad)?))
}

/// Adam moments for a list of parameter tensors.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AdamState {
    pub m: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub t: u64,
    beta1: f64,
    beta2: f64,
    eps: f64,
}

impl AdamState {
    pub fn new(beta1: f64, beta2: f64, eps: f64) -> Self {
        Self {
            m: Vec::new(),
            v: Vec::new(),
            t: 0,
            beta1,
            beta2,
            eps,
        }
    }

    pub fn from_config(config: &TrainConfig) -> Self {
        Self::new(config.adam_beta1, config.adam_beta2, config.adam_eps)
    }

    /// One bias-corrected Adam update of every tensor.
    pub fn step(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]], lr: f64) -> Result<()> {
        if params.len() != grads.len() {
            return Err(Error::Shape {
                op: "adam_step",
                left: (params.len(), 0),
                right: (grads.len(), 0),
            });
        }
        for (i, (p, g)) in params.iter().zip(grads).enumerate() {
            if p.len() != g.len() {
                return Err(Error::Shape {
                    op: "adam_step",
                    left: (i, p.len()),
                    right: (i, g.len()),
                });
            }
        }
        if self.m.is_empty() {
            self.m = params.iter().map(|p| vec![0.0; p.len()]).collect();
            self.v = self.m.clone();
        } else if self.m.len() != params.len() || self.m.iter().zip(params.iter()).any(|(m, p)| m.len() != p.len()) {
            return Err(Error::InvalidArgument(
                "adam state does not match the parameters".into(),
            ));
        }
        self.t += 1;
        let (b1, b2) = (self.beta1, self.beta2);
        let t = self.t as i32;
        let corr1 = 1.0 - libm::pow(b1, t as f64);
        let corr2 = 1.0 - libm::pow(b2, t as f64);
        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            for i in 0..p.len() {
                let gi = g[i];
                m[i] = b1 * m[i] + (1.0 - b1) * gi;
                v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
                let m_hat = m[i] / corr1;
                let v_hat = v[i] / corr2;
                p[i] -= lr * m_hat / (libm::sqrt(v_hat) + self.eps);
            }
        }
        Ok(())
    }
}

/// Free-function form of [`AdamState::step`].
pub fn adam_step(state: &mut AdamState, params: &mut [&mut [f64]], grads: &[&[f64]], lr: f64) -> Result<()> {
    state.step(params, grads, lr)
}

/// Elapsed-time source, so the loop stays usable without `std`.
pub trait Clock {
    fn seconds(&self) -> f64;
}

/// Reports zero elapsed time.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn seconds(&self) -> f64 {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpochRecord {
    pub epoch: usize,
    pub lr: f64,
    /// Mean training loss over the epoch's batches, before their updates.
    pub loss: f64,
    /// Wall time of the epoch.
    pub seconds: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunReport {
    pub history: Vec<EpochRecord>,
    /// MSE of the trained model on the whole dataset.
    pub final_mse: f64,
    pub total_seconds: f64,
}

impl RunReport {
    pub fn losses(&self) -> Vec<f64> {
        self.history.iter().map(|r| r.loss).collect()
    }
}

pub fn train(model: &mut Model, dataset: &SignalDataset, config: &TrainConfig) -> Result<RunReport> {
    train_with_clock(model, dataset, config, &NoClock)
}

/// Runs `config.epochs` epochs of forward, MSE, backward and Adam.
pub fn train_with_clock(
    model: &mut Model,
    dataset: &SignalDataset,
    config: &TrainConfig,
    clock: &dyn Clock,
) -> Result<RunReport> {
    config.validate()?;
    let coords = &dataset.coords;
    let targets = &dataset.targets;
    if coords.cols() != model.input_dim || targets.cols() != model.output_dim() || coords.rows() != targets.rows() {
        return Err(Error::Shape {
            op: "train",
            left: (coords.rows(), coords.cols()),
            right: (targets.rows(), targets.cols()),
        });
    }
    let n = coords.rows();
    let mut rng = Rng::new(config.seed);
    let mut adam = AdamState::from_config(config);
    let mut order: Vec<usize> = (0..n).collect();
    let mut history = Vec::with_capacity(config.epochs);
    let mut buffers = StepBuffers::new(model);
    let start = clock.seconds();

    for epoch in 0..config.epochs {
        let epoch_start = clock.seconds();
        let lr = scheduled_lr(config, epoch);
        let loss = match config.batch_size {
            BatchSize::Size(b) if b < n => {
                rng.shuffle(&mut order);
                let mut total = 0.0;
                for chunk in order.chunks(b) {
                    let x = coords.select_rows(chunk);
                    let y = targets.select_rows(chunk);
                    total += step(model, &mut adam, &mut buffers, &x, &y, lr)? * chunk.len() as f64;
                }
                total / n as f64
            }
            _ => step(model, &mut adam, &mut buffers, coords, targets, lr)?,
        };
        if !loss.is_finite() {
            return Err(Error::Diverged { epoch, loss });
        }
        history.push(EpochRecord {
            epoch,
            lr,
            loss,
            seconds: clock.seconds() - epoch_start,
        });
    }
    if model.parameters().iter().any(|p| !p.is_finite()) {
        return Err(Error::Diverged {
            epoch: config.epochs.saturating_sub(1),
            loss: f64::NAN,
        });
    }
    let final_mse = mse_loss(&model.predict(coords)?, targets)?.0;
    Ok(RunReport {
        history,
        final_mse,
        total_seconds: clock.seconds() - start,
    })
}

struct StepBuffers {
    cache: ForwardCache,
    grads: Gradients,
    scratch: BackwardScratch,
}

impl StepBuffers {
    fn new(model: &Model) -> Self {
        Self {
            cache: ForwardCache::default(),
            grads: Gradients::zeros_like(model),
            scratch: BackwardScratch::default(),
        }
    }
}

fn step(
    model: &mut Model,
    adam: &mut AdamState,
    buffers: &mut StepBuffers,
    x: &Matrix,
    y: &Matrix,
    lr: f64,
) -> Result<f64> {
    model.forward_into(x, &mut buffers.cache)?;
    let (loss, grad) = mse_loss(buffers.cache.output(), y)?;
    if !loss.is_finite() {
        return Ok(loss);
    }
    model.backward_into(&buffers.cache, &grad, &mut buffers.grads, &mut buffers.scratch)?;
    adam.step(&mut model.tensors_mut(), &buffers.grads.tensors(), lr)?;
    Ok(loss)
}
