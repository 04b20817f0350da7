//! Coordinate networks with periodic activations.
//!
//! This crate holds the numerical side of the toolkit: a dense `f64` matrix,
//! the activation families (fixed-frequency sine, FINER chirps, Gaussian and
//! the per-neuron Nyquist-spaced frequency multipliers), an MLP with an
//! explicit reverse pass, Adam training, the discrete sine transform baseline,
//! quality metrics and the hidden-feature covariance analysis.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, checkpoints and
//! the command-line tool live in `inr-tools`.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod activations;
pub mod analysis;
pub mod classical;
pub mod data;
mod error;
mod fastmath;
pub mod network;
pub mod numerics;
pub mod training;

pub use activations::{ActivationKind, ActivationSpec, FmOptions, PositionalEncodingSpec};
pub use error::{Error, Result};
pub use network::{BackwardScratch, ForwardCache, Gradients, Layer, Model, ModelSpec};
pub use numerics::{Matrix, Rng};
pub use training::{adam_step, AdamState, BatchSize, RunReport, TrainConfig};
