//! Experiment configuration: per-task defaults, a TOML file layer, and
//! command-line overrides.

use std::path::{Path, PathBuf};

use inr_core::activations::PositionalEncodingSpec;
use inr_core::data::Shape;
use inr_core::training::BatchSize;
use inr_core::{ActivationKind, FmOptions, ModelSpec, TrainConfig};
use serde::{Deserialize, Serialize};

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_ENV: &str = "INR_OUTPUT_ROOT";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Audio,
    Image,
    Shape,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Siren,
    Finer,
    FmSiren,
    FmFiner,
    Gauss,
    /// ReLU MLP behind a positional encoding.
    Pe,
}

impl ModelKind {
    pub fn activation(self) -> ActivationKind {
        match self {
            ModelKind::Siren => ActivationKind::Sine,
            ModelKind::Finer => ActivationKind::Finer,
            ModelKind::FmSiren => ActivationKind::FmSine,
            ModelKind::FmFiner => ActivationKind::FmFiner,
            ModelKind::Gauss => ActivationKind::Gauss,
            ModelKind::Pe => ActivationKind::Relu,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeKind {
    Sphere,
    Torus,
}

/// Fully resolved settings; every default is materialized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub task: Task,
    pub model: ModelKind,
    /// Neurons per hidden layer.
    pub width: usize,
    /// Hidden layers. Positional-encoding models add one biasless projection
    /// layer in front.
    pub depth: usize,
    pub omega0: f64,
    pub hidden_omega0: f64,
    pub gauss_scale: f64,
    pub pe_scale: usize,
    pub embed_size: usize,
    pub nyquist_factor: f64,
    pub angular_scale: f64,
    pub k_offset: usize,
    pub first_layer_only: bool,
    pub learning_rate: f64,
    pub epochs: usize,
    pub lr_decay_gamma: f64,
    pub lr_decay_every: usize,
    /// 0 trains on the full dataset each step.
    pub batch_size: usize,
    pub seed: u64,
    /// WAV, PGM/PPM or occupancy file; synthetic data when absent.
    pub input: Option<PathBuf>,
    pub duration_s: f64,
    pub sample_rate: f64,
    /// `[freq_hz, amplitude]` pairs.
    pub tones: Vec<[f64; 2]>,
    pub image_size: usize,
    pub rings: usize,
    pub shape: ShapeKind,
    pub radius: f64,
    pub major_radius: f64,
    pub minor_radius: f64,
    pub resolution: usize,
    pub output_dir: PathBuf,
}

/// Partial settings from a config file or the command line.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub task: Option<Task>,
    pub model: Option<ModelKind>,
    pub width: Option<usize>,
    pub depth: Option<usize>,
    pub omega0: Option<f64>,
    pub hidden_omega0: Option<f64>,
    pub gauss_scale: Option<f64>,
    pub pe_scale: Option<usize>,
    pub embed_size: Option<usize>,
    pub nyquist_factor: Option<f64>,
    pub angular_scale: Option<f64>,
    pub k_offset: Option<usize>,
    pub first_layer_only: Option<bool>,
    pub learning_rate: Option<f64>,
    pub epochs: Option<usize>,
    pub lr_decay_gamma: Option<f64>,
    pub lr_decay_every: Option<usize>,
    pub batch_size: Option<usize>,
    pub seed: Option<u64>,
    pub input: Option<PathBuf>,
    pub duration_s: Option<f64>,
    pub sample_rate: Option<f64>,
    pub tones: Option<Vec<[f64; 2]>>,
    pub image_size: Option<usize>,
    pub rings: Option<usize>,
    pub shape: Option<ShapeKind>,
    pub radius: Option<f64>,
    pub major_radius: Option<f64>,
    pub minor_radius: Option<f64>,
    pub resolution: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

macro_rules! overlay {
    ($base:ident, $top:ident, $($field:ident),* $(,)?) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )*
    };
}

impl Settings {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(format!("config file: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }

    /// Values set in `top` win.
    pub fn overlay(&mut self, top: &Settings) {
        overlay!(
            self,
            top,
            task,
            model,
            width,
            depth,
            omega0,
            hidden_omega0,
            gauss_scale,
            pe_scale,
            embed_size,
            nyquist_factor,
            angular_scale,
            k_offset,
            first_layer_only,
            learning_rate,
            epochs,
            lr_decay_gamma,
            lr_decay_every,
            batch_size,
            seed,
            input,
            duration_s,
            sample_rate,
            tones,
            image_size,
            rings,
            shape,
            radius,
            major_radius,
            minor_radius,
            resolution,
            output_dir,
        );
    }

    /// Fills every unset field from the task defaults. `output_root` is used
    /// when no output directory is given.
    pub fn resolve(&self, output_root: Option<&Path>) -> Result<ExperimentConfig, ConfigError> {
        let task = self.task.unwrap_or(Task::Image);
        let model = self.model.unwrap_or(ModelKind::FmSiren);
        let d = TaskDefaults::of(task, model);
        let seed = self.seed.unwrap_or(0);
        let output_dir = self.output_dir.clone().unwrap_or_else(|| {
            let root = output_root
                .map(Path::to_path_buf)
                .unwrap_or_else(|| PathBuf::from("runs"));
            root.join(format!("{}-{}-seed{seed}", task_name(task), model_name(model)))
        });
        let cfg = ExperimentConfig {
            task,
            model,
            width: self.width.unwrap_or(256),
            depth: self.depth.unwrap_or(d.depth),
            omega0: self.omega0.unwrap_or(d.omega0),
            hidden_omega0: self.hidden_omega0.or(self.omega0).unwrap_or(d.omega0),
            gauss_scale: self.gauss_scale.unwrap_or(16.0),
            pe_scale: self.pe_scale.unwrap_or(15),
            embed_size: self.embed_size.unwrap_or(256),
            nyquist_factor: self
                .nyquist_factor
                .unwrap_or(if model == ModelKind::FmFiner { 2.0 / 3.0 } else { 1.0 }),
            angular_scale: self.angular_scale.unwrap_or(DEFAULT_ANGULAR_SCALE),
            k_offset: self.k_offset.unwrap_or(0),
            first_layer_only: self.first_layer_only.unwrap_or(false),
            learning_rate: self.learning_rate.unwrap_or(d.learning_rate),
            epochs: self.epochs.unwrap_or(d.epochs),
            lr_decay_gamma: self.lr_decay_gamma.unwrap_or(0.1),
            lr_decay_every: self.lr_decay_every.unwrap_or(100),
            batch_size: self.batch_size.unwrap_or(d.batch_size),
            seed,
            input: self.input.clone(),
            duration_s: self.duration_s.unwrap_or(1.0),
            sample_rate: self.sample_rate.unwrap_or(4000.0),
            tones: self
                .tones
                .clone()
                .unwrap_or_else(|| vec![[200.0, 0.5], [650.0, 0.3], [1500.0, 0.2]]),
            image_size: self.image_size.unwrap_or(64),
            rings: self.rings.unwrap_or(24),
            shape: self.shape.unwrap_or(ShapeKind::Sphere),
            radius: self.radius.unwrap_or(0.5),
            major_radius: self.major_radius.unwrap_or(0.5),
            minor_radius: self.minor_radius.unwrap_or(0.2),
            resolution: self.resolution.unwrap_or(64),
            output_dir,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Ladder multipliers are converted from cycles per signal to radians over
/// the `[-1, 1]` coordinate span.
pub const DEFAULT_ANGULAR_SCALE: f64 = std::f64::consts::PI;

/// Shape-task mini-batch size.
pub const SHAPE_BATCH: usize = 16_384;

struct TaskDefaults {
    omega0: f64,
    learning_rate: f64,
    depth: usize,
    epochs: usize,
    batch_size: usize,
}

impl TaskDefaults {
    fn of(task: Task, model: ModelKind) -> Self {
        match task {
            Task::Audio => Self {
                omega0: match model {
                    ModelKind::Finer | ModelKind::FmFiner => 700.0,
                    _ => 800.0,
                },
                learning_rate: 1e-4,
                depth: 2,
                epochs: 500,
                batch_size: 0,
            },
            Task::Image => Self {
                omega0: 30.0,
                learning_rate: 1e-3,
                depth: 2,
                epochs: 500,
                batch_size: 0,
            },
            Task::Shape => Self {
                omega0: 30.0,
                learning_rate: 1e-3,
                depth: 3,
                epochs: 75,
                batch_size: SHAPE_BATCH,
            },
        }
    }
}

pub fn task_name(task: Task) -> &'static str {
    match task {
        Task::Audio => "audio",
        Task::Image => "image",
        Task::Shape => "shape",
    }
}

pub fn model_name(model: ModelKind) -> &'static str {
    match model {
        ModelKind::Siren => "siren",
        ModelKind::Finer => "finer",
        ModelKind::FmSiren => "fm-siren",
        ModelKind::FmFiner => "fm-finer",
        ModelKind::Gauss => "gauss",
        ModelKind::Pe => "pe",
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError(msg));
        if self.width == 0 || self.depth == 0 {
            return fail(format!(
                "--width and --depth must be positive, got {} and {}",
                self.width, self.depth
            ));
        }
        if !(self.nyquist_factor > 0.0 && self.nyquist_factor <= 1.0) {
            return fail(format!(
                "--nyquist-factor must be in (0, 1], got {}",
                self.nyquist_factor
            ));
        }
        if !(self.angular_scale > 0.0 && self.angular_scale.is_finite()) {
            return fail(format!("--angular-scale must be positive, got {}", self.angular_scale));
        }
        for (flag, v) in [
            ("--omega0", self.omega0),
            ("--hidden-omega0", self.hidden_omega0),
            ("--gauss-scale", self.gauss_scale),
            ("--learning-rate", self.learning_rate),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("{flag} must be positive, got {v}"));
            }
        }
        if self.pe_scale == 0 || self.embed_size < 2 {
            return fail(format!(
                "--pe-scale {} / --embed-size {} too small",
                self.pe_scale, self.embed_size
            ));
        }
        self.train_config()
            .validate()
            .map_err(|e| ConfigError(format!("training settings: {e}")))?;
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            lr_decay_gamma: self.lr_decay_gamma,
            lr_decay_every: self.lr_decay_every,
            batch_size: if self.batch_size == 0 {
                BatchSize::Full
            } else {
                BatchSize::Size(self.batch_size)
            },
            seed: self.seed,
            ..TrainConfig::default()
        }
    }

    pub fn fm_options(&self) -> FmOptions {
        FmOptions {
            nyquist_factor: self.nyquist_factor,
            angular_scale: self.angular_scale,
            k_offset: self.k_offset,
            first_layer_only: self.first_layer_only,
        }
    }

    pub fn shape(&self) -> Shape {
        match self.shape {
            ShapeKind::Sphere => Shape::Sphere { radius: self.radius },
            ShapeKind::Torus => Shape::Torus {
                major: self.major_radius,
                minor: self.minor_radius,
            },
        }
    }

    pub fn model_spec(&self, input_dim: usize, output_dim: usize, f_nyquist: f64) -> Result<ModelSpec, ConfigError> {
        let mut hidden = vec![self.width; self.depth];
        let mut spec_encoder = None;
        if self.model == ModelKind::Pe {
            let enc = PositionalEncodingSpec::for_embedding(input_dim, self.embed_size, self.pe_scale)
                .map_err(|e| ConfigError(format!("--embed-size: {e}")))?;
            spec_encoder = Some(enc);
            hidden.push(self.width);
        }
        let mut spec = ModelSpec::new(input_dim, hidden, output_dim, self.model.activation());
        spec.first_omega0 = self.omega0;
        spec.hidden_omega0 = self.hidden_omega0;
        spec.gauss_scale = self.gauss_scale;
        spec.f_nyquist = Some(f_nyquist);
        spec.fm = self.fm_options();
        spec.encoder = spec_encoder;
        Ok(spec)
    }
}
