//! Subcommand bodies: dataset assembly, training runs, redundancy analysis,
//! the DST baseline and sweeps. Each writes its artifacts into one directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use inr_core::analysis::{self, RedundancyReport};
use inr_core::classical::{dst2_truncated_reconstruct, nyquist_frequency};
use inr_core::data::{synth_audio, synth_circles_image, synth_occupancy, OccupancyGrid, SignalDataset, Tone};
use inr_core::network::build_model;
use inr_core::training::{train_with_clock, Clock};
use inr_core::{Error as CoreError, Matrix, Model, ModelSpec, Rng, RunReport};
use serde::Serialize;

use crate::checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
use crate::config::{ConfigError, ExperimentConfig, ModelKind, Task};
use crate::formats::{self, load_image, load_occupancy, load_wav, save_image, save_occupancy, save_wav, Image};
use crate::report::{self, SweepRow};

/// Failure classes, each with its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(String),
    #[error("data: {0}")]
    Data(String),
    #[error("{0}")]
    Diverged(String),
    #[error("io: {0}")]
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Io(_) => 1,
            RunError::Config(_) => 2,
            RunError::Data(_) => 3,
            RunError::Diverged(_) => 4,
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

fn io_err(e: impl std::fmt::Display) -> RunError {
    RunError::Io(e.to_string())
}

fn data_err(e: impl std::fmt::Display) -> RunError {
    RunError::Data(e.to_string())
}

struct WallClock(Instant);

impl Clock for WallClock {
    fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// A dataset plus the voxel grid it came from, for shape tasks.
pub struct LoadedData {
    pub dataset: SignalDataset,
    pub grid: Option<OccupancyGrid>,
}

pub fn load_data(cfg: &ExperimentConfig) -> Result<LoadedData, RunError> {
    let from_file = cfg.input.as_deref();
    let (dataset, grid) = match (cfg.task, from_file) {
        (Task::Audio, Some(path)) => (load_wav(path).map_err(data_err)?, None),
        (Task::Audio, None) => {
            let tones: Vec<Tone> = cfg
                .tones
                .iter()
                .map(|&[freq_hz, amplitude]| Tone { freq_hz, amplitude })
                .collect();
            (
                synth_audio(cfg.duration_s, cfg.sample_rate, &tones).map_err(data_err)?,
                None,
            )
        }
        (Task::Image, Some(path)) => (load_image(path).map_err(data_err)?, None),
        (Task::Image, None) => (synth_circles_image(cfg.image_size, cfg.rings).map_err(data_err)?, None),
        (Task::Shape, source) => {
            let grid = match source {
                Some(path) => load_occupancy(path).map_err(data_err)?,
                None => synth_occupancy(cfg.resolution, cfg.shape()).map_err(data_err)?,
            };
            (grid.to_dataset().map_err(data_err)?, Some(grid))
        }
    };
    Ok(LoadedData { dataset, grid })
}

pub fn build(cfg: &ExperimentConfig, dataset: &SignalDataset) -> Result<(ModelSpec, Model), RunError> {
    let spec = cfg.model_spec(
        dataset.coords.cols(),
        dataset.targets.cols(),
        nyquist_frequency(&dataset.sampling),
    )?;
    let model = build_model(&spec, &mut Rng::new(cfg.seed)).map_err(|e| RunError::Config(e.to_string()))?;
    Ok((spec, model))
}

/// Quality metrics of `pred` against the dataset targets.
pub fn metrics(task: Task, pred: &Matrix, dataset: &SignalDataset) -> Result<Vec<(&'static str, f64)>, RunError> {
    let targets = &dataset.targets;
    let mut out = vec![("mse", analysis::mse(pred, targets).map_err(data_err)?)];
    match task {
        Task::Audio => {}
        Task::Image => {
            out.push(("psnr", analysis::psnr(pred, targets, dataset.peak()).map_err(data_err)?));
            out.push((
                "ssim",
                analysis::ssim_global(pred, targets, dataset.peak()).map_err(data_err)?,
            ));
        }
        Task::Shape => out.push(("iou", analysis::iou(pred.data(), targets.data()).map_err(data_err)?)),
    }
    Ok(out)
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a ExperimentConfig,
    param_count: usize,
    samples: usize,
    f_nyquist: f64,
    metrics: Vec<(&'a str, f64)>,
    seconds: f64,
}

/// Result of one training run.
#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub output_dir: PathBuf,
    pub report: RunReport,
    pub metrics: Vec<(&'static str, f64)>,
    pub param_count: usize,
    pub model: Model,
}

impl TrainOutcome {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }
}

/// Builds, trains and evaluates without touching the filesystem.
pub fn fit(cfg: &ExperimentConfig, data: &LoadedData) -> Result<(ModelSpec, Model, RunReport, Matrix), RunError> {
    let (spec, mut model) = build(cfg, &data.dataset)?;
    let clock = WallClock(Instant::now());
    let report = train_with_clock(&mut model, &data.dataset, &cfg.train_config(), &clock).map_err(|e| match e {
        CoreError::Diverged { .. } => RunError::Diverged(e.to_string()),
        CoreError::InvalidArgument(_) => RunError::Config(e.to_string()),
        other => RunError::Data(other.to_string()),
    })?;
    let pred = model.predict(&data.dataset.coords).map_err(data_err)?;
    Ok((spec, model, report, pred))
}

/// `train`: writes the reconstruction, `metrics.csv`, `loss.csv`,
/// `manifest.json`, `config.toml` and `checkpoint.json`.
pub fn cmd_train(cfg: &ExperimentConfig) -> Result<TrainOutcome, RunError> {
    let data = load_data(cfg)?;
    let (spec, model, report, pred) = fit(cfg, &data)?;
    let metrics = metrics(cfg.task, &pred, &data.dataset)?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| RunError::Io(format!("{}: {e}", dir.display())))?;
    write_reconstruction(cfg, dir, &pred, &data)?;
    report::write_metrics(&dir.join("metrics.csv"), &metrics).map_err(io_err)?;
    report::write_loss_history(&dir.join("loss.csv"), &report).map_err(io_err)?;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: "train",
        config: cfg,
        param_count: model.param_count(),
        samples: data.dataset.len(),
        f_nyquist: nyquist_frequency(&data.dataset.sampling),
        metrics: metrics.clone(),
        seconds: report.total_seconds,
    };
    write_text(
        &dir.join("manifest.json"),
        &serde_json::to_string_pretty(&manifest).map_err(io_err)?,
    )?;
    write_text(&dir.join("config.toml"), &toml::to_string(cfg).map_err(io_err)?)?;
    save_checkpoint(
        &dir.join("checkpoint.json"),
        &Checkpoint::new(model.clone(), Some(spec)),
    )
    .map_err(io_err)?;
    Ok(TrainOutcome {
        output_dir: dir.clone(),
        param_count: model.param_count(),
        report,
        metrics,
        model,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), RunError> {
    fs::write(path, text).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))
}

fn write_reconstruction(cfg: &ExperimentConfig, dir: &Path, pred: &Matrix, data: &LoadedData) -> Result<(), RunError> {
    let ds = &data.dataset;
    match cfg.task {
        Task::Audio => {
            let rate = ds.sampling.sample_rate.unwrap_or(cfg.sample_rate).round() as u32;
            save_wav(&dir.join("reconstruction.wav"), pred.data(), rate).map_err(io_err)
        }
        Task::Image => {
            let ext = if pred.cols() == 3 { "ppm" } else { "pgm" };
            let image = Image::from_values(pred.clone(), &ds.sampling).map_err(data_err)?;
            save_image(&dir.join(format!("reconstruction.{ext}")), &image).map_err(io_err)
        }
        Task::Shape => {
            let resolution = data.grid.as_ref().map(|g| g.resolution).unwrap_or([cfg.resolution; 3]);
            let values = pred.data().iter().map(|&v| u8::from(v >= 0.5)).collect();
            let grid = OccupancyGrid::new(resolution, values).map_err(data_err)?;
            save_occupancy(&dir.join("reconstruction.occ"), &grid).map_err(io_err)
        }
    }
}

#[derive(Serialize)]
struct AnalysisSummary {
    checkpoints: Vec<String>,
    layer_index: usize,
    n_samples: usize,
    seed: u64,
    frobenius: Vec<f64>,
    /// Percentage drop from the first checkpoint to the second.
    reduction_percent: Option<f64>,
}

/// `analyze`: covariance of one hidden layer per checkpoint and, for two
/// checkpoints, the redundancy reduction of the second against the first.
pub fn cmd_analyze(
    checkpoints: &[PathBuf],
    layer_index: usize,
    n_samples: usize,
    seed: u64,
    output_dir: &Path,
) -> Result<(Vec<RedundancyReport>, Option<f64>), RunError> {
    if checkpoints.is_empty() || checkpoints.len() > 2 {
        return Err(RunError::Config(format!(
            "expected 1 or 2 checkpoints, got {}",
            checkpoints.len()
        )));
    }
    let models = checkpoints
        .iter()
        .map(|p| load_checkpoint(p).map(|c| c.model).map_err(data_err))
        .collect::<Result<Vec<_>, _>>()?;
    if let [a, b] = &models[..] {
        if a.hidden_widths() != b.hidden_widths() || a.input_dim != b.input_dim {
            return Err(RunError::Config(format!(
                "incompatible checkpoints: hidden widths {:?} vs {:?}",
                a.hidden_widths(),
                b.hidden_widths()
            )));
        }
    }
    let reports = models
        .iter()
        .map(|m| analysis::hidden_covariance(m, layer_index, &mut Rng::new(seed), n_samples))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| RunError::Config(format!("--layer/--samples: {e}")))?;
    let reduction = match &reports[..] {
        [base, fm] => Some(analysis::redundancy_reduction(base, fm).map_err(data_err)?),
        _ => None,
    };
    fs::create_dir_all(output_dir).map_err(io_err)?;
    for (i, r) in reports.iter().enumerate() {
        report::write_matrix(&output_dir.join(format!("covariance-{i}.csv")), &r.covariance).map_err(io_err)?;
    }
    let summary = AnalysisSummary {
        checkpoints: checkpoints.iter().map(|p| p.display().to_string()).collect(),
        layer_index,
        n_samples,
        seed,
        frobenius: reports.iter().map(|r| r.frobenius).collect(),
        reduction_percent: reduction,
    };
    write_text(
        &output_dir.join("redundancy.json"),
        &serde_json::to_string_pretty(&summary).map_err(io_err)?,
    )?;
    Ok((reports, reduction))
}

/// `dst`: truncated 2-D DST reconstruction keeping the `m` largest
/// coefficients of each channel.
pub fn cmd_dst(dataset: &SignalDataset, m: usize, output_dir: &Path) -> Result<Vec<(&'static str, f64)>, RunError> {
    let [h, w] = dataset.sampling.sample_counts[..] else {
        return Err(RunError::Data("the DST baseline needs a 2-D image".into()));
    };
    if m == 0 || m > h * w {
        return Err(RunError::Config(format!(
            "--coefficients must be in 1..={}, got {m}",
            h * w
        )));
    }
    let recon = dst_reconstruct(dataset, m)?;
    let mut metrics = metrics(Task::Image, &recon, dataset)?;
    metrics.push(("coefficients", m as f64));
    fs::create_dir_all(output_dir).map_err(io_err)?;
    let ext = if recon.cols() == 3 { "ppm" } else { "pgm" };
    let image = Image::from_values(recon, &dataset.sampling).map_err(data_err)?;
    save_image(&output_dir.join(format!("reconstruction.{ext}")), &image).map_err(io_err)?;
    report::write_metrics(&output_dir.join("metrics.csv"), &metrics).map_err(io_err)?;
    Ok(metrics)
}

pub fn dst_reconstruct(dataset: &SignalDataset, m: usize) -> Result<Matrix, RunError> {
    let [h, w] = dataset.sampling.sample_counts[..] else {
        return Err(RunError::Data("the DST baseline needs a 2-D image".into()));
    };
    let channels = dataset.targets.cols();
    let mut out = Matrix::zeros(h * w, channels);
    for c in 0..channels {
        let plane = Matrix::from_fn(h, w, |r, col| dataset.targets.get(r * w + col, c));
        let rec = dst2_truncated_reconstruct(&plane, m).map_err(|e| RunError::Config(e.to_string()))?;
        for (i, v) in rec.data().iter().enumerate() {
            out.set(i, c, *v);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepAxis {
    Width,
    Depth,
    NyquistFactor,
}

fn apply_axis(base: &ExperimentConfig, axis: SweepAxis, value: f64) -> Result<ExperimentConfig, RunError> {
    let mut cfg = base.clone();
    let as_count = |v: f64| {
        if v >= 1.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(RunError::Config(format!("--values: {v} is not a positive integer")))
        }
    };
    match axis {
        SweepAxis::Width => cfg.width = as_count(value)?,
        SweepAxis::Depth => cfg.depth = as_count(value)?,
        SweepAxis::NyquistFactor => cfg.nyquist_factor = value,
    }
    cfg.output_dir = base.output_dir.join(format!("{}-{value}", axis_name(axis)));
    cfg.validate()?;
    Ok(cfg)
}

pub fn axis_name(axis: SweepAxis) -> &'static str {
    match axis {
        SweepAxis::Width => "width",
        SweepAxis::Depth => "depth",
        SweepAxis::NyquistFactor => "nyquist-factor",
    }
}

/// `sweep`: one seeded run per value, each in its own subdirectory, plus
/// `sweep.csv` in the base output directory.
pub fn cmd_sweep(base: &ExperimentConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepRow>, RunError> {
    if values.is_empty() {
        return Err(RunError::Config("--values must list at least one value".into()));
    }
    if base.model == ModelKind::Pe && axis == SweepAxis::NyquistFactor {
        return Err(RunError::Config("--axis nyquist-factor needs an FM model".into()));
    }
    let configs = values
        .iter()
        .map(|&v| apply_axis(base, axis, v))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::with_capacity(values.len());
    for (cfg, &value) in configs.iter().zip(values) {
        let out = cmd_train(cfg)?;
        rows.push(SweepRow {
            value,
            final_loss: out.report.history.last().map_or(f64::NAN, |r| r.loss),
            mse: out.report.final_mse,
            quality: out.metric("psnr").or(out.metric("iou")),
            seconds: out.report.total_seconds,
            param_count: out.param_count,
        });
    }
    fs::create_dir_all(&base.output_dir).map_err(io_err)?;
    report::write_sweep(&base.output_dir.join("sweep.csv"), &rows).map_err(io_err)?;
    Ok(rows)
}

/// Loads an image file or draws the synthetic circles image.
pub fn image_source(input: Option<&Path>, size: usize, rings: usize) -> Result<SignalDataset, RunError> {
    match input {
        Some(path) => formats::load_image(path).map_err(data_err),
        None => synth_circles_image(size, rings).map_err(data_err),
    }
}
