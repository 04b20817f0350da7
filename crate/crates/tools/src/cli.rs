//! Command-line surface of `inr`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use inr_core::analysis::DEFAULT_REDUNDANCY_SAMPLES;

use crate::config::{ModelKind, Settings, ShapeKind, Task, OUTPUT_ROOT_ENV};
use crate::run::{self, RunError, SweepAxis};

#[derive(Debug, Parser)]
#[command(
    name = "inr",
    version,
    about = "Fit coordinate networks to audio, images and occupancy grids"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one model and write its artifacts.
    Train(TrainArgs),
    /// Hidden-feature covariance of one or two checkpoints.
    Analyze(AnalyzeArgs),
    /// Truncated 2-D discrete sine transform baseline.
    Dst(DstArgs),
    /// One training run per value of a single hyperparameter.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub settings: SettingsArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub axis: SweepAxis,
    /// Comma-separated values, e.g. `128,256` or `0.5,1`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
    #[command(flatten)]
    pub settings: SettingsArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// One checkpoint, or a baseline followed by the model to compare.
    #[arg(required = true, num_args = 1..=2)]
    pub checkpoints: Vec<PathBuf>,
    /// Hidden layer index, 0 for the first.
    #[arg(long, default_value_t = 0)]
    pub layer: usize,
    /// Uniform coordinate samples on `[-1, 1]^d`.
    #[arg(long, default_value_t = DEFAULT_REDUNDANCY_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DstArgs {
    /// Coefficients kept per channel.
    #[arg(long, short = 'm')]
    pub coefficients: usize,
    /// PGM/PPM image; the synthetic circles image when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Side of the synthetic image, pixels.
    #[arg(long, default_value_t = 64)]
    pub image_size: usize,
    #[arg(long, default_value_t = 24)]
    pub rings: usize,
    #[arg(long, short)]
    pub output_dir: Option<PathBuf>,
}

/// Flags shared by `train` and `sweep`; each overrides the config file.
#[derive(Debug, Default, Args)]
pub struct SettingsArgs {
    /// TOML file with the same keys as the flags (snake_case).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub task: Option<Task>,
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Neurons per hidden layer.
    #[arg(long)]
    pub width: Option<usize>,
    /// Hidden layers.
    #[arg(long)]
    pub depth: Option<usize>,
    /// First-layer ω₀, radians per unit coordinate.
    #[arg(long)]
    pub omega0: Option<f64>,
    /// ω₀ of later layers; defaults to --omega0.
    #[arg(long)]
    pub hidden_omega0: Option<f64>,
    #[arg(long)]
    pub gauss_scale: Option<f64>,
    /// Highest positional-encoding level.
    #[arg(long)]
    pub pe_scale: Option<usize>,
    /// Positional-encoding feature count.
    #[arg(long)]
    pub embed_size: Option<usize>,
    /// Fraction of the Nyquist frequency the multiplier ladder reaches, in (0, 1].
    #[arg(long)]
    pub nyquist_factor: Option<f64>,
    /// Multiplier unit conversion; π turns cycles per signal into radians per unit.
    #[arg(long)]
    pub angular_scale: Option<f64>,
    #[arg(long)]
    pub k_offset: Option<usize>,
    #[arg(long)]
    pub first_layer_only: Option<bool>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr_decay_gamma: Option<f64>,
    /// Epochs between learning-rate decays.
    #[arg(long)]
    pub lr_decay_every: Option<usize>,
    /// Samples per step; 0 for the whole dataset.
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// WAV, PGM/PPM or occupancy grid file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Synthetic clip length, seconds.
    #[arg(long)]
    pub duration: Option<f64>,
    /// Synthetic clip sampling rate, Hz.
    #[arg(long)]
    pub sample_rate: Option<f64>,
    /// Synthetic tone `HZ:AMPLITUDE`; repeat for several.
    #[arg(long = "tone", value_parser = parse_tone)]
    pub tones: Vec<[f64; 2]>,
    /// Side of the synthetic image, pixels.
    #[arg(long)]
    pub image_size: Option<usize>,
    #[arg(long)]
    pub rings: Option<usize>,
    #[arg(long, value_enum)]
    pub shape: Option<ShapeKind>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub major_radius: Option<f64>,
    #[arg(long)]
    pub minor_radius: Option<f64>,
    /// Voxels per axis of the synthetic grid.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Run directory; defaults to `$INR_OUTPUT_ROOT/<task>-<model>-seed<n>`.
    #[arg(long, short)]
    pub output_dir: Option<PathBuf>,
}

fn parse_tone(s: &str) -> Result<[f64; 2], String> {
    let (f, a) = s
        .split_once(':')
        .ok_or_else(|| format!("expected HZ:AMPLITUDE, got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok([num(f)?, num(a)?])
}

impl SettingsArgs {
    fn flags(&self) -> Settings {
        Settings {
            task: self.task,
            model: self.model,
            width: self.width,
            depth: self.depth,
            omega0: self.omega0,
            hidden_omega0: self.hidden_omega0,
            gauss_scale: self.gauss_scale,
            pe_scale: self.pe_scale,
            embed_size: self.embed_size,
            nyquist_factor: self.nyquist_factor,
            angular_scale: self.angular_scale,
            k_offset: self.k_offset,
            first_layer_only: self.first_layer_only,
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            lr_decay_gamma: self.lr_decay_gamma,
            lr_decay_every: self.lr_decay_every,
            batch_size: self.batch_size,
            seed: self.seed,
            input: self.input.clone(),
            duration_s: self.duration,
            sample_rate: self.sample_rate,
            tones: (!self.tones.is_empty()).then(|| self.tones.clone()),
            image_size: self.image_size,
            rings: self.rings,
            shape: self.shape,
            radius: self.radius,
            major_radius: self.major_radius,
            minor_radius: self.minor_radius,
            resolution: self.resolution,
            output_dir: self.output_dir.clone(),
        }
    }

    /// File values, then flags on top, then task defaults.
    pub fn resolve(&self) -> Result<crate::config::ExperimentConfig, RunError> {
        let mut settings = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        settings.overlay(&self.flags());
        Ok(settings.resolve(output_root().as_deref())?)
    }
}

fn output_root() -> Option<PathBuf> {
    std::env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from)
}

fn default_dir(name: &str) -> PathBuf {
    output_root().unwrap_or_else(|| PathBuf::from("runs")).join(name)
}

pub fn execute(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Train(args) => {
            let cfg = args.settings.resolve()?;
            let out = run::cmd_train(&cfg)?;
            let shown: Vec<String> = out.metrics.iter().map(|(k, v)| format!("{k}={v:.6e}")).collect();
            println!("{} {}", out.output_dir.display(), shown.join(" "));
        }
        Command::Analyze(args) => {
            let dir = args.output_dir.unwrap_or_else(|| default_dir("analysis"));
            let (reports, reduction) = run::cmd_analyze(&args.checkpoints, args.layer, args.samples, args.seed, &dir)?;
            for (path, r) in args.checkpoints.iter().zip(&reports) {
                println!(
                    "{}: layer {} frobenius {:.6}",
                    path.display(),
                    r.layer_index,
                    r.frobenius
                );
            }
            if let Some(pct) = reduction {
                println!("redundancy reduction: {pct:.2}%");
            }
        }
        Command::Dst(args) => {
            let dataset = run::image_source(args.input.as_deref(), args.image_size, args.rings)?;
            let dir = args.output_dir.unwrap_or_else(|| default_dir("dst"));
            let metrics = run::cmd_dst(&dataset, args.coefficients, &dir)?;
            let shown: Vec<String> = metrics.iter().map(|(k, v)| format!("{k}={v}")).collect();
            println!("{} {}", dir.display(), shown.join(" "));
        }
        Command::Sweep(args) => {
            let cfg = args.settings.resolve()?;
            let rows = run::cmd_sweep(&cfg, args.axis, &args.values)?;
            for r in rows {
                println!(
                    "{}={} loss={:.6e} mse={:.6e} params={}",
                    run::axis_name(args.axis),
                    r.value,
                    r.final_loss,
                    r.mse,
                    r.param_count
                );
            }
        }
    }
    Ok(())
}

/// Parses the process arguments, runs, and maps failures to exit codes with a
/// one-line diagnostic on standard error.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("inr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
