use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use clustrack::appearance::AppearanceMode;
use clustrack::geometry::SpatialMetric;
use clustrack::runner::{self, SweepGrid};
use clustrack::synthgen::Scenario;
use clustrack::{Preset, TrackerConfig};

#[derive(Parser)]
#[command(name = "clustrack", version, about = "Offline multi-object tracking by tracklet clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track a sequence from a detection file and embedding sidecar.
    Track(TrackArgs),
    /// Evaluate a result file against ground truth (CLEAR + IDF1).
    Eval(EvalArgs),
    /// Generate a synthetic scenario (gt.txt, det.txt, emb.bin).
    Synth(SynthArgs),
    /// Run a parameter sweep over a synthetic scenario, emitting CSV.
    Sweep(SweepArgs),
}

/// Tracker configuration flags; precedence is preset < config file < flags.
#[derive(Args, Debug, Clone)]
struct ConfigArgs {
    /// Dataset preset: mot17, mot20 or dancetrack.
    #[arg(long)]
    preset: Option<Preset>,
    /// TOML config file overriding the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    beta_f: Option<f64>,
    #[arg(long)]
    off: Option<f64>,
    /// Detection confidence threshold.
    #[arg(long)]
    sigma: Option<f64>,
    /// Separate EMA confidence threshold (defaults to sigma).
    #[arg(long)]
    ema_sigma: Option<f64>,
    /// Velocity averaging window N.
    #[arg(long)]
    n: Option<u32>,
    /// Sliding window length in frames.
    #[arg(long)]
    window: Option<u32>,
    /// Appearance representation: dynamic, median, max or mean.
    #[arg(long)]
    appearance: Option<AppearanceMode>,
    /// Spatial metric: iou, giou, wgiou, hgiou or dgiou.
    #[arg(long)]
    spatial: Option<SpatialMetric>,
    #[arg(long)]
    merge_cutoff: Option<f64>,
    #[arg(long)]
    stage1_gate: Option<f64>,
    /// Keep the last observed box size when predicting across gaps.
    #[arg(long)]
    freeze_size: bool,
}

impl ConfigArgs {
    fn resolve(&self) -> anyhow::Result<TrackerConfig> {
        let mut config = match self.preset {
            Some(p) => TrackerConfig::preset(p),
            None => TrackerConfig::default(),
        };
        if let Some(path) = &self.config {
            config = TrackerConfig::from_toml_file(path)
                .with_context(|| format!("loading config {}", path.display()))?;
        }
        if let Some(v) = self.beta_f {
            config.beta_f = v;
        }
        if let Some(v) = self.off {
            config.off = v;
        }
        if let Some(v) = self.sigma {
            config.det_threshold = v;
        }
        if let Some(v) = self.ema_sigma {
            config.ema_sigma = Some(v);
        }
        if let Some(v) = self.n {
            config.velocity_window = v;
        }
        if let Some(v) = self.window {
            config.window_len = v;
        }
        if let Some(v) = self.appearance {
            config.appearance_mode = v;
        }
        if let Some(v) = self.spatial {
            config.spatial_metric = v;
        }
        if let Some(v) = self.merge_cutoff {
            config.merge_cutoff = v;
        }
        if let Some(v) = self.stage1_gate {
            config.stage1_gate = v;
        }
        if self.freeze_size {
            config.freeze_size = true;
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct TrackArgs {
    /// MOT detection file.
    #[arg(long)]
    det: PathBuf,
    /// Embedding sidecar (binary or CSV).
    #[arg(long)]
    emb: PathBuf,
    /// Output result file.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct EvalArgs {
    /// Ground-truth file.
    #[arg(long)]
    gt: PathBuf,
    /// Result file to score.
    #[arg(long)]
    res: PathBuf,
    /// IoU threshold for box matching.
    #[arg(long, default_value_t = 0.5)]
    iou_threshold: f64,
    /// Also write the report as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Scenario description (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory.
    #[arg(long)]
    out_dir: PathBuf,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    /// Scenario description (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Grid of values for one parameter, e.g. `n=2,3,9` or
    /// `spatial=iou,giou,wgiou,hgiou,dgiou`; repeatable.
    #[arg(long = "grid", required = true)]
    grids: Vec<SweepGrid>,
    /// Scenario seeds to run per grid point.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    seeds: Vec<u64>,
    #[command(flatten)]
    config: ConfigArgs,
}

fn run() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Track(args) => {
            let config = args.config.resolve()?;
            let summary = runner::run_track(&args.det, &args.emb, &args.out, &config)?;
            println!(
                "{} detections -> {} trajectories -> {}",
                summary.detections,
                summary.trajectories,
                args.out.display()
            );
        }
        Command::Eval(args) => {
            let report = runner::run_eval(&args.gt, &args.res, args.iou_threshold, args.csv.as_deref())?;
            print!("{}", report.to_table());
        }
        Command::Synth(args) => {
            let paths = runner::run_synth(&args.scenario, &args.out_dir, args.seed)?;
            println!(
                "wrote {}, {}, {}",
                paths.gt.display(),
                paths.det.display(),
                paths.emb.display()
            );
        }
        Command::Sweep(args) => {
            let config = args.config.resolve()?;
            let scenario = Scenario::from_toml_file(&args.scenario)?;
            let points = runner::run_sweep(&scenario, &args.grids, &args.seeds, &config, &args.out)?;
            println!("{} grid points -> {}", points, args.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // log level comes from the environment only
    env_logger::Builder::from_env(env_logger::Env::new().filter("CLUSTRACK_LOG")).init();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
