use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use varnoise_core::coverage;
use varnoise_core::descriptors::DEFAULT_AI_RADIUS;
use varnoise_core::detection::{DEFAULT_SHARPNESS_THRESHOLD, DEFAULT_WINDOW_RATIO};
use varnoise_core::evaluation::{density_or_uniform, density_profile, pr_curve};
use varnoise_core::noising::{self, DEFAULT_NOISE_VARIANCE, DEFAULT_NOISING_STEPS, DEFAULT_PERTURBATION_RATIO};
use varnoise_core::smoothing::{self, GT_POINTS};
use varnoise_core::{Contour, Method, NoisingConfig, SideRule, SmoothingSchedule, WindowConfig};
use varnoise::dataset::{load_shape_file, write_contour};
use varnoise::experiment::{cmd_run_experiment, ExperimentConfig};
use varnoise::trace::trace_binary_image;

#[derive(Parser)]
#[command(name = "varnoise", version, about = "Vertex localization with the total-distance descriptor under incremental noising")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full experiment over a dataset directory
    Run(RunArgs),
    /// Trace a binary PGM silhouette into a contour CSV
    Trace {
        image: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Resample a contour to evenly spaced points
    Resample {
        input: PathBuf,
        #[arg(long, default_value_t = GT_POINTS)]
        points: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Displace every point along its normal by Gaussian noise
    Distort {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_NOISE_VARIANCE)]
        noise_variance: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Apply incremental noising and write the finest level
    Noise {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_NOISING_STEPS)]
        steps: usize,
        #[arg(long, default_value_t = DEFAULT_PERTURBATION_RATIO)]
        perturbation_ratio: f64,
        #[arg(long, value_enum, default_value_t = Side::Outward)]
        side: Side,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print ground-truth point indices of a contour resampled to the base size
    Gt {
        input: PathBuf,
        #[arg(long, default_value_t = GT_POINTS)]
        base_points: usize,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Print the interesting points one detector finds
    Detect {
        input: PathBuf,
        #[arg(long)]
        method: Method,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = DEFAULT_AI_RADIUS)]
        ai_radius: f64,
    },
    /// Print a detector's density over the contour points as `index,mass`
    Density {
        input: PathBuf,
        #[arg(long)]
        method: Method,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = DEFAULT_AI_RADIUS)]
        ai_radius: f64,
    },
    /// Print a detector's precision-recall curve against the ground truth of a base contour
    Pr {
        /// Contour to score, with the base point count times a power of two
        input: PathBuf,
        /// Undistorted contour the ground truth comes from
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        method: Method,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = DEFAULT_AI_RADIUS)]
        ai_radius: f64,
    },
    /// Compare noising and smoothing coverage at the ground-truth points of a
    /// contour resampled to the base size
    Coverage {
        input: PathBuf,
        #[arg(long, default_value_t = GT_POINTS)]
        base_points: usize,
        /// Cell edge; defaults to the mean edge length of the contour
        #[arg(long)]
        cell_size: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_NOISING_STEPS)]
        noising_steps: usize,
        #[arg(long, default_value_t = DEFAULT_PERTURBATION_RATIO)]
        perturbation_ratio: f64,
        #[command(flatten)]
        window: WindowArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, env = "VARNOISE_DATASET")]
    dataset_root: PathBuf,
    #[arg(long, default_value_t = GT_POINTS)]
    base_points: usize,
    #[arg(long, default_value_t = DEFAULT_NOISE_VARIANCE)]
    noise_variance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_NOISING_STEPS)]
    noising_steps: usize,
    #[arg(long, default_value_t = DEFAULT_PERTURBATION_RATIO)]
    perturbation_ratio: f64,
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long, default_value_t = DEFAULT_AI_RADIUS)]
    ai_radius: f64,
    /// Comma-separated subset of Vo, V, AI, K, SK
    #[arg(long, value_delimiter = ',', default_value = "Vo,V,AI,K,SK")]
    methods: Vec<Method>,
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
    /// Shapes processed in parallel; 0 uses every core
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct WindowArgs {
    /// Sliding-window width as a fraction of the perimeter
    #[arg(long, default_value_t = DEFAULT_WINDOW_RATIO)]
    window_ratio: f64,
    #[arg(long, default_value_t = DEFAULT_SHARPNESS_THRESHOLD)]
    sharpness_threshold: f64,
}

impl WindowArgs {
    fn config(&self) -> WindowConfig {
        WindowConfig {
            window_ratio: self.window_ratio,
            sharpness_threshold: self.sharpness_threshold,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Outward,
    Inward,
    Alternating,
}

impl From<Side> for SideRule {
    fn from(s: Side) -> Self {
        match s {
            Side::Outward => SideRule::Outward,
            Side::Inward => SideRule::Inward,
            Side::Alternating => SideRule::Alternating,
        }
    }
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_contour(c: &Contour, path: Option<&Path>) -> anyhow::Result<()> {
    write_contour(output(path)?, c)?;
    Ok(())
}

fn emit_indices(indices: &[usize]) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    for i in indices {
        writeln!(out, "{i}")?;
    }
    Ok(())
}

fn detector(method: Method, window: &WindowArgs, ai_radius: f64) -> anyhow::Result<varnoise_core::detection::DetectorConfig> {
    if method == Method::GT {
        bail!("GT is not a detector; use the `gt` subcommand");
    }
    Ok(varnoise_core::detection::DetectorConfig {
        window: window.config(),
        ai_radius,
        ..Default::default()
    })
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Run(args) => {
            let config = ExperimentConfig {
                dataset_root: args.dataset_root,
                base_points: args.base_points,
                noise_variance: args.noise_variance,
                seed: args.seed,
                noising_steps: args.noising_steps,
                perturbation_ratio: args.perturbation_ratio,
                window_ratio: args.window.window_ratio,
                sharpness_threshold: args.window.sharpness_threshold,
                ai_radius: args.ai_radius,
                methods: args.methods,
                out_dir: args.out_dir,
                jobs: args.jobs,
            };
            let summary = cmd_run_experiment(&config)?;
            log::info!(
                "{} shapes processed, {} failed, {} files written to {}",
                summary.processed,
                summary.failures.len(),
                summary.manifest.files.len(),
                config.out_dir.display()
            );
            return Ok(if summary.success() { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
        Command::Trace { image, output } => emit_contour(&trace_binary_image(&image)?, output.as_deref())?,
        Command::Resample { input, points, output } => {
            emit_contour(&load_shape_file(&input)?.resample(points)?, output.as_deref())?
        }
        Command::Distort {
            input,
            noise_variance,
            seed,
            output,
        } => emit_contour(
            &noising::gaussian_distort(&load_shape_file(&input)?, noise_variance, seed)?,
            output.as_deref(),
        )?,
        Command::Noise {
            input,
            steps,
            perturbation_ratio,
            side,
            output,
        } => {
            let config = NoisingConfig {
                perturbation_ratio,
                steps,
                side_rule: side.into(),
            };
            let levels = noising::incremental_noising(&load_shape_file(&input)?, &config)?;
            emit_contour(levels.last().expect("at least one level"), output.as_deref())?
        }
        Command::Gt {
            input,
            base_points,
            window,
        } => {
            let base = load_shape_file(&input)?.resample(base_points)?;
            let gt = smoothing::ground_truth_any(&base, &SmoothingSchedule::for_points(base_points), &window.config())?;
            emit_indices(gt.indices.indices())?
        }
        Command::Detect {
            input,
            method,
            window,
            ai_radius,
        } => {
            let c = load_shape_file(&input)?;
            emit_indices(detector(method, &window, ai_radius)?.detect(method, &c)?.indices())?
        }
        Command::Density {
            input,
            method,
            window,
            ai_radius,
        } => {
            let c = load_shape_file(&input)?;
            let ips = detector(method, &window, ai_radius)?.detect(method, &c)?;
            let density = density_or_uniform(&ips, &c)?;
            let mut out = io::stdout().lock();
            writeln!(out, "index,mass")?;
            for (i, m) in density.mass().iter().enumerate() {
                writeln!(out, "{i},{m}")?;
            }
        }
        Command::Pr {
            input,
            base,
            method,
            window,
            ai_radius,
        } => {
            let c = load_shape_file(&input)?;
            let base = load_shape_file(&base)?;
            let gt = smoothing::ground_truth_any(&base, &SmoothingSchedule::for_points(base.len()), &window.config())?;
            if gt.indices.is_empty() {
                bail!("the base contour has no ground-truth points");
            }
            let gt_here = smoothing::map_ground_truth_from(&gt.indices, base.len(), c.len())?;
            let ips = detector(method, &window, ai_radius)?.detect(method, &c)?;
            let pr = pr_curve(&density_or_uniform(&ips, &c)?, &density_profile(&gt_here, &c)?, &gt_here)?;
            let mut out = io::stdout().lock();
            writeln!(out, "recall_pos,precision")?;
            for (m, v) in pr.values.iter().enumerate() {
                writeln!(out, "{},{v}", m + 1)?;
            }
        }
        Command::Coverage {
            input,
            base_points,
            cell_size,
            noising_steps,
            perturbation_ratio,
            window,
        } => {
            let c = load_shape_file(&input)?.resample(base_points)?;
            let cell = cell_size.unwrap_or(c.perimeter() / c.len() as f64);
            let gt = smoothing::ground_truth_any(&c, &SmoothingSchedule::for_points(c.len()), &window.config())?;
            let config = NoisingConfig {
                perturbation_ratio,
                steps: noising_steps,
                side_rule: SideRule::Outward,
            };
            let mut levels = vec![c.clone()];
            levels.extend(noising::incremental_noising(&c, &config)?);
            let noised = coverage::noising_coverage(&levels, cell)?;
            let smoothed = coverage::smoothing_coverage(&c, &SmoothingSchedule::for_points(c.len()), cell)?;
            let report = coverage::coverage_correlation(&noised, &smoothed, &gt.indices, &c)?;
            let mut out = io::stdout().lock();
            writeln!(out, "gt_points,{}", gt.indices.len())?;
            writeln!(out, "rank_correlation,{}", report.rank_correlation)?;
            writeln!(out, "above_median_fraction,{}", report.above_median_fraction)?;
            writeln!(out, "box_dimension,{}", coverage::box_counting_dimension(&levels, 4.0 * cell)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            log::error!("{e:#}");
            ExitCode::FAILURE
        }
    }
}
