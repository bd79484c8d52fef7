//! The full experiment: every shape is resampled, given ground truth,
//! distorted, incrementally noised and scored at each noising level.

use std::path::PathBuf;

use rayon::prelude::*;
use varnoise_core::descriptors::{self, DEFAULT_AI_RADIUS};
use varnoise_core::detection::{DetectorConfig, DEFAULT_SHARPNESS_THRESHOLD, DEFAULT_WINDOW_RATIO};
use varnoise_core::evaluation::{density_or_uniform, density_profile, pr_curve};
use varnoise_core::noising::{self, DEFAULT_NOISE_VARIANCE, DEFAULT_NOISING_STEPS, DEFAULT_PERTURBATION_RATIO};
use varnoise_core::smoothing::{self, GT_POINTS};
use varnoise_core::{Method, NoisingConfig, SideRule, SmoothingSchedule, WindowConfig};

use crate::dataset::{self, ShapeRecord};
use crate::error::{Error, Result};
use crate::results::{self, CurveRecord, Manifest, SeriesRecord, ShapeReport};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset_root: PathBuf,
    pub base_points: usize,
    pub noise_variance: f64,
    pub seed: u64,
    pub noising_steps: usize,
    pub perturbation_ratio: f64,
    pub window_ratio: f64,
    pub sharpness_threshold: f64,
    pub ai_radius: f64,
    pub methods: Vec<Method>,
    pub out_dir: PathBuf,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset_root: PathBuf::from("dataset"),
            base_points: GT_POINTS,
            noise_variance: DEFAULT_NOISE_VARIANCE,
            seed: 0,
            noising_steps: DEFAULT_NOISING_STEPS,
            perturbation_ratio: DEFAULT_PERTURBATION_RATIO,
            window_ratio: DEFAULT_WINDOW_RATIO,
            sharpness_threshold: DEFAULT_SHARPNESS_THRESHOLD,
            ai_radius: DEFAULT_AI_RADIUS,
            methods: Method::DETECTORS.to_vec(),
            out_dir: PathBuf::from("results"),
            jobs: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn window(&self) -> WindowConfig {
        WindowConfig {
            window_ratio: self.window_ratio,
            sharpness_threshold: self.sharpness_threshold,
        }
    }

    pub fn detectors(&self) -> DetectorConfig {
        DetectorConfig {
            window: self.window(),
            ai_radius: self.ai_radius,
            ..DetectorConfig::default()
        }
    }

    pub fn noising(&self) -> NoisingConfig {
        NoisingConfig {
            perturbation_ratio: self.perturbation_ratio,
            steps: self.noising_steps,
            side_rule: SideRule::Outward,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: &str| Error::Core(varnoise_core::Error::InvalidArgument(msg.into()));
        if self.base_points < 3 {
            return Err(invalid("base points must be at least 3"));
        }
        if self.noising_steps == 0 {
            return Err(invalid("noising steps must be at least 1"));
        }
        if self.methods.is_empty() || self.methods.contains(&Method::GT) {
            return Err(invalid("methods must be a non-empty subset of Vo, V, AI, K, SK"));
        }
        if !(self.ai_radius > 0.0) {
            return Err(invalid("AI radius must be positive"));
        }
        self.window().validate()?;
        self.noising().validate()?;
        Ok(())
    }
}

/// Seed for one shape: the run seed mixed with a hash of `class/shape`, so a
/// shape draws the same noise whatever else is in the dataset.
pub fn shape_seed(seed: u64, shape_id: &str) -> u64 {
    // FNV-1a, then a splitmix64 finalizer over the combination
    let hash = shape_id
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    let mut z = seed ^ hash;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs every step on one shape; the returned report is not yet written.
pub fn process_shape(record: &ShapeRecord, config: &ExperimentConfig) -> Result<ShapeReport> {
    let base = record.contour.resample(config.base_points)?;
    let window = config.window();
    let gt = smoothing::ground_truth_any(&base, &SmoothingSchedule::for_points(base.len()), &window)?;
    let series = vec![
        SeriesRecord {
            name: "SK".into(),
            values: gt.cumulative.values().to_vec(),
            marks: gt.indices.indices().to_vec(),
        },
        SeriesRecord {
            name: "Vo".into(),
            values: descriptors::var_descriptor(&base).into_values(),
            marks: gt.indices.indices().to_vec(),
        },
    ];
    let mut report = ShapeReport {
        class: record.class_name.clone(),
        shape: record.shape_name.clone(),
        curves: Vec::new(),
        series,
    };
    if gt.indices.is_empty() {
        log::warn!("{}: no ground-truth points, nothing to score", record.id());
        return Ok(report);
    }
    let distorted = noising::gaussian_distort(&base, config.noise_variance, shape_seed(config.seed, &record.id()))?;
    let levels = noising::incremental_noising(&distorted, &config.noising())?;
    let detectors = config.detectors();
    for level in &levels {
        let gt_here = smoothing::map_ground_truth_from(&gt.indices, base.len(), level.len())?;
        let gt_density = density_profile(&gt_here, level)?;
        for &method in &config.methods {
            let ips = detectors.detect(method, level)?;
            let density = density_or_uniform(&ips, level)?;
            report.curves.push(CurveRecord {
                method,
                points: level.len(),
                pr: pr_curve(&density, &gt_density, &gt_here)?,
            });
        }
    }
    Ok(report)
}

/// What a run produced and what went wrong along the way.
#[derive(Debug, Default)]
pub struct RunSummary {
    pub manifest: Manifest,
    pub processed: usize,
    /// `(file or shape id, message)` for every shape that was skipped.
    pub failures: Vec<(String, String)>,
}

impl RunSummary {
    pub fn success(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Processes the whole dataset, writing each shape as soon as it is done
/// and the class summaries and manifest at the end. Shape failures are
/// logged and recorded; only configuration, dataset and summary-writing
/// problems abort the run.
pub fn cmd_run_experiment(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let data = dataset::load_dataset(&config.dataset_root)?;
    let mut summary = RunSummary::default();
    for failure in data.failures {
        log::error!("{}", failure.error);
        summary
            .failures
            .push((failure.path.display().to_string(), failure.error.to_string()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Core(varnoise_core::Error::InvalidArgument(e.to_string())))?;
    let outcomes: Vec<Result<(ShapeReport, Vec<PathBuf>)>> = pool.install(|| {
        data.shapes
            .par_iter()
            .map(|record| {
                log::info!("processing {}", record.id());
                let report = process_shape(record, config)?;
                let files = results::write_shape(&report, &config.out_dir)?;
                Ok((report, files))
            })
            .collect()
    });
    let mut reports = Vec::new();
    for (record, outcome) in data.shapes.iter().zip(outcomes) {
        match outcome {
            Ok((report, files)) => {
                summary.manifest.files.extend(files);
                reports.push(report);
            }
            Err(e) => {
                log::error!("{}: {e}", record.id());
                summary.failures.push((record.id(), e.to_string()));
            }
        }
    }
    summary.processed = reports.len();
    summary
        .manifest
        .files
        .extend(results::write_class_summaries(&reports, &config.out_dir)?);
    results::write_manifest(&summary.manifest, &config.out_dir)?;
    Ok(summary)
}
