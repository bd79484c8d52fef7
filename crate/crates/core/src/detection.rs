//! Interesting-point detection by sliding-window extrema.
//!
//! A point is an extremum when, for every symmetric pair `(i - t, i + t)`
//! inside its arc-length window, the differences `v[i] - v[i - t]` and
//! `v[i] - v[i + t]` all carry one strict sign. The window is a fixed fraction
//! of the perimeter, so the same neighbourhood is examined whatever the point
//! count.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::descriptors::{self, DEFAULT_AI_RADIUS};
use crate::error::{Error, Result};
use crate::geometry::{Contour, ScalarSeries};
use crate::smoothing::{self, SmoothingSchedule};

pub const DEFAULT_WINDOW_RATIO: f64 = 0.017;
pub const DEFAULT_SHARPNESS_THRESHOLD: f64 = 0.15;

/// Differences within this fraction of the largest magnitude in the series
/// count as ties.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Extrema of the total-distance descriptor.
    Vo,
    /// `Vo` extrema around which the descriptor changes sharply.
    V,
    /// Area integral invariant.
    AI,
    /// Heron curvature.
    K,
    /// Cumulative curvature over progressive smoothing.
    SK,
    /// Ground truth.
    GT,
}

impl Method {
    /// The five detectors, in reporting order.
    pub const DETECTORS: [Method; 5] = [Method::Vo, Method::V, Method::AI, Method::K, Method::SK];

    pub fn name(self) -> &'static str {
        match self {
            Method::Vo => "Vo",
            Method::V => "V",
            Method::AI => "AI",
            Method::K => "K",
            Method::SK => "SK",
            Method::GT => "GT",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "vo" => Method::Vo,
            "v" => Method::V,
            "ai" => Method::AI,
            "k" => Method::K,
            "sk" => Method::SK,
            "gt" => Method::GT,
            other => return Err(Error::invalid(alloc::format!("unknown method `{other}`"))),
        })
    }
}

/// Strictly increasing point indices on one contour, tagged with the method
/// that produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IpSet {
    indices: Vec<usize>,
    method: Method,
}

impl IpSet {
    /// Sorts and deduplicates `indices`.
    pub fn new(mut indices: Vec<usize>, method: Method) -> Self {
        indices.sort_unstable();
        indices.dedup();
        IpSet { indices, method }
    }

    pub fn empty(method: Method) -> Self {
        IpSet {
            indices: Vec::new(),
            method,
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn is_subset(&self, other: &IpSet) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }

    pub fn check_bounds(&self, n: usize) -> Result<()> {
        match self.indices.last() {
            Some(&last) if last >= n => Err(Error::invalid(alloc::format!(
                "index {last} out of range for {n} points"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowConfig {
    /// Full window width as a fraction of the perimeter.
    pub window_ratio: f64,
    /// Minimum sharpness for the `V` detector, relative to the window ratio.
    pub sharpness_threshold: f64,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            window_ratio: DEFAULT_WINDOW_RATIO,
            sharpness_threshold: DEFAULT_SHARPNESS_THRESHOLD,
        }
    }
}

impl WindowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.window_ratio > 0.0 && self.window_ratio < 0.5) {
            return Err(Error::invalid("window ratio must lie in (0, 0.5)"));
        }
        if !(self.sharpness_threshold >= 0.0) || !self.sharpness_threshold.is_finite() {
            return Err(Error::invalid("sharpness threshold must be non-negative"));
        }
        Ok(())
    }
}

/// Number of symmetric pairs examined around each point: the largest `t`
/// with both `i - t` and `i + t` within half a window of arc length, and at
/// least one.
pub fn window_half_widths(c: &Contour, w: &WindowConfig) -> Result<Vec<usize>> {
    w.validate()?;
    let n = c.len();
    if w.window_ratio * (n as f64) < 1.0 {
        return Err(Error::invalid(alloc::format!(
            "window ratio {} spans less than one of {n} point spacings",
            w.window_ratio
        )));
    }
    let half = 0.5 * w.window_ratio * c.perimeter();
    let edges = c.edge_lengths();
    let max_t = (n - 1) / 2;
    Ok((0..n)
        .map(|i| {
            let (mut fwd, mut back, mut t) = (0.0, 0.0, 0);
            while t < max_t {
                fwd += edges[(i + t) % n];
                back += edges[(i + n - t - 1) % n];
                if fwd > half || back > half {
                    break;
                }
                t += 1;
            }
            t.max(1)
        })
        .collect())
}

fn series_scale(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn is_extremum(v: &[f64], i: usize, half_width: usize, tol: f64) -> bool {
    let n = v.len();
    let mut sign = 0.0;
    for t in 1..=half_width {
        for j in [(i + n - t) % n, (i + t) % n] {
            let d = v[i] - v[j];
            if d.abs() <= tol {
                return false;
            }
            let s = d.signum();
            if sign == 0.0 {
                sign = s;
            } else if s != sign {
                return false;
            }
        }
    }
    true
}

/// Indices where `series` has a strict sliding-window extremum.
pub fn sliding_extrema(series: &ScalarSeries, c: &Contour, w: &WindowConfig, method: Method) -> Result<IpSet> {
    if series.len() != c.len() {
        return Err(Error::SizeMismatch {
            expected: c.len(),
            found: series.len(),
        });
    }
    let widths = window_half_widths(c, w)?;
    let v = series.values();
    let tol = TIE_TOLERANCE * series_scale(v);
    let indices = (0..v.len())
        .filter(|&i| is_extremum(v, i, widths[i], tol))
        .collect();
    Ok(IpSet { indices, method })
}

/// Extrema of the total-distance descriptor, i.e. the zero crossings of its
/// angle-integral derivative.
pub fn detect_vo(c: &Contour, w: &WindowConfig) -> Result<IpSet> {
    sliding_extrema(&descriptors::var_descriptor(c), c, w, Method::Vo)
}

/// `Vo` extrema where at least one windowed difference of the descriptor,
/// scaled by its contour maximum, exceeds `sharpness_threshold * window_ratio`.
pub fn detect_v(c: &Contour, w: &WindowConfig) -> Result<IpSet> {
    let phi = descriptors::var_descriptor(c);
    let vo = sliding_extrema(&phi, c, w, Method::Vo)?;
    let widths = window_half_widths(c, w)?;
    let n = c.len();
    let scale = series_scale(phi.values());
    let threshold = w.sharpness_threshold * w.window_ratio;
    let sharp = |i: usize| {
        (1..=widths[i]).any(|t| {
            [(i + n - t) % n, (i + t) % n]
                .iter()
                .any(|&j| (phi[i] - phi[j]).abs() / scale > threshold)
        })
    };
    let indices = vo.indices.iter().copied().filter(|&i| sharp(i)).collect();
    Ok(IpSet {
        indices,
        method: Method::V,
    })
}

pub fn detect_ai(c: &Contour, w: &WindowConfig, radius: f64) -> Result<IpSet> {
    let ai = descriptors::area_integral_invariant(c, radius)?;
    sliding_extrema(&ai, c, w, Method::AI)
}

pub fn detect_k(c: &Contour, w: &WindowConfig, offset: usize) -> Result<IpSet> {
    let k = descriptors::heron_curvature(c, offset)?;
    sliding_extrema(&k, c, w, Method::K)
}

pub fn detect_sk(c: &Contour, w: &WindowConfig, schedule: &SmoothingSchedule) -> Result<IpSet> {
    let sk = smoothing::cumulative_curvature(c, schedule)?;
    sliding_extrema(&sk, c, w, Method::SK)
}

/// Parameters shared by all detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    pub window: WindowConfig,
    pub ai_radius: f64,
    /// Heron triangle offset; derived from the point count when `None`.
    pub heron_offset: Option<usize>,
    pub smoothing_step: f64,
    /// Smoothing steps for `SK`; derived from the point count when `None`.
    pub smoothing_steps: Option<usize>,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            window: WindowConfig::default(),
            ai_radius: DEFAULT_AI_RADIUS,
            heron_offset: None,
            smoothing_step: smoothing::DEFAULT_STEP_FACTOR,
            smoothing_steps: None,
        }
    }
}

impl DetectorConfig {
    pub fn heron_offset_for(&self, n: usize) -> usize {
        self.heron_offset
            .unwrap_or_else(|| descriptors::default_heron_offset(n))
    }

    pub fn schedule_for(&self, n: usize) -> SmoothingSchedule {
        SmoothingSchedule {
            step_factor: self.smoothing_step,
            num_steps: self
                .smoothing_steps
                .unwrap_or_else(|| SmoothingSchedule::default_steps(n)),
        }
    }

    /// Runs one detector. `GT` is not a detector and is rejected.
    pub fn detect(&self, method: Method, c: &Contour) -> Result<IpSet> {
        match method {
            Method::Vo => detect_vo(c, &self.window),
            Method::V => detect_v(c, &self.window),
            Method::AI => detect_ai(c, &self.window, self.ai_radius),
            Method::K => detect_k(c, &self.window, self.heron_offset_for(c.len())),
            Method::SK => detect_sk(c, &self.window, &self.schedule_for(c.len())),
            Method::GT => Err(Error::invalid("ground truth is not a detector")),
        }
    }
}
