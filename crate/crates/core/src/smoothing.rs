//! Progressive smoothing, cumulative curvature and ground-truth points.

use alloc::vec::Vec;

use crate::descriptors;
use crate::detection::{self, IpSet, Method, WindowConfig};
use crate::error::{Error, Result};
use crate::geometry::{Contour, Point, ScalarSeries};
use crate::math;

pub const DEFAULT_STEP_FACTOR: f64 = 0.25;

/// Point count of the contours ground truth is defined on.
pub const GT_POINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingSchedule {
    /// Weight of the neighbour average in each step, in `(0, 0.5]`.
    pub step_factor: f64,
    pub num_steps: usize,
}

impl SmoothingSchedule {
    /// Default schedule for an `n`-point contour.
    pub fn for_points(n: usize) -> Self {
        SmoothingSchedule {
            step_factor: DEFAULT_STEP_FACTOR,
            num_steps: Self::default_steps(n),
        }
    }

    /// `round(n / 10)`, at least one.
    pub fn default_steps(n: usize) -> usize {
        (math::round(n as f64 / 10.0) as usize).max(1)
    }

    fn validate(&self) -> Result<()> {
        if !(self.step_factor > 0.0 && self.step_factor <= 0.5) {
            return Err(Error::invalid("smoothing step factor must lie in (0, 0.5]"));
        }
        Ok(())
    }
}

/// One three-point averaging step:
/// `p'[i] = (1 - f) p[i] + f (p[i-1] + p[i+1]) / 2`.
pub fn smooth_once(c: &Contour, step_factor: f64) -> Result<Contour> {
    SmoothingSchedule {
        step_factor,
        num_steps: 1,
    }
    .validate()?;
    let n = c.len();
    let pts = c.points();
    let keep = 1.0 - step_factor;
    let pull = 0.5 * step_factor;
    let out: Vec<Point> = (0..n)
        .map(|i| pts[i] * keep + (pts[(i + n - 1) % n] + pts[(i + 1) % n]) * pull)
        .collect();
    Contour::with_orientation(out)
}

/// The input followed by each of its `num_steps` successive smoothings.
pub fn smoothing_levels(c: &Contour, schedule: &SmoothingSchedule) -> Result<Vec<Contour>> {
    schedule.validate()?;
    let mut levels = Vec::with_capacity(schedule.num_steps + 1);
    levels.push(c.clone());
    for _ in 0..schedule.num_steps {
        let next = smooth_once(levels.last().expect("non-empty"), schedule.step_factor)?;
        levels.push(next);
    }
    Ok(levels)
}

/// Point-wise sum of signed Heron curvature over all smoothing levels,
/// using the default triangle offset for the point count.
pub fn cumulative_curvature(c: &Contour, schedule: &SmoothingSchedule) -> Result<ScalarSeries> {
    cumulative_curvature_with_offset(c, schedule, descriptors::default_heron_offset(c.len()))
}

pub fn cumulative_curvature_with_offset(c: &Contour, schedule: &SmoothingSchedule, offset: usize) -> Result<ScalarSeries> {
    schedule.validate()?;
    let mut total = descriptors::heron_curvature(c, offset)?.into_values();
    let mut current = c.clone();
    for _ in 0..schedule.num_steps {
        current = smooth_once(&current, schedule.step_factor)?;
        let k = descriptors::heron_curvature(&current, offset)?;
        total.iter_mut().zip(k.iter()).for_each(|(t, v)| *t += v);
    }
    Ok(ScalarSeries::from_vec(total))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    /// Extrema of `cumulative` on the 100-point contour.
    pub indices: IpSet,
    pub cumulative: ScalarSeries,
}

/// Sliding-window extrema of the cumulative curvature of a 100-point contour.
pub fn ground_truth_ips(c100: &Contour, schedule: &SmoothingSchedule, window: &WindowConfig) -> Result<GroundTruth> {
    if c100.len() != GT_POINTS {
        return Err(Error::invalid(alloc::format!(
            "ground truth needs a {GT_POINTS}-point contour, got {}",
            c100.len()
        )));
    }
    ground_truth_any(c100, schedule, window)
}

/// [`ground_truth_ips`] without the point-count restriction.
pub fn ground_truth_any(c: &Contour, schedule: &SmoothingSchedule, window: &WindowConfig) -> Result<GroundTruth> {
    let cumulative = cumulative_curvature(c, schedule)?;
    let indices = detection::sliding_extrema(&cumulative, c, window, Method::GT)?;
    Ok(GroundTruth { indices, cumulative })
}

/// `log2(big_n / base)` when `big_n` is `base` times a power of two.
fn doubling_level(base: usize, big_n: usize) -> Result<u32> {
    let ratio = big_n.checked_div(base).unwrap_or(0);
    if ratio == 0 || big_n % base != 0 || !ratio.is_power_of_two() {
        return Err(Error::invalid(alloc::format!(
            "{big_n} points is not {base} times a power of two"
        )));
    }
    Ok(ratio.trailing_zeros())
}

/// Maps 1-based point `n` of the 100-point contour to its 1-based index on
/// the noised contour of `big_n` points: `2^p (n - 1) + 1`, `p = log2(big_n / 100)`.
pub fn gt_index_map(n: usize, big_n: usize) -> Result<usize> {
    index_map_from(n, GT_POINTS, big_n)
}

/// [`gt_index_map`] for a `base`-point starting contour.
pub fn index_map_from(n: usize, base: usize, big_n: usize) -> Result<usize> {
    let p = doubling_level(base, big_n)?;
    if !(1..=base).contains(&n) {
        return Err(Error::invalid(alloc::format!("index {n} outside 1..={base}")));
    }
    Ok((n - 1) * (1usize << p) + 1)
}

/// [`gt_index_map`] applied to a 0-based ground-truth set.
pub fn map_ground_truth(gt: &IpSet, big_n: usize) -> Result<IpSet> {
    map_ground_truth_from(gt, GT_POINTS, big_n)
}

pub fn map_ground_truth_from(gt: &IpSet, base: usize, big_n: usize) -> Result<IpSet> {
    let indices = gt
        .indices()
        .iter()
        .map(|&i| index_map_from(i + 1, base, big_n).map(|m| m - 1))
        .collect::<Result<Vec<_>>>()?;
    Ok(IpSet::new(indices, gt.method()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;

    fn regular(n: usize, radius: f64) -> Contour {
        let pts = (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                Point::new(radius * libm::cos(t) + 3.0, radius * libm::sin(t) - 1.0)
            })
            .collect();
        Contour::new(pts).unwrap()
    }

    pub(crate) fn star(n: usize, arms: usize, outer: f64, inner: f64) -> Contour {
        let verts: Vec<Point> = (0..2 * arms)
            .map(|i| {
                let t = PI * i as f64 / arms as f64 + PI / 2.0;
                let r = if i % 2 == 0 { outer } else { inner };
                Point::new(r * libm::cos(t), r * libm::sin(t))
            })
            .collect();
        Contour::new(verts).unwrap().resample(n).unwrap()
    }

    fn square(n: usize) -> Contour {
        Contour::new(vec![
            Point::new(0.0, 0.0),
            Point::new(100.0, 0.0),
            Point::new(100.0, 100.0),
            Point::new(0.0, 100.0),
        ])
        .unwrap()
        .resample(n)
        .unwrap()
    }

    #[test]
    fn regular_polygon_shrinks_about_centroid() {
        let c = regular(12, 5.0);
        let s = smooth_once(&c, 0.25).unwrap();
        assert!(s.centroid().distance(c.centroid()) < 1e-12);
        let radii: Vec<f64> = s.points().iter().map(|p| p.distance(c.centroid())).collect();
        assert!(radii.iter().all(|r| (r - radii[0]).abs() < 1e-12 && *r < 5.0));
    }

    #[test]
    fn smoothing_shrinks_convex_area() {
        let ellipse: Vec<Point> = (0..80)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / 80.0;
                Point::new(30.0 * libm::cos(t), 10.0 * libm::sin(t))
            })
            .collect();
        for c in [square(100), Contour::new(ellipse).unwrap()] {
            let levels = smoothing_levels(&c, &SmoothingSchedule::for_points(300)).unwrap();
            for pair in levels.windows(2) {
                assert!(pair[1].signed_area().abs() < pair[0].signed_area().abs());
            }
        }
    }

    #[test]
    fn smoothing_shortens_star() {
        // concave notches move outward, so a star's area grows while its
        // perimeter still shrinks
        let levels = smoothing_levels(&star(100, 5, 100.0, 40.0), &SmoothingSchedule::for_points(400)).unwrap();
        assert_eq!(levels.len(), 41);
        assert!(levels[40].signed_area() > levels[0].signed_area());
        for pair in levels.windows(2) {
            assert!(pair[1].perimeter() < pair[0].perimeter());
            assert!(pair[1].centroid().distance(pair[0].centroid()) < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_step() {
        assert!(smooth_once(&square(8), 0.0).is_err());
        assert!(smooth_once(&square(8), 0.6).is_err());
        assert!(smooth_once(&square(8), 0.5).is_ok());
    }

    #[test]
    fn cumulative_curvature_cases() {
        let circle = regular(100, 10.0);
        let sk = cumulative_curvature(&circle, &SmoothingSchedule::for_points(100)).unwrap();
        assert!((sk.max() - sk.min()) / sk.max() < 1e-6);
        assert!(sk.iter().all(|&v| v > 0.0));
        let zero = SmoothingSchedule {
            step_factor: 0.25,
            num_steps: 0,
        };
        let c = star(100, 5, 100.0, 40.0);
        assert_eq!(
            cumulative_curvature(&c, &zero).unwrap(),
            descriptors::heron_curvature(&c, 1).unwrap()
        );
    }

    #[test]
    fn ground_truth_shapes() {
        let sched = SmoothingSchedule::for_points(100);
        let w = WindowConfig::default();
        assert!(ground_truth_ips(&regular(100, 10.0), &sched, &w).unwrap().indices.is_empty());
        let sq = ground_truth_ips(&square(100), &sched, &w).unwrap();
        assert_eq!(sq.indices.indices(), &[0, 25, 50, 75]);
        let st = ground_truth_ips(&star(100, 5, 100.0, 40.0), &sched, &w).unwrap();
        assert_eq!(st.indices.len(), 10);
        assert_eq!(st, ground_truth_ips(&star(100, 5, 100.0, 40.0), &sched, &w).unwrap());
        assert!(ground_truth_ips(&square(120), &sched, &w).is_err());
    }

    #[test]
    fn index_map_closed_form() {
        assert_eq!(gt_index_map(1, 1600).unwrap(), 1);
        assert_eq!(gt_index_map(5, 400).unwrap(), 17);
        for n in 1..=100 {
            assert_eq!(gt_index_map(n, 100).unwrap(), n);
        }
        assert!(gt_index_map(5, 300).is_err());
        assert!(gt_index_map(5, 50).is_err());
        assert!(gt_index_map(0, 200).is_err());
        assert!(gt_index_map(101, 200).is_err());
        let gt = IpSet::new(vec![0, 4, 99], Method::GT);
        assert_eq!(map_ground_truth(&gt, 800).unwrap().indices(), &[0, 32, 792]);
        assert_eq!(index_map_from(3, 60, 240).unwrap(), 9);
        assert!(index_map_from(3, 0, 240).is_err());
    }
}
