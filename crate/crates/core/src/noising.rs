//! Gaussian boundary distortion and deterministic incremental noising.
//!
//! A noising step keeps every point in place and inserts one new point per
//! edge: the intersection of two equal circles centred on the edge endpoints.
//! With the radius chosen per edge so that the intersection sits
//! `perturbation_ratio * |edge|` off the edge midpoint, the point count doubles
//! and the originals land on the even slots.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geometry::{self, Contour, Point};
use crate::math;

pub const DEFAULT_PERTURBATION_RATIO: f64 = 0.01;
pub const DEFAULT_NOISE_VARIANCE: f64 = 2.0;
pub const DEFAULT_NOISING_STEPS: usize = 4;

/// Which of the two circle intersections a new point takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SideRule {
    /// Away from the enclosed region.
    #[default]
    Outward,
    Inward,
    /// Outward on even edges, inward on odd ones.
    Alternating,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisingConfig {
    pub perturbation_ratio: f64,
    pub steps: usize,
    pub side_rule: SideRule,
}

impl Default for NoisingConfig {
    fn default() -> Self {
        NoisingConfig {
            perturbation_ratio: DEFAULT_PERTURBATION_RATIO,
            steps: DEFAULT_NOISING_STEPS,
            side_rule: SideRule::Outward,
        }
    }
}

impl NoisingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.perturbation_ratio >= 0.0 && self.perturbation_ratio < 0.5) {
            return Err(Error::invalid("perturbation ratio must lie in [0, 0.5)"));
        }
        Ok(())
    }
}

/// Moves every point along its outward normal by an independent
/// `N(0, variance)` draw. The stream is fully determined by `seed`.
pub fn gaussian_distort(c: &Contour, variance: f64, seed: u64) -> Result<Contour> {
    if !(variance >= 0.0) || !variance.is_finite() {
        return Err(Error::invalid("variance must be non-negative"));
    }
    let displacements = gaussian_displacements(c.len(), variance, seed)?;
    if variance == 0.0 {
        return Ok(c.clone());
    }
    let out = c
        .points()
        .iter()
        .zip(c.outward_normals())
        .zip(&displacements)
        .map(|((&p, normal), &d)| p + normal * d)
        .collect();
    Contour::with_orientation(out)
}

/// The signed normal displacements [`gaussian_distort`] applies.
pub fn gaussian_displacements(n: usize, variance: f64, seed: u64) -> Result<Vec<f64>> {
    let normal = Normal::new(0.0, math::sqrt(variance)).map_err(|_| Error::invalid("bad variance"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| normal.sample(&mut rng)).collect())
}

/// New point for the edge `a -> b`: the edge midpoint pushed along `normal`
/// to the circle intersection.
fn edge_point(a: Point, b: Point, normal: Point, ratio: f64) -> Point {
    let d = a.distance(b);
    let offset = ratio * d;
    a.midpoint(b) + normal * offset
}

/// Doubles the point count; originals keep their coordinates at even slots.
pub fn noising_step(c: &Contour, config: &NoisingConfig) -> Result<Contour> {
    config.validate()?;
    let n = c.len();
    let pts = c.points();
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let outward = c.outward_edge_normal(i);
        let normal = match config.side_rule {
            SideRule::Outward => outward,
            SideRule::Inward => -outward,
            SideRule::Alternating if i % 2 == 0 => outward,
            SideRule::Alternating => -outward,
        };
        out.push(pts[i]);
        out.push(edge_point(pts[i], pts[(i + 1) % n], normal, config.perturbation_ratio));
    }
    Contour::with_orientation(out)
}

/// `[step 1, ..., step k]`, each level noising the previous one.
pub fn incremental_noising(c: &Contour, config: &NoisingConfig) -> Result<Vec<Contour>> {
    if config.steps == 0 {
        return Err(Error::invalid("incremental noising needs at least one step"));
    }
    let mut levels: Vec<Contour> = Vec::with_capacity(config.steps);
    for _ in 0..config.steps {
        let next = noising_step(levels.last().unwrap_or(c), config)?;
        levels.push(next);
    }
    Ok(levels)
}

/// Keeps every `2^levels`-th point starting from point 0.
pub fn subsample(c: &Contour, levels: u32) -> Result<Contour> {
    let stride = 1usize
        .checked_shl(levels)
        .filter(|&s| s <= c.len())
        .ok_or_else(|| Error::invalid("subsampling stride exceeds the point count"))?;
    if c.len() % stride != 0 {
        return Err(Error::invalid(alloc::format!(
            "{} points are not divisible by {stride}",
            c.len()
        )));
    }
    if stride == 1 {
        return Ok(c.clone());
    }
    Contour::with_orientation(c.points().iter().step_by(stride).copied().collect())
}

/// Largest distance from any point of `points` to the polyline of `c`.
pub fn directed_hausdorff(points: &[Point], c: &Contour) -> f64 {
    points
        .iter()
        .map(|&p| distance_to_polyline(p, c))
        .fold(0.0, f64::max)
}

pub(crate) fn distance_to_polyline(p: Point, c: &Contour) -> f64 {
    let pts = c.points();
    let n = pts.len();
    (0..n)
        .map(|i| distance_to_segment(p, pts[i], pts[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

fn distance_to_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Radius of the circles whose intersection lands at the configured offset.
pub fn noising_radius(edge_length: f64, ratio: f64) -> f64 {
    geometry::circle_radius_for_offset(edge_length, ratio * edge_length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;

    fn blob(n: usize) -> Contour {
        let pts = (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                let r = 50.0 + 8.0 * libm::sin(3.0 * t) + 3.0 * libm::cos(7.0 * t);
                Point::new(r * libm::cos(t), r * libm::sin(t))
            })
            .collect();
        Contour::new(pts).unwrap()
    }

    #[test]
    fn zero_variance_is_identity() {
        let c = blob(100);
        assert_eq!(gaussian_distort(&c, 0.0, 7).unwrap(), c);
        assert!(gaussian_distort(&c, -1.0, 7).is_err());
    }

    #[test]
    fn distortion_statistics_and_determinism() {
        let c = blob(100);
        let d = gaussian_displacements(100, 2.0, 11).unwrap();
        let mean = d.iter().sum::<f64>() / 100.0;
        assert!(mean.abs() < 3.0 * libm::sqrt(2.0 / 100.0));
        let a = gaussian_distort(&c, 2.0, 11).unwrap();
        let b = gaussian_distort(&c, 2.0, 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, gaussian_distort(&c, 2.0, 12).unwrap());
        // displacement is along the outward normal
        let normals = c.outward_normals();
        for i in 0..100 {
            let moved = a.point(i) - c.point(i);
            assert!((moved.dot(normals[i]) - d[i]).abs() < 1e-9);
            assert!(moved.cross(normals[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn step_doubles_and_preserves() {
        let c = blob(100);
        let s = noising_step(&c, &NoisingConfig::default()).unwrap();
        assert_eq!(s.len(), 200);
        for i in 0..100 {
            assert_eq!(s.point(2 * i), c.point(i));
        }
    }

    #[test]
    fn single_edge_offset() {
        let c = Contour::new(vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(1.0, 2.0)]).unwrap();
        let s = noising_step(&c, &NoisingConfig::default()).unwrap();
        assert_eq!(s.point(1), Point::new(1.0, -0.02));
        let inward = NoisingConfig {
            side_rule: SideRule::Inward,
            ..Default::default()
        };
        assert_eq!(noising_step(&c, &inward).unwrap().point(1), Point::new(1.0, 0.02));
        // the point is the circle intersection for the matching radius
        let r = noising_radius(2.0, 0.01);
        assert!((Point::new(1.0, -0.02).distance(Point::new(0.0, 0.0)) - r).abs() < 1e-15);
        assert!((Point::new(1.0, -0.02).distance(Point::new(2.0, 0.0)) - r).abs() < 1e-15);
    }

    #[test]
    fn zero_ratio_uses_midpoints() {
        let c = blob(30);
        let cfg = NoisingConfig {
            perturbation_ratio: 0.0,
            ..Default::default()
        };
        let s = noising_step(&c, &cfg).unwrap();
        for i in 0..30 {
            assert_eq!(s.point(2 * i + 1), c.point(i).midpoint(c.point((i + 1) % 30)));
        }
        assert!((s.perimeter() - c.perimeter()).abs() < 1e-9);
    }

    #[test]
    fn alternating_sides() {
        let c = blob(40);
        let cfg = NoisingConfig {
            side_rule: SideRule::Alternating,
            ..Default::default()
        };
        let s = noising_step(&c, &cfg).unwrap();
        for i in 0..40 {
            let off = s.point(2 * i + 1) - c.point(i).midpoint(c.point((i + 1) % 40));
            let outward = off.dot(c.outward_edge_normal(i)) > 0.0;
            assert_eq!(outward, i % 2 == 0);
        }
    }

    #[test]
    fn schedule_and_round_trip() {
        let c = blob(100);
        let levels = incremental_noising(&c, &NoisingConfig::default()).unwrap();
        let sizes: Vec<usize> = levels.iter().map(Contour::len).collect();
        assert_eq!(sizes, vec![200, 400, 800, 1600]);
        assert_eq!(subsample(&levels[3], 4).unwrap().points(), c.points());
        assert_eq!(subsample(&levels[0], 1).unwrap().points(), c.points());
        assert_eq!(subsample(&c, 0).unwrap(), c);
        assert!(subsample(&blob(30), 2).is_err());
        let one = NoisingConfig {
            steps: 1,
            ..Default::default()
        };
        assert_eq!(incremental_noising(&c, &one).unwrap()[0], noising_step(&c, &one).unwrap());
        let none = NoisingConfig { steps: 0, ..one };
        assert!(incremental_noising(&c, &none).is_err());
    }

    #[test]
    fn added_points_stay_near_parent() {
        let cfg = NoisingConfig::default();
        let mut prev = blob(50);
        for _ in 0..5 {
            let next = noising_step(&prev, &cfg).unwrap();
            let max_edge = prev.edge_lengths().iter().copied().fold(0.0, f64::max);
            let odd: Vec<Point> = next.points().iter().skip(1).step_by(2).copied().collect();
            assert!(directed_hausdorff(&odd, &prev) <= cfg.perturbation_ratio * max_edge * (1.0 + 1e-12));
            prev = next;
        }
    }

    #[test]
    fn config_validation() {
        let bad = NoisingConfig {
            perturbation_ratio: 0.5,
            ..Default::default()
        };
        assert!(noising_step(&blob(10), &bad).is_err());
    }
}
