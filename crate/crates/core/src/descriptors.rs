//! Scalar descriptors over contour points.
//!
//! The total-distance descriptor `phi(i) = sum_j |p_i - p_j| ds_j` and its
//! global derivative quantities are O(n^2) sums over all point pairs. Each is
//! evaluated per point with a fixed summation order, so results are
//! bit-reproducible.
//!
//! Angles: `omega_ij` is the counter-clockwise angle from the normal at `i`
//! (see [`Contour::normals`]) to the direction `p_j - p_i`. Then
//!
//! ```text
//! phi'(i)  = -sum_j sin(omega_ij) ds_j
//! A(i)     =  sum_j cos(omega_ij) ds_j
//! B(i)     =  sum_j cos^2(omega_ij) / |p_i - p_j| ds_j
//! ```
//!
//! with the `j = i` term left out of every sum.

use alloc::vec;
use alloc::vec::Vec;

use crate::detection::IpSet;
use crate::error::{Error, Result};
use crate::geometry::{Contour, Point, ScalarSeries};
use crate::math;

/// Contribution of the distance kink `|s - xi|` at `xi = s` to the second
/// derivative of the total distance along an arc-length parametrized curve.
/// The principal-value integrals `A` and `B` leave it out, so
/// `phi'' = kappa A + B + KINK_TERM`.
pub const KINK_TERM: f64 = 2.0;

/// Default radius of the area integral invariant disk, in shape units.
pub const DEFAULT_AI_RADIUS: f64 = 15.0;

/// The total-distance descriptor and its global derivative quantities,
/// computed in a single pass over all point pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalQuantities {
    pub phi: ScalarSeries,
    pub phi_dot: ScalarSeries,
    pub a: ScalarSeries,
    pub b: ScalarSeries,
}

pub fn global_quantities(c: &Contour) -> GlobalQuantities {
    let n = c.len();
    let pts = c.points();
    let ds = c.arc_elements();
    let normals = c.normals();
    let mut phi = vec![0.0; n];
    let mut phi_dot = vec![0.0; n];
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    for i in 0..n {
        let (p, normal) = (pts[i], normals[i]);
        let (mut s_phi, mut s_sin, mut s_cos, mut s_b) = (0.0, 0.0, 0.0, 0.0);
        for j in (0..n).filter(|&j| j != i) {
            let u = pts[j] - p;
            let dist = u.norm();
            let dir = u * (1.0 / dist);
            let cos = normal.dot(dir);
            let sin = normal.cross(dir);
            s_phi += dist * ds[j];
            s_sin += sin * ds[j];
            s_cos += cos * ds[j];
            s_b += cos * cos / dist * ds[j];
        }
        phi[i] = s_phi;
        phi_dot[i] = -s_sin;
        a[i] = s_cos;
        b[i] = s_b;
    }
    GlobalQuantities {
        phi: ScalarSeries::from_vec(phi),
        phi_dot: ScalarSeries::from_vec(phi_dot),
        a: ScalarSeries::from_vec(a),
        b: ScalarSeries::from_vec(b),
    }
}

/// Total distance of every point to the rest of the curve.
pub fn var_descriptor(c: &Contour) -> ScalarSeries {
    let n = c.len();
    let pts = c.points();
    let ds = c.arc_elements();
    let values = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| pts[i].distance(pts[j]) * ds[j])
                .sum()
        })
        .collect();
    ScalarSeries::from_vec(values)
}

fn angle_sum(c: &Contour, term: impl Fn(Point, Point, f64) -> f64) -> ScalarSeries {
    let n = c.len();
    let pts = c.points();
    let ds = c.arc_elements();
    let normals = c.normals();
    let values = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let u = pts[j] - pts[i];
                    let dist = u.norm();
                    term(normals[i], u * (1.0 / dist), dist) * ds[j]
                })
                .sum()
        })
        .collect();
    ScalarSeries::from_vec(values)
}

/// Arc-length derivative of [`var_descriptor`] as an angle integral.
pub fn var_first_derivative(c: &Contour) -> ScalarSeries {
    let mut s = angle_sum(c, |normal, dir, _| normal.cross(dir));
    s.values_mut().iter_mut().for_each(|v| *v = -*v);
    s
}

pub fn global_a(c: &Contour) -> ScalarSeries {
    angle_sum(c, |normal, dir, _| normal.dot(dir))
}

pub fn global_b(c: &Contour) -> ScalarSeries {
    angle_sum(c, |normal, dir, dist| {
        let cos = normal.dot(dir);
        cos * cos / dist
    })
}

/// Second arc-length derivative by the three-point stencil for uneven spacing.
pub fn second_derivative(c: &Contour, series: &ScalarSeries) -> Result<ScalarSeries> {
    check_len(c, series)?;
    let n = c.len();
    let v = series.values();
    let values = (0..n)
        .map(|i| second_difference_at(c, v, i))
        .collect();
    Ok(ScalarSeries::from_vec(values))
}

fn second_difference_at(c: &Contour, v: &[f64], i: usize) -> f64 {
    let n = c.len();
    let (prev, next) = ((i + n - 1) % n, (i + 1) % n);
    let hm = c.edge_length(prev);
    let hp = c.edge_length(i);
    2.0 * (hm * v[next] - (hm + hp) * v[i] + hp * v[prev]) / (hm * hp * (hm + hp))
}

/// Curvature at extrema of the total distance from the global quantities:
/// `kappa = (phi'' - B - KINK_TERM) / A`, one value per index of `extrema`.
pub fn kappa_global(c: &Contour, extrema: &IpSet) -> Result<Vec<f64>> {
    if extrema.is_empty() {
        return Err(Error::EmptyIpSet);
    }
    if let Some(&bad) = extrema.indices().iter().find(|&&i| i >= c.len()) {
        return Err(Error::invalid(alloc::format!("index {bad} out of range")));
    }
    let g = global_quantities(c);
    let tol = 1e-9 * c.perimeter();
    extrema
        .indices()
        .iter()
        .map(|&i| {
            let a = g.a[i];
            if a.abs() < tol {
                return Err(Error::DegenerateDescriptor(i));
            }
            let phi_dd = second_difference_at(c, g.phi.values(), i);
            Ok((phi_dd - g.b[i] - KINK_TERM) / a)
        })
        .collect()
}

/// Default triangle offset: the Heron triangle spans the detection window.
pub fn default_heron_offset(n: usize) -> usize {
    let k = math::round(crate::detection::DEFAULT_WINDOW_RATIO * n as f64 / 2.0) as usize;
    k.max(1)
}

/// Signed area of the triangle `(p[i-k], p[i], p[i+k])`, positive where the
/// contour turns counter-clockwise. Its magnitude is the Heron area.
pub fn heron_curvature(c: &Contour, k: usize) -> Result<ScalarSeries> {
    let n = c.len();
    if k == 0 || 2 * k >= n {
        return Err(Error::invalid(alloc::format!(
            "heron offset {k} outside 1..{}",
            n.div_ceil(2)
        )));
    }
    let off = k as isize;
    let values = (0..n)
        .map(|i| {
            let (before, here, after) = (c.wrapped(i, -off), c.point(i), c.wrapped(i, off));
            0.5 * (here - before).cross(after - here)
        })
        .collect();
    Ok(ScalarSeries::from_vec(values))
}

/// Area integral invariant at one pixel per shape unit.
pub fn area_integral_invariant(c: &Contour, radius: f64) -> Result<ScalarSeries> {
    area_integral_invariant_scaled(c, radius, 1.0)
}

/// Number of interior pixels inside the disk of `radius` (shape units)
/// around each contour point. The interior is rasterized on a grid of
/// `pixel_size` shape units; a pixel is inside when its centre is.
pub fn area_integral_invariant_scaled(c: &Contour, radius: f64, pixel_size: f64) -> Result<ScalarSeries> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::invalid("disk radius must be positive"));
    }
    if !(pixel_size > 0.0) || !pixel_size.is_finite() {
        return Err(Error::invalid("pixel size must be positive"));
    }
    let scale = 1.0 / pixel_size;
    let pts: Vec<Point> = c.points().iter().map(|&p| p * scale).collect();
    let r = radius * scale;
    let raster = ScanlineRaster::new(&pts, r);
    if raster.filled() == 0 {
        return Err(Error::ZeroArea);
    }
    let values = pts.iter().map(|&p| raster.count_in_disk(p, r) as f64).collect();
    Ok(ScalarSeries::from_vec(values))
}

/// Polygon interior as sorted edge crossings per pixel row.
struct ScanlineRaster {
    first_row: i64,
    crossings: Vec<Vec<f64>>,
}

impl ScanlineRaster {
    fn new(pts: &[Point], margin: f64) -> Self {
        let (lo, hi) = crate::geometry::bounds_of(pts);
        let first_row = math::floor(lo.y - margin) as i64 - 1;
        let last_row = math::ceil(hi.y + margin) as i64 + 1;
        let n = pts.len();
        let crossings = (first_row..=last_row)
            .map(|row| {
                let yc = row as f64 + 0.5;
                let mut xs: Vec<f64> = (0..n)
                    .filter_map(|i| {
                        let (a, b) = (pts[i], pts[(i + 1) % n]);
                        ((a.y <= yc) != (b.y <= yc))
                            .then(|| a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y))
                    })
                    .collect();
                xs.sort_by(f64::total_cmp);
                xs
            })
            .collect();
        ScanlineRaster { first_row, crossings }
    }

    fn row(&self, row: i64) -> &[f64] {
        let idx = row - self.first_row;
        if idx < 0 || idx as usize >= self.crossings.len() {
            &[]
        } else {
            &self.crossings[idx as usize]
        }
    }

    // pixel columns x with x + 0.5 strictly inside (a, b) and within [lo, hi]
    fn columns_between(a: f64, b: f64, lo: i64, hi: i64) -> u64 {
        let first = (math::floor(a - 0.5) as i64 + 1).max(lo);
        let last = (math::ceil(b - 0.5) as i64 - 1).min(hi);
        if last >= first {
            (last - first + 1) as u64
        } else {
            0
        }
    }

    fn filled(&self) -> u64 {
        self.crossings
            .iter()
            .flat_map(|xs| xs.chunks_exact(2))
            .map(|span| Self::columns_between(span[0], span[1], i64::MIN / 4, i64::MAX / 4))
            .sum()
    }

    fn count_in_disk(&self, center: Point, r: f64) -> u64 {
        let row_lo = math::ceil(center.y - r - 0.5) as i64;
        let row_hi = math::floor(center.y + r - 0.5) as i64;
        let mut count = 0;
        for row in row_lo..=row_hi {
            let dy = row as f64 + 0.5 - center.y;
            let rem = r * r - dy * dy;
            if rem < 0.0 {
                continue;
            }
            let w = math::sqrt(rem);
            let col_lo = math::ceil(center.x - w - 0.5) as i64;
            let col_hi = math::floor(center.x + w - 0.5) as i64;
            count += self
                .row(row)
                .chunks_exact(2)
                .map(|span| Self::columns_between(span[0], span[1], col_lo, col_hi))
                .sum::<u64>();
        }
        count
    }
}

fn check_len(c: &Contour, series: &ScalarSeries) -> Result<()> {
    if series.len() != c.len() {
        return Err(Error::SizeMismatch {
            expected: c.len(),
            found: series.len(),
        });
    }
    Ok(())
}
