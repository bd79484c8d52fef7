//! Closed planar contours.
//!
//! A [`Contour`] is a closed polyline with at least three points, no two
//! consecutive points equal (the closing edge included) and non-zero enclosed
//! area. Edge `i` runs from point `i` to point `i + 1 (mod n)`.

use alloc::vec::Vec;
use core::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        math::hypot(self.x, self.y)
    }

    #[inline]
    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Rotation by -90 degrees.
    #[inline]
    pub fn perp_cw(self) -> Point {
        Point::new(self.y, -self.x)
    }

    /// Rotation by +90 degrees.
    #[inline]
    pub fn perp_ccw(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Option<Point> {
        let len = self.norm();
        (len > 0.0 && len.is_finite()).then(|| self * (1.0 / len))
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// Twice the signed area of a closed polygon (shoelace), positive for CCW.
pub(crate) fn doubled_signed_area(points: &[Point]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| points[i].cross(points[(i + 1) % n]))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    points: Vec<Point>,
    ccw: bool,
    edges: Vec<f64>,
    // arc position of each point, measured from point 0
    arc: Vec<f64>,
    perimeter: f64,
}

impl Contour {
    /// Builds a contour and normalizes it to counter-clockwise order.
    ///
    /// Clockwise input is reversed while keeping the first point first, so
    /// the result reads `p0, p(n-1), ..., p1`.
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let contour = Self::with_orientation(points)?;
        Ok(if contour.ccw { contour } else { contour.reversed() })
    }

    /// Builds a contour keeping the given point order; the orientation flag
    /// records whatever that order is.
    pub fn with_orientation(points: Vec<Point>) -> Result<Self> {
        let n = points.len();
        if n < 3 {
            return Err(Error::TooFewPoints(n));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let mut edges = Vec::with_capacity(n);
        for i in 0..n {
            let j = (i + 1) % n;
            let len = points[i].distance(points[j]);
            if len <= 0.0 {
                return Err(Error::DuplicatePoint(i, j));
            }
            edges.push(len);
        }
        let area2 = doubled_signed_area(&points);
        if area2 == 0.0 || !area2.is_finite() {
            return Err(Error::ZeroArea);
        }
        let mut arc = Vec::with_capacity(n);
        let mut s = 0.0;
        for &len in &edges {
            arc.push(s);
            s += len;
        }
        Ok(Contour {
            points,
            ccw: area2 > 0.0,
            edges,
            arc,
            perimeter: s,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn point(&self, i: usize) -> Point {
        self.points[i]
    }

    /// Point at a cyclic offset from `i`.
    pub fn wrapped(&self, i: usize, offset: isize) -> Point {
        self.points[self.wrap_index(i, offset)]
    }

    pub(crate) fn wrap_index(&self, i: usize, offset: isize) -> usize {
        let n = self.len() as isize;
        (i as isize + offset).rem_euclid(n) as usize
    }

    pub fn is_ccw(&self) -> bool {
        self.ccw
    }

    /// Total length including the closing edge.
    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * doubled_signed_area(&self.points)
    }

    /// Length of edge `i`, from point `i` to point `i + 1`.
    pub fn edge_length(&self, i: usize) -> f64 {
        self.edges[i]
    }

    pub fn edge_lengths(&self) -> &[f64] {
        &self.edges
    }

    /// Arc-length position of point `i` measured from point 0.
    pub fn arc_position(&self, i: usize) -> f64 {
        self.arc[i]
    }

    /// Arc element of each point: the mean of its two adjacent edges.
    pub fn arc_elements(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|j| 0.5 * (self.edges[(j + n - 1) % n] + self.edges[j]))
            .collect()
    }

    /// Same contour traversed the other way, keeping point 0 in place.
    /// Index `i` of the result is index `(n - i) mod n` of `self`.
    pub fn reversed(&self) -> Contour {
        let n = self.len();
        let points: Vec<Point> = (0..n).map(|i| self.points[(n - i) % n]).collect();
        let edges: Vec<f64> = (0..n).map(|i| self.edges[(2 * n - i - 1) % n]).collect();
        let mut arc = Vec::with_capacity(n);
        let mut s = 0.0;
        for &len in &edges {
            arc.push(s);
            s += len;
        }
        Contour {
            points,
            ccw: !self.ccw,
            edges,
            arc,
            perimeter: s,
        }
    }

    /// Unit normal at every point, perpendicular to the tangent that bisects
    /// the two adjacent edge directions.
    ///
    /// The normal is the tangent rotated clockwise, which points outward on a
    /// counter-clockwise contour (every contour built with [`Contour::new`]).
    /// Reversing the traversal negates it.
    pub fn normals(&self) -> Vec<Point> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let prev = (self.points[i] - self.points[(i + n - 1) % n]) * (1.0 / self.edges[(i + n - 1) % n]);
                let next = (self.points[(i + 1) % n] - self.points[i]) * (1.0 / self.edges[i]);
                // a cusp has no bisector; the incoming direction points at the tip
                let tangent = (prev + next).normalized().unwrap_or(prev.perp_ccw());
                tangent.perp_cw()
            })
            .collect()
    }

    /// Normals oriented away from the enclosed region whatever the traversal.
    pub fn outward_normals(&self) -> Vec<Point> {
        let mut normals = self.normals();
        if !self.ccw {
            normals.iter_mut().for_each(|v| *v = -*v);
        }
        normals
    }

    /// Outward unit normal of edge `i`.
    pub fn outward_edge_normal(&self, i: usize) -> Point {
        let dir = (self.points[(i + 1) % self.len()] - self.points[i]) * (1.0 / self.edges[i]);
        if self.ccw {
            dir.perp_cw()
        } else {
            dir.perp_ccw()
        }
    }

    /// Shorter of the two along-boundary arc lengths between points `i` and `j`.
    pub fn boundary_distance(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.len();
        if i >= n || j >= n {
            return Err(Error::invalid("point index out of range"));
        }
        Ok(self.boundary_distance_unchecked(i, j))
    }

    pub(crate) fn boundary_distance_unchecked(&self, i: usize, j: usize) -> f64 {
        let d = (self.arc[i] - self.arc[j]).abs();
        d.min(self.perimeter - d)
    }

    /// `n` points at equal arc-length spacing along the polyline, starting at
    /// point 0.
    pub fn resample(&self, n: usize) -> Result<Contour> {
        if n < 3 {
            return Err(Error::invalid("resample needs at least 3 points"));
        }
        let step = self.perimeter / n as f64;
        let m = self.len();
        let mut out = Vec::with_capacity(n);
        let mut edge = 0;
        for k in 0..n {
            let target = k as f64 * step;
            while edge + 1 < m && self.arc[edge + 1] <= target {
                edge += 1;
            }
            let start = self.points[edge];
            let offset = target - self.arc[edge];
            if offset == 0.0 {
                out.push(start);
            } else {
                let end = self.points[(edge + 1) % m];
                let t = (offset / self.edges[edge]).min(1.0);
                out.push(start + (end - start) * t);
            }
        }
        Contour::with_orientation(out)
    }

    /// Mean of the vertices.
    pub fn centroid(&self) -> Point {
        let inv = 1.0 / self.len() as f64;
        let sum = self
            .points
            .iter()
            .fold(Point::default(), |acc, &p| acc + p);
        sum * inv
    }

    /// Largest distance between any two vertices.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, &p) in self.points.iter().enumerate() {
            for &q in &self.points[i + 1..] {
                best = best.max(p.distance(q));
            }
        }
        best
    }

    /// `(min, max)` corners of the bounding box.
    pub fn bounds(&self) -> (Point, Point) {
        bounds_of(&self.points)
    }

    pub fn translated(&self, by: Point) -> Contour {
        let mut out = self.clone();
        out.points.iter_mut().for_each(|p| *p = *p + by);
        out
    }
}

pub(crate) fn bounds_of(points: &[Point]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

/// Distance from an edge midpoint to the intersections of two circles of
/// radius `radius` centred on the edge endpoints, `distance` apart.
pub fn circle_intersection_offset(distance: f64, radius: f64) -> Result<f64> {
    let half = 0.5 * distance;
    if !(distance > 0.0) || !(radius >= half) || !radius.is_finite() {
        return Err(Error::NoIntersection { distance, radius });
    }
    Ok(math::sqrt((radius - half) * (radius + half)))
}

/// Radius for which [`circle_intersection_offset`] returns `offset`.
pub fn circle_radius_for_offset(distance: f64, offset: f64) -> f64 {
    math::hypot(0.5 * distance, offset)
}

/// One real value per contour point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSeries {
    values: Vec<f64>,
}

impl ScalarSeries {
    /// Checks the series against the contour it describes.
    pub fn new(values: Vec<f64>, contour: &Contour) -> Result<Self> {
        if values.len() != contour.len() {
            return Err(Error::SizeMismatch {
                expected: contour.len(),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(ScalarSeries { values })
    }

    pub(crate) fn from_vec(values: Vec<f64>) -> Self {
        ScalarSeries { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, f64> {
        self.values.iter()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl Index<usize> for ScalarSeries {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}
