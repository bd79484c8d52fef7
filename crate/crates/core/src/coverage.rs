//! How densely incremental noising and progressive smoothing cover the plane
//! around a contour.
//!
//! Polylines are sampled every half cell and the samples binned into square
//! cells. Noising pools the samples of every level; smoothing counts each
//! level at most once per cell, i.e. how many of the shrinking contours pass
//! through it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{self, Contour, Point};
use crate::math;
use crate::smoothing::{self, SmoothingSchedule};

type Cell = (i64, i64);

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageGrid {
    cell_size: f64,
    origin: Point,
    counts: BTreeMap<Cell, u64>,
}

impl CoverageGrid {
    fn new(cell_size: f64, origin: Point) -> Self {
        CoverageGrid {
            cell_size,
            origin,
            counts: BTreeMap::new(),
        }
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    /// Non-empty cells with their counts, in row-major key order.
    pub fn cells(&self) -> impl Iterator<Item = (Cell, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    pub fn occupied(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn cell_of(&self, p: Point) -> Cell {
        (
            math::floor((p.x - self.origin.x) / self.cell_size) as i64,
            math::floor((p.y - self.origin.y) / self.cell_size) as i64,
        )
    }

    pub fn count(&self, cell: Cell) -> u64 {
        self.counts.get(&cell).copied().unwrap_or(0)
    }

    /// Sum over the 3x3 block of cells centred on the cell containing `p`.
    pub fn local_sum(&self, p: Point) -> u64 {
        let (cx, cy) = self.cell_of(p);
        (-1..=1)
            .flat_map(|dx| (-1..=1).map(move |dy| (cx + dx, cy + dy)))
            .map(|cell| self.count(cell))
            .sum()
    }

    /// Total count over the cells whose centres lie within `radius` of `p`.
    pub fn sum_within(&self, p: Point, radius: f64) -> u64 {
        self.cells_within(p, radius).map(|(_, v)| v).sum()
    }

    fn cells_within(&self, p: Point, radius: f64) -> impl Iterator<Item = (Cell, u64)> + '_ {
        let reach = math::ceil(radius / self.cell_size) as i64 + 1;
        let (cx, cy) = self.cell_of(p);
        (cx - reach..=cx + reach)
            .flat_map(move |x| (cy - reach..=cy + reach).map(move |y| (x, y)))
            .filter(move |&(x, y)| {
                let centre = Point::new(
                    self.origin.x + (x as f64 + 0.5) * self.cell_size,
                    self.origin.y + (y as f64 + 0.5) * self.cell_size,
                );
                centre.distance(p) <= radius
            })
            .filter_map(|cell| self.counts.get(&cell).map(|&v| (cell, v)))
    }

    /// Mean count over the occupied cells whose centres lie within `radius`
    /// of `p`; zero when there are none.
    pub fn mean_occupied_within(&self, p: Point, radius: f64) -> f64 {
        let (sum, cells) = self
            .cells_within(p, radius)
            .fold((0u64, 0u64), |(s, k), (_, v)| (s + v, k + 1));
        if cells == 0 {
            0.0
        } else {
            sum as f64 / cells as f64
        }
    }
}

fn check_cell(cell_size: f64) -> Result<()> {
    if !(cell_size > 0.0) || !cell_size.is_finite() {
        return Err(Error::invalid("cell size must be positive"));
    }
    Ok(())
}

/// Points along the closed polyline, at most `spacing` apart, starting at
/// each vertex.
pub fn polyline_samples(c: &Contour, spacing: f64) -> Vec<Point> {
    let pts = c.points();
    let n = pts.len();
    let mut out = Vec::new();
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        let steps = (math::ceil(c.edge_length(i) / spacing) as usize).max(1);
        out.extend((0..steps).map(|k| a + (b - a) * (k as f64 / steps as f64)));
    }
    out
}

fn origin_of<'a>(samples: impl Iterator<Item = &'a [Point]>) -> Point {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    for s in samples {
        let (l, _) = geometry::bounds_of(s);
        lo.x = lo.x.min(l.x);
        lo.y = lo.y.min(l.y);
    }
    lo
}

/// Samples of one polyline binned into cells.
pub fn rasterize_polyline(c: &Contour, cell_size: f64) -> Result<CoverageGrid> {
    noising_coverage(core::slice::from_ref(c), cell_size)
}

/// Samples of every noising level pooled into one grid.
pub fn noising_coverage(levels: &[Contour], cell_size: f64) -> Result<CoverageGrid> {
    check_cell(cell_size)?;
    if levels.is_empty() {
        return Err(Error::invalid("coverage needs at least one contour"));
    }
    let samples: Vec<Vec<Point>> = levels
        .iter()
        .map(|c| polyline_samples(c, 0.5 * cell_size))
        .collect();
    let mut grid = CoverageGrid::new(cell_size, origin_of(samples.iter().map(Vec::as_slice)));
    for p in samples.iter().flatten() {
        *grid.counts.entry(grid.cell_of(*p)).or_insert(0) += 1;
    }
    Ok(grid)
}

/// Number of smoothing levels (the input included) passing through each cell.
pub fn smoothing_coverage(c: &Contour, schedule: &SmoothingSchedule, cell_size: f64) -> Result<CoverageGrid> {
    check_cell(cell_size)?;
    let levels = smoothing::smoothing_levels(c, schedule)?;
    let samples: Vec<Vec<Point>> = levels
        .iter()
        .map(|l| polyline_samples(l, 0.5 * cell_size))
        .collect();
    let mut grid = CoverageGrid::new(cell_size, origin_of(samples.iter().map(Vec::as_slice)));
    for level in &samples {
        let cells: BTreeSet<Cell> = level.iter().map(|&p| grid.cell_of(p)).collect();
        for cell in cells {
            *grid.counts.entry(cell).or_insert(0) += 1;
        }
    }
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    /// Spearman correlation of the two grids' 3x3 sums at the ground truth.
    pub rank_correlation: f64,
    /// Share of ground-truth points whose local noising coverage exceeds the
    /// median over all contour points.
    pub above_median_fraction: f64,
    pub noising_local: Vec<f64>,
    pub smoothing_local: Vec<f64>,
}

/// Relates noising coverage `noising` and smoothing coverage `smoothing` at
/// the ground-truth points `gt` of `c`.
pub fn coverage_correlation(
    noising: &CoverageGrid,
    smoothing: &CoverageGrid,
    gt: &crate::detection::IpSet,
    c: &Contour,
) -> Result<CorrelationReport> {
    gt.check_bounds(c.len())?;
    let at = |grid: &CoverageGrid| -> Vec<f64> {
        gt.indices()
            .iter()
            .map(|&i| grid.local_sum(c.point(i)) as f64)
            .collect()
    };
    let noising_local = at(noising);
    let smoothing_local = at(smoothing);
    let rank_correlation = spearman(&noising_local, &smoothing_local);
    let mut all: Vec<f64> = c.points().iter().map(|&p| noising.local_sum(p) as f64).collect();
    let median = median(&mut all);
    let above_median_fraction = if noising_local.is_empty() {
        0.0
    } else {
        noising_local.iter().filter(|&&v| v > median).count() as f64 / noising_local.len() as f64
    };
    Ok(CorrelationReport {
        rank_correlation,
        above_median_fraction,
        noising_local,
        smoothing_local,
    })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Ranks with ties sharing their mean rank.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = alloc::vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && values[order[end + 1]] == values[order[start]] {
            end += 1;
        }
        let rank = 0.5 * (start + end) as f64 + 1.0;
        for &k in &order[start..=end] {
            out[k] = rank;
        }
        start = end + 1;
    }
    out
}

/// Spearman rank correlation; zero when either side has no spread.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() || a.len() < 2 {
        return 0.0;
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return 0.0;
    }
    cov / math::sqrt(va * vb)
}

/// Box-counting dimension of the pooled polylines: least-squares slope of
/// `ln(occupied cells)` against `ln(1 / cell)` over four halvings of
/// `base_cell`.
pub fn box_counting_dimension(levels: &[Contour], base_cell: f64) -> Result<f64> {
    check_cell(base_cell)?;
    let sizes: Vec<f64> = (0..4).map(|k| base_cell / (1u32 << k) as f64).collect();
    let mut xs = Vec::with_capacity(4);
    let mut ys = Vec::with_capacity(4);
    for &size in &sizes {
        let grid = noising_coverage(levels, size)?;
        xs.push(-math::ln(size));
        ys.push(math::ln(grid.occupied() as f64));
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(num / den)
}
