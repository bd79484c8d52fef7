//! Probabilistic precision-recall.
//!
//! Each method turns its interesting points into a density over contour
//! points: the mass at point `j` is proportional to `ds_j` over the boundary
//! distance from `j` to the nearest interesting point, with the distance
//! clamped below at `ds_j`. A method is then scored at the ground-truth points
//! by how far its density strays from the ground-truth density there.

use alloc::vec;
use alloc::vec::Vec;

use crate::detection::IpSet;
use crate::error::{Error, Result};
use crate::geometry::Contour;

/// Normalized probability mass per contour point.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    mass: Vec<f64>,
}

impl DensityProfile {
    pub fn uniform(n: usize) -> Self {
        DensityProfile {
            mass: vec![1.0 / n as f64; n],
        }
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }
}

/// Boundary distance from every point to its nearest member of `ips`.
fn nearest_distances(ips: &IpSet, c: &Contour) -> Vec<f64> {
    let n = c.len();
    let idx = ips.indices();
    (0..n)
        .map(|j| {
            // indices are sorted: the nearest lies next to the insertion point,
            // or wraps to the first/last member
            let pos = idx.partition_point(|&i| i < j);
            let candidates = [
                idx[pos % idx.len()],
                idx[(pos + idx.len() - 1) % idx.len()],
            ];
            candidates
                .iter()
                .map(|&i| c.boundary_distance_unchecked(i, j))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

pub fn density_profile(ips: &IpSet, c: &Contour) -> Result<DensityProfile> {
    if ips.is_empty() {
        return Err(Error::EmptyIpSet);
    }
    ips.check_bounds(c.len())?;
    let ds = c.arc_elements();
    let raw: Vec<f64> = nearest_distances(ips, c)
        .into_iter()
        .zip(&ds)
        .map(|(d, &ds)| ds / d.max(ds))
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(DensityProfile {
        mass: raw.into_iter().map(|r| r / total).collect(),
    })
}

/// [`density_profile`], falling back to the uniform density when a method
/// finds nothing.
pub fn density_or_uniform(ips: &IpSet, c: &Contour) -> Result<DensityProfile> {
    match density_profile(ips, c) {
        Err(Error::EmptyIpSet) => Ok(DensityProfile::uniform(c.len())),
        other => other,
    }
}

/// Precision per recall position; position `m` (1-based) holds one minus the
/// sum of the `m` smallest density deviations at the ground-truth points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PrCurve {
    pub values: Vec<f64>,
}

impl PrCurve {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn pr_curve(method: &DensityProfile, gt: &DensityProfile, gt_indices: &IpSet) -> Result<PrCurve> {
    if method.len() != gt.len() {
        return Err(Error::SizeMismatch {
            expected: gt.len(),
            found: method.len(),
        });
    }
    gt_indices.check_bounds(gt.len())?;
    let mut diffs: Vec<f64> = gt_indices
        .indices()
        .iter()
        .map(|&g| (method.mass[g] - gt.mass[g]).abs())
        .collect();
    diffs.sort_by(f64::total_cmp);
    let mut acc = 0.0;
    let values = diffs
        .into_iter()
        .map(|d| {
            acc += d;
            1.0 - acc
        })
        .collect();
    Ok(PrCurve { values })
}

/// Point-wise mean after truncating every curve to the shortest one.
pub fn average_pr(curves: &[PrCurve]) -> Result<PrCurve> {
    let len = curves
        .iter()
        .map(PrCurve::len)
        .min()
        .ok_or_else(|| Error::invalid("no curves to average"))?;
    let count = curves.len() as f64;
    let values = (0..len)
        .map(|m| curves.iter().map(|c| c.values[m]).sum::<f64>() / count)
        .collect();
    Ok(PrCurve { values })
}
