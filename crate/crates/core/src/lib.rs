#![cfg_attr(not(feature = "std"), no_std)]
//! Vertex localization on closed planar curves with the total-distance (VAR)
//! descriptor and deterministic incremental noising.
//!
//! The crate is `no_std` + `alloc`. Everything here is a pure function of its
//! inputs; file formats, the experiment runner and the command line live in
//! the `varnoise` companion crate.
//!
//! Module map:
//!
//! - [`geometry`]: the [`Contour`] model, resampling, normals, boundary distances.
//! - [`descriptors`]: the total-distance descriptor, its global derivative
//!   quantities and the baseline curvature estimators.
//! - [`noising`]: Gaussian boundary distortion and incremental noising.
//! - [`smoothing`]: progressive smoothing, cumulative curvature and ground truth.
//! - [`detection`]: sliding-window extrema and the interesting-point detectors.
//! - [`evaluation`]: reciprocal-distance densities and precision-recall curves.
//! - [`coverage`]: space-filling statistics of noising and smoothing.

extern crate alloc;

pub mod coverage;
pub mod descriptors;
pub mod detection;
mod error;
pub mod evaluation;
pub mod geometry;
mod math;
pub mod noising;
pub mod smoothing;

pub use crate::detection::{IpSet, Method, WindowConfig};
pub use crate::error::{Error, Result};
pub use crate::evaluation::{DensityProfile, PrCurve};
pub use crate::geometry::{Contour, Point, ScalarSeries};
pub use crate::noising::{NoisingConfig, SideRule};
pub use crate::smoothing::{GroundTruth, SmoothingSchedule};
