//! File formats, the batch experiment and the command line around
//! [`varnoise_core`].
//!
//! - [`dataset`]: contour CSV files and the `<root>/<class>/<shape>` layout.
//! - [`trace`]: silhouette images to contours.
//! - [`results`]: precision-recall tables and SVG plots.
//! - [`experiment`]: the full noising experiment over a dataset.

pub mod dataset;
mod error;
pub mod experiment;
pub mod results;
pub mod trace;

pub use crate::error::{Error, Result};
