//! Binarization of degraded vehicle and license-plate images by
//! hierarchical histogram equalization (HHE).
//!
//! Pipeline: color to gray ([`preprocess::to_gray`]), 3x3 median
//! ([`preprocess::median3x3`]), per-level equalization membership over a
//! quadtree partition ([`hierarchy::LevelStack`]), weighted fusion
//! ([`hierarchy::combine`]) and a 0.5 threshold ([`hierarchy::binarize`]).
//! [`baseline`] holds global Otsu thresholding for comparison, and
//! [`evalmetrics`] scores results against ground truth on synthetic plates.

pub mod baseline;
pub mod error;
pub mod evalmetrics;
pub mod hierarchy;
pub mod histeq;
pub mod pixmap;
pub mod preprocess;

pub use error::{Error, Result};
pub use hierarchy::{hhe_binarize, hhe_run, HheParams, LevelRange};
pub use pixmap::{BinaryImage, GrayImage, MembershipMap, RegionRect, RgbImage};
