//! Offline multi-object tracking by appearance-driven tracklet clustering.
//!
//! Detections (boxes plus appearance embeddings) are first linked into short
//! reliable tracklets inside sliding windows, then merged into trajectories
//! with average-linkage agglomerative clustering. The merge distance is the
//! appearance distance between tracklet representatives, discounted by a
//! spatio-temporal factor built from a length-modulated GIoU between the
//! motion-predicted box and the candidate. The crate also ships a CLEAR/IDF1
//! evaluator, a seeded synthetic scenario generator and a batch CLI.

pub mod appearance;
pub mod assignment;
pub mod association;
pub mod config;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod mot_io;
pub mod motion;
pub mod runner;
pub mod synthgen;

pub use appearance::{AppearanceMode, Embedding};
pub use association::{track_sequence, Detection, Tracklet};
pub use config::{Preset, TrackerConfig};
pub use error::{Error, Result};
pub use geometry::{BBox, SpatialMetric};
pub use metrics::EvalReport;
pub use synthgen::Scenario;
