//! Simultaneous ego localization and 3D multi-object tracking on synthetic
//! congestion scenarios.
//!
//! The crate is organized around a per-frame loop: a deterministic simulator
//! produces noisy detections and odometry; detections and motion-predicted
//! tracklets are arranged into star graphs; a multi-criteria association
//! scores and matches them; a Kalman tracker maintains tracklet lifecycles;
//! and a two-window pose-graph optimizer refines ego, landmark, and object
//! poses. CLEAR-MOT and trajectory metrics score runs against ground truth.

pub mod error;
pub mod geometry;
pub mod graph;
pub mod msga;
pub mod tracking;
pub mod sim;

pub use error::{Error, Result};
