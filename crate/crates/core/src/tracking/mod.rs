//! Tracklet lifecycle and constant-velocity Kalman motion prediction.

mod kalman;
mod lifecycle;

pub use kalman::{
    measurement_from_box, BoxFilter, KalmanConfig, Measurement, StateMatrix, StateVector,
    MEAS_DIM, STATE_DIM,
};
pub use lifecycle::{
    detection_to_world, LifecycleSummary, Tracker, TrackerConfig, Tracklet, TrackStatus,
};
