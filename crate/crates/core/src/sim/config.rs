//! Scenario generation parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the synthetic world generator. All values are echoed into
/// the generated scenario so a run is reproducible from its output alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Number of vehicles besides the ego agent.
    pub num_agents: usize,
    /// Fraction of agents that are parked (zero velocity for the whole run).
    pub static_fraction: f64,
    pub num_frames: usize,
    /// Frame period in seconds.
    pub dt: f64,
    /// Point landmarks standing in for static-structure features.
    pub num_landmarks: usize,
    /// Agents and landmarks are placed within +-half_extent in x and y.
    pub world_half_extent: f64,
    /// Minimum center separation between agents at placement time.
    pub min_agent_separation: f64,
    pub sensor_range: f64,
    /// Full field-of-view angle in radians; 2*pi senses all around.
    pub sensor_fov: f64,

    /// Detection box center noise (m, per axis, sensor frame).
    pub sigma_pos: f64,
    /// Detection yaw noise (rad).
    pub sigma_yaw: f64,
    /// Detection dimension noise (m, per axis).
    pub sigma_dim: f64,
    /// Surface point jitter (m, per axis).
    pub sigma_point: f64,
    /// Landmark observation noise (m, per axis).
    pub sigma_landmark: f64,
    /// Per-step odometry translation noise (m, per axis).
    pub sigma_odom_t: f64,
    /// Per-step odometry rotation noise (rad, per axis).
    pub sigma_odom_r: f64,

    /// Probability a visible agent yields no detection in a frame.
    pub p_miss: f64,
    /// Expected clutter detections per frame (Poisson rate).
    pub clutter_rate: f64,
    /// Surface points sampled per detection.
    pub points_per_detection: usize,

    pub length_range: (f64, f64),
    pub width_range: (f64, f64),
    pub height_range: (f64, f64),
    /// Speed range for moving agents (m/s).
    pub speed_range: (f64, f64),
    /// Yaw-rate magnitude range for moving agents (rad/s).
    pub yaw_rate_range: (f64, f64),
    /// Ego speed range (m/s).
    pub ego_speed_range: (f64, f64),
    /// Frames per piecewise-constant kinematic segment.
    pub segment_frames: (usize, usize),
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            num_agents: 20,
            static_fraction: 0.5,
            num_frames: 100,
            dt: 0.1,
            num_landmarks: 40,
            world_half_extent: 30.0,
            min_agent_separation: 3.5,
            sensor_range: 120.0,
            sensor_fov: 2.0 * std::f64::consts::PI,
            sigma_pos: 0.0,
            sigma_yaw: 0.0,
            sigma_dim: 0.0,
            sigma_point: 0.03,
            sigma_landmark: 0.0,
            sigma_odom_t: 0.0,
            sigma_odom_r: 0.0,
            p_miss: 0.0,
            clutter_rate: 0.0,
            points_per_detection: 40,
            length_range: (3.8, 5.2),
            width_range: (1.7, 2.1),
            height_range: (1.4, 1.8),
            speed_range: (2.0, 8.0),
            yaw_rate_range: (0.0, 0.25),
            ego_speed_range: (3.0, 6.0),
            segment_frames: (20, 40),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_frames < 1 {
            return Err(Error::config("num_frames", "must be >= 1"));
        }
        if !(self.dt > 0.0) {
            return Err(Error::config("dt", "must be > 0"));
        }
        if !(0.0..=1.0).contains(&self.static_fraction) {
            return Err(Error::config("static_fraction", "must be in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.p_miss) {
            return Err(Error::config("p_miss", "must be in [0, 1]"));
        }
        for (name, v) in [
            ("sigma_pos", self.sigma_pos),
            ("sigma_yaw", self.sigma_yaw),
            ("sigma_dim", self.sigma_dim),
            ("sigma_point", self.sigma_point),
            ("sigma_landmark", self.sigma_landmark),
            ("sigma_odom_t", self.sigma_odom_t),
            ("sigma_odom_r", self.sigma_odom_r),
            ("clutter_rate", self.clutter_rate),
        ] {
            if !(v >= 0.0) {
                return Err(Error::config(name, "must be >= 0"));
            }
        }
        if !(self.sensor_range > 0.0) {
            return Err(Error::config("sensor_range", "must be > 0"));
        }
        if !(self.sensor_fov > 0.0) {
            return Err(Error::config("sensor_fov", "must be > 0"));
        }
        if self.world_half_extent <= 0.0 {
            return Err(Error::config("world_half_extent", "must be > 0"));
        }
        for (name, (lo, hi)) in [
            ("length_range", self.length_range),
            ("width_range", self.width_range),
            ("height_range", self.height_range),
        ] {
            if !(lo > 0.0 && hi >= lo) {
                return Err(Error::config(name, "must satisfy 0 < min <= max"));
            }
        }
        if self.segment_frames.0 < 1 || self.segment_frames.1 < self.segment_frames.0 {
            return Err(Error::config("segment_frames", "must satisfy 1 <= min <= max"));
        }
        Ok(())
    }
}

/// Additional perturbation applied on top of an existing scenario; ground
/// truth is never touched.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseSpec {
    pub sigma_pos: f64,
    pub sigma_yaw: f64,
    pub sigma_dim: f64,
    pub sigma_odom_t: f64,
    pub sigma_odom_r: f64,
}

impl NoiseSpec {
    pub fn detection_pos(sigma: f64) -> Self {
        NoiseSpec { sigma_pos: sigma, ..Default::default() }
    }

    pub fn is_zero(&self) -> bool {
        self.sigma_pos == 0.0
            && self.sigma_yaw == 0.0
            && self.sigma_dim == 0.0
            && self.sigma_odom_t == 0.0
            && self.sigma_odom_r == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sigma_pos", self.sigma_pos),
            ("sigma_yaw", self.sigma_yaw),
            ("sigma_dim", self.sigma_dim),
            ("sigma_odom_t", self.sigma_odom_t),
            ("sigma_odom_r", self.sigma_odom_r),
        ] {
            if !(v >= 0.0) {
                return Err(Error::config(name, "must be >= 0"));
            }
        }
        Ok(())
    }
}
