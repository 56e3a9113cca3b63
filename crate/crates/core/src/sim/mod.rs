//! Deterministic synthetic world: ego trajectory, vehicles, landmarks, noisy
//! detections with surface clouds, odometry drift, dropouts and clutter.

mod config;
mod generate;
mod io;
mod scenario;

pub use config::{NoiseSpec, SimConfig};
pub use generate::{generate, inject_noise, sample_surface_points};
pub use io::{load_scenario, read_scenario, save_scenario, write_scenario};
pub use scenario::{AgentTruth, Detection, Frame, LandmarkObs, Scenario};
