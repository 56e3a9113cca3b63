//! Constant-velocity Kalman filtering of box states.
//!
//! State layout: (x, y, z, yaw, l, w, h, vx, vy, vz, vyaw). Position and yaw
//! propagate with their rates; dimensions are modeled as slowly varying.

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::geometry::wrap_angle;

pub const STATE_DIM: usize = 11;
pub const MEAS_DIM: usize = 7;

pub type StateVector = SVector<f64, STATE_DIM>;
pub type StateMatrix = SMatrix<f64, STATE_DIM, STATE_DIM>;
pub type Measurement = SVector<f64, MEAS_DIM>;

/// Noise scales for the filter, all standard deviations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KalmanConfig {
    /// Process noise on position per sqrt-second.
    pub q_pos: f64,
    pub q_yaw: f64,
    pub q_dim: f64,
    pub q_vel: f64,
    pub q_yaw_rate: f64,
    /// Measurement noise on the box center.
    pub r_pos: f64,
    pub r_yaw: f64,
    pub r_dim: f64,
    /// Initial velocity standard deviation at birth.
    pub birth_vel_std: f64,
}

impl Default for KalmanConfig {
    fn default() -> Self {
        KalmanConfig {
            q_pos: 0.05,
            q_yaw: 0.02,
            q_dim: 0.01,
            q_vel: 0.8,
            q_yaw_rate: 0.3,
            r_pos: 0.15,
            r_yaw: 0.05,
            r_dim: 0.05,
            birth_vel_std: 8.0,
        }
    }
}

impl KalmanConfig {
    /// Noise-free variant for exactness checks: zero measurement noise and
    /// zero process noise on pose components. Dims keep a sliver of process
    /// noise so the innovation covariance stays invertible; with zero
    /// measurement noise the gain on dims is still exactly one.
    pub fn exact() -> Self {
        KalmanConfig {
            q_pos: 0.0,
            q_yaw: 0.0,
            q_dim: 1e-6,
            q_vel: 1.0,
            q_yaw_rate: 0.3,
            r_pos: 0.0,
            r_yaw: 0.0,
            r_dim: 0.0,
            birth_vel_std: 8.0,
        }
    }

    fn process_noise(&self, dt: f64) -> StateMatrix {
        let mut q = StateMatrix::zeros();
        let d = [
            self.q_pos, self.q_pos, self.q_pos, self.q_yaw,
            self.q_dim, self.q_dim, self.q_dim,
            self.q_vel, self.q_vel, self.q_vel, self.q_yaw_rate,
        ];
        for (i, s) in d.iter().enumerate() {
            q[(i, i)] = s * s * dt;
        }
        q
    }

    fn measurement_noise(&self) -> SMatrix<f64, MEAS_DIM, MEAS_DIM> {
        let mut r = SMatrix::<f64, MEAS_DIM, MEAS_DIM>::zeros();
        let d = [self.r_pos, self.r_pos, self.r_pos, self.r_yaw, self.r_dim, self.r_dim, self.r_dim];
        for (i, s) in d.iter().enumerate() {
            r[(i, i)] = s * s;
        }
        r
    }
}

/// A box state with covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxFilter {
    pub state: StateVector,
    pub covariance: StateMatrix,
}

impl BoxFilter {
    /// Initializes from a first measurement: measured components take the
    /// measurement and its noise, velocities start at zero with a large
    /// standard deviation.
    pub fn from_measurement(z: &Measurement, cfg: &KalmanConfig) -> Self {
        let mut state = StateVector::zeros();
        for i in 0..MEAS_DIM {
            state[i] = z[i];
        }
        state[3] = wrap_angle(state[3]);
        let mut cov = StateMatrix::zeros();
        let r = cfg.measurement_noise();
        for i in 0..MEAS_DIM {
            cov[(i, i)] = r[(i, i)];
        }
        for i in MEAS_DIM..STATE_DIM {
            cov[(i, i)] = cfg.birth_vel_std * cfg.birth_vel_std;
        }
        BoxFilter { state, covariance: cov }
    }

    /// Constant-velocity propagation over `dt` seconds.
    pub fn predict(&mut self, dt: f64, cfg: &KalmanConfig) {
        assert!(dt > 0.0, "predict requires dt > 0");
        let mut f = StateMatrix::identity();
        f[(0, 7)] = dt;
        f[(1, 8)] = dt;
        f[(2, 9)] = dt;
        f[(3, 10)] = dt;
        self.state = f * self.state;
        self.state[3] = wrap_angle(self.state[3]);
        self.covariance = f * self.covariance * f.transpose() + cfg.process_noise(dt);
        self.symmetrize();
    }

    /// Measurement update; the yaw innovation is wrapped to (-pi, pi].
    pub fn update(&mut self, z: &Measurement, cfg: &KalmanConfig) {
        let mut h = SMatrix::<f64, MEAS_DIM, STATE_DIM>::zeros();
        for i in 0..MEAS_DIM {
            h[(i, i)] = 1.0;
        }
        let mut innovation = z - h * self.state;
        innovation[3] = wrap_angle(innovation[3]);
        let s = h * self.covariance * h.transpose() + cfg.measurement_noise();
        let s_inv = s.try_inverse().expect("innovation covariance invertible");
        let k = self.covariance * h.transpose() * s_inv;
        self.state += k * innovation;
        self.state[3] = wrap_angle(self.state[3]);
        for i in 4..7 {
            self.state[i] = self.state[i].max(0.2);
        }
        // Joseph form keeps the covariance PSD under roundoff.
        let i_kh = StateMatrix::identity() - k * h;
        self.covariance =
            i_kh * self.covariance * i_kh.transpose() + k * cfg.measurement_noise() * k.transpose();
        self.symmetrize();
    }

    fn symmetrize(&mut self) {
        self.covariance = (self.covariance + self.covariance.transpose()) * 0.5;
    }

    pub fn velocity_norm(&self) -> f64 {
        (self.state[7].powi(2) + self.state[8].powi(2) + self.state[9].powi(2)).sqrt()
    }

    pub fn min_covariance_eigenvalue(&self) -> f64 {
        self.covariance
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b))
    }
}

/// Packs a world-frame box into the measurement vector.
pub fn measurement_from_box(b: &crate::geometry::Box3) -> Measurement {
    Measurement::from_column_slice(&[
        b.center[0], b.center[1], b.center[2], b.yaw, b.dims[0], b.dims[1], b.dims[2],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn meas(x: f64, yaw: f64) -> Measurement {
        Measurement::from_column_slice(&[x, 0.0, 0.75, yaw, 4.5, 1.9, 1.5])
    }

    #[test]
    fn zero_velocity_prediction_keeps_pose() {
        let cfg = KalmanConfig::default();
        let mut f = BoxFilter::from_measurement(&meas(2.0, 0.3), &cfg);
        let before = f.state;
        f.predict(0.1, &cfg);
        assert_relative_eq!(f.state, before, epsilon = 1e-12);
    }

    #[test]
    fn constant_velocity_advances_position() {
        let cfg = KalmanConfig::default();
        let mut f = BoxFilter::from_measurement(&meas(0.0, 0.0), &cfg);
        f.state[7] = 1.0;
        f.predict(0.1, &cfg);
        assert_relative_eq!(f.state[0], 0.1, epsilon = 1e-12);
    }

    #[test]
    fn predict_grows_covariance_trace() {
        let cfg = KalmanConfig::default();
        let mut f = BoxFilter::from_measurement(&meas(0.0, 0.0), &cfg);
        let t0 = f.covariance.trace();
        f.predict(0.1, &cfg);
        assert!(f.covariance.trace() > t0);
    }

    #[test]
    fn zero_innovation_keeps_state_and_shrinks_covariance() {
        let cfg = KalmanConfig::default();
        let mut f = BoxFilter::from_measurement(&meas(1.0, 0.2), &cfg);
        f.predict(0.1, &cfg);
        let state_before = f.state;
        let trace_before = f.covariance.trace();
        let z = meas(state_before[0], state_before[3]);
        f.update(&z, &cfg);
        assert_relative_eq!(f.state, state_before, epsilon = 1e-9);
        assert!(f.covariance.trace() < trace_before);
    }

    #[test]
    fn huge_measurement_noise_approaches_prior() {
        let mut cfg = KalmanConfig::default();
        let mut f = BoxFilter::from_measurement(&meas(1.0, 0.1), &cfg);
        f.predict(0.1, &cfg);
        let prior = f.state;
        cfg.r_pos *= 1e3; // variance scales by 1e6
        cfg.r_yaw *= 1e3;
        cfg.r_dim *= 1e3;
        f.update(&meas(2.0, 0.5), &cfg);
        for i in 0..STATE_DIM {
            assert!((f.state[i] - prior[i]).abs() < 1e-3, "component {i} moved");
        }
    }

    #[test]
    fn yaw_innovation_wraps() {
        let cfg = KalmanConfig::exact();
        let mut f = BoxFilter::from_measurement(&meas(0.0, 0.0), &cfg);
        f.state[3] = 3.1;
        f.predict(0.1, &cfg);
        f.state[3] = 3.1;
        f.update(&meas(0.0, -3.1), &cfg);
        // Wrapped innovation is 2*pi - 6.2 ~ 0.083, applied positively.
        assert!(f.state[3].abs() > 3.1 || f.state[3] < -3.09, "yaw {}", f.state[3]);
        let diff = wrap_angle(f.state[3] - (-3.1));
        assert!(diff.abs() < 0.09, "wrapped diff {diff}");
    }

    #[test]
    fn exact_velocity_recovery_after_two_updates() {
        let cfg = KalmanConfig::exact();
        let (v, dt) = (3.0, 0.1);
        let mut f = BoxFilter::from_measurement(&meas(0.0, 0.0), &cfg);
        f.predict(dt, &cfg);
        f.update(&meas(v * dt, 0.0), &cfg);
        assert_relative_eq!(f.state[7], v, epsilon = 1e-9);
        // Third-frame prediction now matches ground truth exactly.
        f.predict(dt, &cfg);
        assert_relative_eq!(f.state[0], 2.0 * v * dt, epsilon = 1e-9);
    }

    #[test]
    fn covariance_stays_psd_under_random_steps() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(31);
        let cfg = KalmanConfig::default();
        let mut f = BoxFilter::from_measurement(&meas(0.0, 0.0), &cfg);
        for _ in 0..10_000 {
            if rng.gen::<bool>() {
                f.predict(rng.gen::<f64>() * 0.2 + 1e-3, &cfg);
            } else {
                f.update(&meas(rng.gen::<f64>() * 10.0 - 5.0, rng.gen::<f64>() * 6.0 - 3.0), &cfg);
            }
            assert!(f.min_covariance_eigenvalue() >= -1e-9);
        }
    }
}
