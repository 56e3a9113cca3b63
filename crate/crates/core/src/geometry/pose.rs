//! Rigid transforms in SE(3).

use nalgebra::{Isometry3, Matrix3, Matrix4, Quaternion, Translation3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

/// A rigid transform (rotation + translation) in SE(3).
///
/// Wraps a unit-quaternion isometry; the rotation stays orthonormal with
/// determinant +1 by construction. Composition follows the homogeneous
/// matrix product: `a.compose(&b)` maps a point through `b` first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose(Isometry3<f64>);

impl Pose {
    pub fn identity() -> Self {
        Pose(Isometry3::identity())
    }

    pub fn new(rotation: UnitQuaternion<f64>, translation: Vector3<f64>) -> Self {
        Pose(Isometry3::from_parts(Translation3::from(translation), rotation))
    }

    pub fn from_translation(x: f64, y: f64, z: f64) -> Self {
        Pose::new(UnitQuaternion::identity(), Vector3::new(x, y, z))
    }

    /// Pose with a yaw rotation about +z and the given translation.
    pub fn from_xyz_yaw(x: f64, y: f64, z: f64, yaw: f64) -> Self {
        Pose::new(
            UnitQuaternion::from_axis_angle(&Vector3::z_axis(), yaw),
            Vector3::new(x, y, z),
        )
    }

    /// Reconstructs a pose from a rotation matrix, renormalizing so the
    /// result is orthonormal even for slightly drifted inputs.
    pub fn from_rotation_matrix(rotation: &Matrix3<f64>, translation: Vector3<f64>) -> Self {
        let rot = nalgebra::Rotation3::from_matrix(rotation);
        Pose::new(UnitQuaternion::from_rotation_matrix(&rot), translation)
    }

    pub fn rotation(&self) -> Matrix3<f64> {
        *self.0.rotation.to_rotation_matrix().matrix()
    }

    pub fn unit_quaternion(&self) -> UnitQuaternion<f64> {
        self.0.rotation
    }

    pub fn translation(&self) -> Vector3<f64> {
        self.0.translation.vector
    }

    /// Yaw (rotation about +z) extracted from the rotation.
    pub fn yaw(&self) -> f64 {
        let r = self.rotation();
        r[(1, 0)].atan2(r[(0, 0)])
    }

    pub fn compose(&self, other: &Pose) -> Pose {
        Pose(self.0 * other.0)
    }

    pub fn invert(&self) -> Pose {
        Pose(self.0.inverse())
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        (self.0 * nalgebra::Point3::from(*p)).coords
    }

    pub fn homogeneous(&self) -> Matrix4<f64> {
        self.0.to_homogeneous()
    }

    /// Frobenius norm of `homogeneous(self) - I`. Zero iff the pose is the
    /// identity; used as the deviation metric for edge consistency and
    /// object residuals.
    pub fn frobenius_deviation(&self) -> f64 {
        (self.homogeneous() - Matrix4::identity()).norm()
    }

    /// Right-multiplied retraction: `self * exp(xi)`.
    pub fn retract(&self, xi: &Twist) -> Pose {
        self.compose(&exp_se3(xi))
    }
}

impl Default for Pose {
    fn default() -> Self {
        Pose::identity()
    }
}

/// se(3) tangent vector: translation part `rho`, rotation-vector part `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist {
    pub rho: Vector3<f64>,
    pub phi: Vector3<f64>,
}

impl Twist {
    pub fn zero() -> Self {
        Twist { rho: Vector3::zeros(), phi: Vector3::zeros() }
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Twist {
            rho: Vector3::new(v[0], v[1], v[2]),
            phi: Vector3::new(v[3], v[4], v[5]),
        }
    }
}

/// Exponential map se(3) -> SE(3).
pub fn exp_se3(xi: &Twist) -> Pose {
    let theta = xi.phi.norm();
    let rot = UnitQuaternion::from_scaled_axis(xi.phi);
    // V(phi) couples the translation part through the rotation.
    let v = if theta < 1e-9 {
        Matrix3::identity() + 0.5 * skew(&xi.phi)
    } else {
        let k = skew(&xi.phi);
        Matrix3::identity()
            + ((1.0 - theta.cos()) / (theta * theta)) * k
            + ((theta - theta.sin()) / (theta * theta * theta)) * (k * k)
    };
    Pose::new(rot, v * xi.rho)
}

pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// The k-th se(3) generator as a 4x4 matrix (k = 0..2 translation along
/// x/y/z, k = 3..5 rotation about x/y/z).
pub fn se3_generator(k: usize) -> Matrix4<f64> {
    let mut g = Matrix4::zeros();
    match k {
        0..=2 => g[(k, 3)] = 1.0,
        3 => {
            g[(2, 1)] = 1.0;
            g[(1, 2)] = -1.0;
        }
        4 => {
            g[(0, 2)] = 1.0;
            g[(2, 0)] = -1.0;
        }
        5 => {
            g[(1, 0)] = 1.0;
            g[(0, 1)] = -1.0;
        }
        _ => panic!("se(3) generator index out of range: {k}"),
    }
    g
}

/// Wraps an angle to (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut w = a % two_pi;
    if w <= -std::f64::consts::PI {
        w += two_pi;
    } else if w > std::f64::consts::PI {
        w -= two_pi;
    }
    w
}

#[derive(Serialize, Deserialize)]
struct PoseRepr {
    translation: [f64; 3],
    rotation: [f64; 4],
}

impl Serialize for Pose {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let t = self.translation();
        let q = self.unit_quaternion();
        PoseRepr {
            translation: [t.x, t.y, t.z],
            rotation: [q.i, q.j, q.k, q.w],
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Pose {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = PoseRepr::deserialize(deserializer)?;
        let [x, y, z, w] = repr.rotation;
        // Stored quaternions are already unit; renormalizing here would
        // perturb them by an ulp and break byte-exact file round trips.
        // `Scenario::validate` checks the norm with a tolerance instead.
        let q = UnitQuaternion::new_unchecked(Quaternion::new(w, x, y, z));
        Ok(Pose::new(q, Vector3::from(repr.translation)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn random_pose(rng: &mut impl rand::Rng) -> Pose {
        let axis = Vector3::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        let angle = (rng.gen::<f64>() - 0.5) * 6.0;
        Pose::new(
            UnitQuaternion::from_scaled_axis(axis.normalize() * angle),
            Vector3::new(rng.gen::<f64>() * 10.0, rng.gen::<f64>() * 10.0, rng.gen::<f64>() * 10.0),
        )
    }

    #[test]
    fn compose_identity_and_inverse() {
        let p = Pose::from_xyz_yaw(1.0, -2.0, 0.5, 0.7);
        let id = Pose::identity();
        assert_relative_eq!(
            id.compose(&p).homogeneous(),
            p.homogeneous(),
            epsilon = 1e-15
        );
        assert!(p.compose(&p.invert()).frobenius_deviation() < 1e-9);
    }

    #[test]
    fn compose_pure_translations() {
        let a = Pose::from_translation(1.0, 0.0, 0.0);
        let b = Pose::from_translation(0.0, 2.0, 0.0);
        let c = a.compose(&b);
        assert_relative_eq!(c.translation(), Vector3::new(1.0, 2.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn frobenius_deviation_cases() {
        assert_eq!(Pose::identity().frobenius_deviation(), 0.0);
        assert_relative_eq!(
            Pose::from_translation(1.0, 0.0, 0.0).frobenius_deviation(),
            1.0,
            epsilon = 1e-12
        );
        // R - I = diag(-2, -2, 0) for a pi yaw.
        assert_relative_eq!(
            Pose::from_xyz_yaw(0.0, 0.0, 0.0, std::f64::consts::PI).frobenius_deviation(),
            8.0f64.sqrt(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn inverse_roundtrip_random() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = random_pose(&mut rng);
            assert!(p.compose(&p.invert()).frobenius_deviation() < 1e-9);
        }
    }

    #[test]
    fn exp_se3_matches_generators_to_first_order() {
        let h = 1e-7;
        for k in 0..6 {
            let mut v = [0.0; 6];
            v[k] = h;
            let p = exp_se3(&Twist::from_slice(&v));
            let numeric = (p.homogeneous() - Matrix4::identity()) / h;
            assert_relative_eq!(numeric, se3_generator(k), epsilon = 1e-6);
        }
    }

    #[test]
    fn wrap_angle_range() {
        assert_relative_eq!(wrap_angle(3.0 * std::f64::consts::PI), std::f64::consts::PI);
        assert_relative_eq!(wrap_angle(-3.1 - 3.1), 2.0 * std::f64::consts::PI - 6.2, epsilon = 1e-12);
        assert!(wrap_angle(-std::f64::consts::PI) > 0.0);
    }

    #[test]
    fn serde_roundtrip() {
        let p = Pose::from_xyz_yaw(1.5, -0.25, 3.0, 1.2);
        let s = serde_json::to_string(&p).unwrap();
        let back: Pose = serde_json::from_str(&s).unwrap();
        assert!(p.invert().compose(&back).frobenius_deviation() < 1e-12);
    }
}
