//! Oriented 3D bounding boxes (gravity-aligned, yaw only).

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use super::pose::{wrap_angle, Pose};

/// An upright oriented box: center, (length, width, height) and yaw about +z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box3 {
    pub center: [f64; 3],
    /// (length, width, height), each > 0.
    pub dims: [f64; 3],
    /// Wrapped to (-pi, pi].
    pub yaw: f64,
}

impl Box3 {
    pub fn new(center: Vector3<f64>, dims: [f64; 3], yaw: f64) -> Self {
        Box3 {
            center: [center.x, center.y, center.z],
            dims,
            yaw: wrap_angle(yaw),
        }
    }

    pub fn center(&self) -> Vector3<f64> {
        Vector3::from(self.center)
    }

    pub fn volume(&self) -> f64 {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    /// The box center+yaw as a world<-object pose.
    pub fn pose(&self) -> Pose {
        Pose::from_xyz_yaw(self.center[0], self.center[1], self.center[2], self.yaw)
    }

    /// Bird's-eye-view footprint corners, counter-clockwise.
    pub fn bev_corners(&self) -> [Vector2<f64>; 4] {
        let (hl, hw) = (self.dims[0] / 2.0, self.dims[1] / 2.0);
        let (c, s) = (self.yaw.cos(), self.yaw.sin());
        let rot = |x: f64, y: f64| {
            Vector2::new(
                self.center[0] + c * x - s * y,
                self.center[1] + s * x + c * y,
            )
        };
        [rot(hl, hw), rot(-hl, hw), rot(-hl, -hw), rot(hl, -hw)]
    }

    /// Vertical extent [z_min, z_max].
    pub fn z_interval(&self) -> (f64, f64) {
        let hh = self.dims[2] / 2.0;
        (self.center[2] - hh, self.center[2] + hh)
    }

    /// All 8 corners in world coordinates.
    pub fn corners(&self) -> [Vector3<f64>; 8] {
        let bev = self.bev_corners();
        let (z0, z1) = self.z_interval();
        let mut out = [Vector3::zeros(); 8];
        for (i, c) in bev.iter().enumerate() {
            out[i] = Vector3::new(c.x, c.y, z0);
            out[i + 4] = Vector3::new(c.x, c.y, z1);
        }
        out
    }

    /// Maps this box by a rigid transform. Valid for yaw-only rotations of
    /// upright boxes (the simulator and tracker never roll or pitch boxes).
    pub fn transformed(&self, t: &Pose) -> Box3 {
        let center = t.transform_point(&self.center());
        Box3::new(center, self.dims, self.yaw + t.yaw())
    }

    /// True if `p` lies within `margin` times the box half-extent on every
    /// body axis.
    pub fn contains_scaled(&self, p: &Vector3<f64>, margin: f64) -> bool {
        let local = self.pose().invert().transform_point(p);
        local.x.abs() <= margin * self.dims[0] / 2.0
            && local.y.abs() <= margin * self.dims[1] / 2.0
            && local.z.abs() <= margin * self.dims[2] / 2.0
    }
}
