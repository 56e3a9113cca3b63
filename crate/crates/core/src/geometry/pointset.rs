//! Point clouds attached to detections and tracklets.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::pose::Pose;

/// Coordinate frame a point set is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointFrame {
    World,
    Sensor,
}

/// A (possibly empty) set of 3D points with a frame tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub points: Vec<[f64; 3]>,
    pub frame: PointFrame,
}

impl PointSet {
    pub fn empty(frame: PointFrame) -> Self {
        PointSet { points: Vec::new(), frame }
    }

    pub fn from_vectors(points: Vec<Vector3<f64>>, frame: PointFrame) -> Self {
        PointSet {
            points: points.into_iter().map(|p| [p.x, p.y, p.z]).collect(),
            frame,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter_vectors(&self) -> impl Iterator<Item = Vector3<f64>> + '_ {
        self.points.iter().map(|p| Vector3::from(*p))
    }

    /// Returns the point set mapped by `t`, retagged with `frame`.
    pub fn transformed(&self, t: &Pose, frame: PointFrame) -> PointSet {
        PointSet {
            points: self
                .points
                .iter()
                .map(|p| {
                    let q = t.transform_point(&Vector3::from(*p));
                    [q.x, q.y, q.z]
                })
                .collect(),
            frame,
        }
    }

    pub fn centroid(&self) -> Option<Vector3<f64>> {
        if self.is_empty() {
            return None;
        }
        let sum: Vector3<f64> = self.iter_vectors().sum();
        Some(sum / self.len() as f64)
    }
}
