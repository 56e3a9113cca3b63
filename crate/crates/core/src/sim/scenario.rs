//! Scenario data model: ground truth plus per-frame sensor data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Box3, PointSet, Pose};

use super::config::SimConfig;

/// One simulated object detection in the sensor frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    #[serde(rename = "box")]
    pub box3: Box3,
    pub points: PointSet,
    /// Ground-truth agent id; withheld from the tracker, used by metrics.
    pub gt_agent_id: Option<u32>,
    pub clutter: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkObs {
    pub id: u32,
    /// Observed position in the sensor frame.
    pub point: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub index: usize,
    pub time: f64,
    /// World<-sensor ground truth.
    pub ego_gt: Pose,
    /// Drifting odometry estimate of the same pose.
    pub ego_odom: Pose,
    pub detections: Vec<Detection>,
    pub landmark_obs: Vec<LandmarkObs>,
}

/// Per-agent ground truth over the whole run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentTruth {
    pub id: u32,
    pub dims: [f64; 3],
    pub is_static: bool,
    /// World<-object pose per frame.
    pub poses: Vec<Pose>,
    /// Whether the agent was within sensor range and field of view.
    pub visible: Vec<bool>,
}

impl AgentTruth {
    pub fn box_at(&self, frame: usize) -> Box3 {
        let p = &self.poses[frame];
        let t = p.translation();
        Box3::new(t, self.dims, p.yaw())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub config: SimConfig,
    pub seed: u64,
    pub landmarks_gt: Vec<[f64; 3]>,
    pub agents_gt: Vec<AgentTruth>,
    pub frames: Vec<Frame>,
}

impl Scenario {
    /// Checks the structural invariants of a scenario. Returns the first
    /// violation found.
    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        let mut prev_time: Option<f64> = None;
        for (i, f) in self.frames.iter().enumerate() {
            if f.index != i {
                return Err(Error::Eval(format!("frame {i}: index field is {}", f.index)));
            }
            if let Some(p) = prev_time {
                let dt = f.time - p;
                if dt <= 0.0 || (dt - self.config.dt).abs() > 1e-9 {
                    return Err(Error::Eval(format!(
                        "frame {i}: timestamp step {dt} differs from dt {}",
                        self.config.dt
                    )));
                }
            }
            prev_time = Some(f.time);
            for (name, pose) in [("ego_gt", &f.ego_gt), ("ego_odom", &f.ego_odom)] {
                let norm = pose.unit_quaternion().as_ref().norm();
                if (norm - 1.0).abs() > 1e-9 {
                    return Err(Error::Eval(format!(
                        "frame {i}: {name} quaternion norm {norm} is not unit"
                    )));
                }
            }
            for (d_idx, d) in f.detections.iter().enumerate() {
                if d.box3.dims.iter().any(|&x| !(x > 0.0)) {
                    return Err(Error::Eval(format!(
                        "frame {i} detection {d_idx}: non-positive dims"
                    )));
                }
                for p in d.points.iter_vectors() {
                    if !d.box3.contains_scaled(&p, 1.5) {
                        return Err(Error::Eval(format!(
                            "frame {i} detection {d_idx}: point outside 1.5x box extent"
                        )));
                    }
                }
            }
            for o in &f.landmark_obs {
                if o.id as usize >= self.landmarks_gt.len() {
                    return Err(Error::Eval(format!(
                        "frame {i}: landmark observation references unknown id {}",
                        o.id
                    )));
                }
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for a in &self.agents_gt {
            if !seen.insert(a.id) {
                return Err(Error::Eval(format!("duplicate agent id {}", a.id)));
            }
            if a.poses.len() != self.frames.len() || a.visible.len() != self.frames.len() {
                return Err(Error::Eval(format!(
                    "agent {}: ground-truth sequence length mismatch",
                    a.id
                )));
            }
        }
        Ok(())
    }

    /// Ground-truth boxes of agents visible at `frame`, as (agent id, box).
    pub fn visible_gt_boxes(&self, frame: usize) -> Vec<(u32, Box3)> {
        self.agents_gt
            .iter()
            .filter(|a| a.visible[frame])
            .map(|a| (a.id, a.box_at(frame)))
            .collect()
    }

    pub fn ego_gt_trajectory(&self) -> Vec<Pose> {
        self.frames.iter().map(|f| f.ego_gt).collect()
    }
}
