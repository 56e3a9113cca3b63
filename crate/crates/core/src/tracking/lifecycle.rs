//! Tracklet lifecycle: birth, confirmation, death, and motion prediction to
//! the query time.

use std::collections::BTreeMap;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::geometry::{wrap_angle, Box3, PointFrame, PointSet, Pose};
use crate::msga::MatchResult;
use crate::sim::Detection;

use super::kalman::{measurement_from_box, BoxFilter, KalmanConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackStatus {
    Tentative,
    Confirmed,
    Dead,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerConfig {
    /// Matches needed to confirm a tentative tracklet (birth counts as one).
    pub confirm_hits: u32,
    /// Consecutive missed frames before a tracklet dies.
    pub max_age: u32,
    pub kalman: KalmanConfig,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig { confirm_hits: 2, max_age: 3, kalman: KalmanConfig::default() }
    }
}

/// One maintained object hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tracklet {
    pub id: u64,
    pub filter: BoxFilter,
    pub hits: u32,
    pub misses: u32,
    pub status: TrackStatus,
    /// Frame index of the last matched detection.
    pub last_seen: usize,
    /// Frame the tracklet was born in.
    pub born: usize,
    /// Refined world-frame pose per observed frame (frame index -> pose).
    pub history: BTreeMap<usize, Pose>,
    /// Latest world-frame surface cloud.
    pub points: PointSet,
    /// Total number of frames this tracklet was observed in.
    pub observation_count: u32,
}

impl Tracklet {
    fn born_from(id: u64, frame: usize, world_box: &Box3, points: PointSet, cfg: &TrackerConfig) -> Self {
        let z = measurement_from_box(world_box);
        let filter = BoxFilter::from_measurement(&z, &cfg.kalman);
        let mut history = BTreeMap::new();
        history.insert(frame, world_box.pose());
        Tracklet {
            id,
            filter,
            hits: 1,
            misses: 0,
            status: TrackStatus::Tentative,
            last_seen: frame,
            born: frame,
            history,
            points,
            observation_count: 1,
        }
    }

    pub fn world_box(&self) -> Box3 {
        let s = &self.filter.state;
        Box3::new(Vector3::new(s[0], s[1], s[2]), [s[4], s[5], s[6]], s[3])
    }

    pub fn pose(&self) -> Pose {
        self.world_box().pose()
    }

    pub fn is_alive(&self) -> bool {
        self.status != TrackStatus::Dead
    }

    /// Estimated speed magnitude; the promotion rule treats tracklets below
    /// a threshold as static.
    pub fn speed(&self) -> f64 {
        self.filter.velocity_norm()
    }

    /// Velocity is meaningless until a second observation fixes it.
    pub fn velocity_observable(&self) -> bool {
        self.hits >= 2
    }

    fn apply_match(&mut self, frame: usize, world_box: &Box3, points: PointSet, cfg: &TrackerConfig) {
        let z = measurement_from_box(world_box);
        self.filter.update(&z, &cfg.kalman);
        self.hits += 1;
        self.misses = 0;
        self.last_seen = frame;
        self.observation_count += 1;
        self.points = points;
        self.history.insert(frame, self.pose());
        if self.status == TrackStatus::Tentative && self.hits >= cfg.confirm_hits {
            self.status = TrackStatus::Confirmed;
        }
    }

    /// Overwrites the pose part of the state with an optimizer-refined pose.
    /// Velocities and dims stay; the history entry for `frame` follows.
    pub fn adopt_refined_pose(&mut self, frame: usize, pose: &Pose) {
        let t = pose.translation();
        self.filter.state[0] = t.x;
        self.filter.state[1] = t.y;
        self.filter.state[2] = t.z;
        self.filter.state[3] = wrap_angle(pose.yaw());
        self.history.insert(frame, *pose);
    }
}

/// The tracklet store. Single writer per frame step; ids are monotone and
/// never reused.
#[derive(Debug, Clone, Default)]
pub struct Tracker {
    pub config: TrackerConfig,
    tracks: Vec<Tracklet>,
    next_id: u64,
}

impl Tracker {
    pub fn new(config: TrackerConfig) -> Self {
        Tracker { config, tracks: Vec::new(), next_id: 0 }
    }

    /// Tracklets eligible for graph building and association.
    pub fn active(&self) -> impl Iterator<Item = &Tracklet> {
        self.tracks.iter().filter(|t| t.is_alive())
    }

    pub fn get(&self, id: u64) -> Option<&Tracklet> {
        self.tracks.iter().find(|t| t.id == id)
    }

    pub fn get_mut(&mut self, id: u64) -> Option<&mut Tracklet> {
        self.tracks.iter_mut().find(|t| t.id == id)
    }

    pub fn all(&self) -> &[Tracklet] {
        &self.tracks
    }

    /// Kalman-predicts every active tracklet to the query time.
    pub fn predict(&mut self, dt: f64) {
        let kalman = self.config.kalman;
        for t in self.tracks.iter_mut().filter(|t| t.is_alive()) {
            t.filter.predict(dt, &kalman);
        }
    }

    /// Applies a match result: updates matched tracklets, ages unmatched
    /// ones, births new tentative tracklets. `world_detections` maps the
    /// per-frame detection list into the world frame, aligned by index with
    /// the detection ids used in `match_result`.
    pub fn step_lifecycle(
        &mut self,
        frame: usize,
        match_result: &MatchResult,
        world_detections: &[(Box3, PointSet)],
    ) -> LifecycleSummary {
        let mut summary = LifecycleSummary::default();
        for pair in &match_result.pairs {
            let (world_box, points) = &world_detections[pair.detection as usize];
            let cfg = self.config;
            let t = self
                .get_mut(pair.tracklet)
                .expect("matched tracklet exists");
            t.apply_match(frame, world_box, points.clone(), &cfg);
            summary.updated.push(pair.tracklet);
        }
        for &tid in &match_result.unmatched_tracklets {
            let max_age = self.config.max_age;
            if let Some(t) = self.get_mut(tid) {
                t.misses += 1;
                if t.misses >= max_age {
                    t.status = TrackStatus::Dead;
                    summary.died.push(tid);
                }
            }
        }
        for &det_id in &match_result.births {
            let (world_box, points) = &world_detections[det_id as usize];
            let id = self.next_id;
            self.next_id += 1;
            self.tracks
                .push(Tracklet::born_from(id, frame, world_box, points.clone(), &self.config));
            summary.born.push(id);
        }
        summary
    }

    /// Tracklets reported as current-frame output: confirmed ones, plus
    /// newly born ones still inside the confirmation grace window.
    pub fn reported(&self, frame: usize) -> Vec<&Tracklet> {
        self.tracks
            .iter()
            .filter(|t| t.is_alive() && t.last_seen == frame)
            .filter(|t| {
                t.status == TrackStatus::Confirmed
                    || (frame - t.born) < self.config.confirm_hits as usize
            })
            .collect()
    }

    pub fn total_births(&self) -> u64 {
        self.next_id
    }
}

#[derive(Debug, Clone, Default)]
pub struct LifecycleSummary {
    pub updated: Vec<u64>,
    pub born: Vec<u64>,
    pub died: Vec<u64>,
}

/// Transforms a sensor-frame detection into the world frame under the given
/// ego pose estimate.
pub fn detection_to_world(det: &Detection, ego: &Pose) -> (Box3, PointSet) {
    (
        det.box3.transformed(ego),
        det.points.transformed(ego, PointFrame::World),
    )
}
