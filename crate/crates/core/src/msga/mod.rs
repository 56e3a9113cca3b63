//! Multi-criteria star graph association: score detection/tracklet star
//! pairs, gate, and solve the one-to-one matching.

mod assignment;
mod consistency;
mod icp;

pub use assignment::{brute_force_best_total, km_assign, Assignment};
pub use consistency::{
    edge_consistency, greedy_edge_match, neighborhood_score, pair_score, ConsistencyScore, Weights,
};
pub use icp::{fit_rigid_points, icp_point_to_point, shape_score, IcpConfig, IcpResult};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::GiouMode;
use crate::graph::FrameGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssocParams {
    pub weights: Weights,
    /// Combined-score gate tau; pairs below it are forbidden.
    pub tau: f64,
    pub icp: IcpConfig,
    pub giou_mode: GiouMode,
    /// Score candidate pairs across worker threads. Scores are identical
    /// either way; this only changes wall-clock.
    pub parallel: bool,
}

impl Default for AssocParams {
    fn default() -> Self {
        AssocParams {
            weights: Weights::default(),
            tau: 0.5,
            icp: IcpConfig::default(),
            giou_mode: GiouMode::Enclosing,
            parallel: false,
        }
    }
}

/// One matched detection/tracklet pair, by node id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchPair {
    pub detection: u64,
    pub tracklet: u64,
    pub score: ConsistencyScore,
}

/// Outcome of associating a query graph against a tracklet graph.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MatchResult {
    pub pairs: Vec<MatchPair>,
    /// Detection node ids that start new tracklets.
    pub births: Vec<u64>,
    /// Tracklet node ids left unmatched, for lifecycle handling.
    pub unmatched_tracklets: Vec<u64>,
}

/// Associates detections (query graph) with predicted tracklets (tracklet
/// graph). Candidates are tracklets within the graph distance threshold `L`
/// of a detection center; only candidates are scored, everything else is
/// forbidden in the assignment.
pub fn associate(qg: &FrameGraph, tg: &FrameGraph, params: &AssocParams) -> MatchResult {
    params.weights.validate().expect("invalid weights");
    if qg.is_empty() || tg.is_empty() {
        return MatchResult {
            pairs: Vec::new(),
            births: qg.stars.iter().map(|s| s.center.id).collect(),
            unmatched_tracklets: tg.stars.iter().map(|s| s.center.id).collect(),
        };
    }

    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for (qi, q) in qg.stars.iter().enumerate() {
        for (ti, t) in tg.stars.iter().enumerate() {
            if (q.center.box3.center() - t.center.box3.center()).norm() <= qg.l {
                candidates.push((qi, ti));
            }
        }
    }

    let score_one = |&(qi, ti): &(usize, usize)| {
        pair_score(&qg.stars[qi], &tg.stars[ti], params.weights, &params.icp, params.giou_mode)
    };
    let scored: Vec<ConsistencyScore> = if params.parallel {
        candidates.par_iter().map(score_one).collect()
    } else {
        candidates.iter().map(score_one).collect()
    };

    let mut matrix: Vec<Vec<Option<f64>>> = vec![vec![None; tg.len()]; qg.len()];
    let mut score_table: Vec<Vec<Option<ConsistencyScore>>> = vec![vec![None; tg.len()]; qg.len()];
    for (&(qi, ti), s) in candidates.iter().zip(scored.iter()) {
        matrix[qi][ti] = Some(s.combined);
        score_table[qi][ti] = Some(*s);
    }

    let assignment = km_assign(&matrix, params.tau);
    MatchResult {
        pairs: assignment
            .pairs
            .iter()
            .map(|&(qi, ti)| MatchPair {
                detection: qg.stars[qi].center.id,
                tracklet: tg.stars[ti].center.id,
                score: score_table[qi][ti].expect("matched pair was scored"),
            })
            .collect(),
        births: assignment.births.iter().map(|&qi| qg.stars[qi].center.id).collect(),
        unmatched_tracklets: assignment
            .unmatched_tracklets
            .iter()
            .map(|&ti| tg.stars[ti].center.id)
            .collect(),
    }
}
