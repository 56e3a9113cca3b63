//! Neighborhood, spatial, and shape consistency between star graphs.

use serde::{Deserialize, Serialize};

use crate::geometry::{ngiou_mode, GiouMode, Pose};
use crate::graph::StarGraph;

use super::icp::{shape_score, IcpConfig};

/// Criterion weights (neighborhood, spatial, shape); must sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights(pub [f64; 3]);

impl Default for Weights {
    fn default() -> Self {
        Weights([0.3, 0.4, 0.3])
    }
}

impl Weights {
    pub fn validate(&self) -> crate::Result<()> {
        if self.0.iter().any(|w| *w < 0.0) {
            return Err(crate::Error::config("lambda", "weights must be >= 0"));
        }
        let sum: f64 = self.0.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(crate::Error::config("lambda", format!("weights sum to {sum}, expected 1")));
        }
        Ok(())
    }

    /// Zeroes the given components and renormalizes the rest; used by the
    /// ablation switches.
    pub fn ablated(&self, neighborhood: bool, spatial: bool, shape: bool) -> Weights {
        let mut w = self.0;
        if neighborhood {
            w[0] = 0.0;
        }
        if spatial {
            w[1] = 0.0;
        }
        if shape {
            w[2] = 0.0;
        }
        let sum: f64 = w.iter().sum();
        assert!(sum > 0.0, "cannot ablate every consistency criterion");
        Weights([w[0] / sum, w[1] / sum, w[2] / sum])
    }
}

/// Per-pair consistency breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyScore {
    pub neighborhood: f64,
    pub spatial: f64,
    pub shape: f64,
    pub combined: f64,
    pub weights: Weights,
}

impl ConsistencyScore {
    pub fn combine(neighborhood: f64, spatial: f64, shape: f64, weights: Weights) -> Self {
        let [l1, l2, l3] = weights.0;
        ConsistencyScore {
            neighborhood,
            spatial,
            shape,
            combined: l1 * neighborhood + l2 * spatial + l3 * shape,
            weights,
        }
    }
}

/// Similarity of two relative-transform edges:
/// `exp(-|T_q * T_t^-1 - I|_F)`, 1 iff identical.
pub fn edge_consistency(e_q: &Pose, e_t: &Pose) -> f64 {
    (-e_q.compose(&e_t.invert()).frobenius_deviation()).exp()
}

/// Greedy neighbor strategy: every query edge picks the tracklet edge with
/// the highest consistency (ties to the lower tracklet edge index). A
/// tracklet edge may be picked more than once.
pub fn greedy_edge_match(g_q: &StarGraph, g_t: &StarGraph) -> Vec<(usize, usize, f64)> {
    if g_t.neighbors.is_empty() {
        return Vec::new();
    }
    g_q.neighbors
        .iter()
        .enumerate()
        .map(|(qi, (_, e_q))| {
            let mut best = (0usize, f64::NEG_INFINITY);
            for (ti, (_, e_t)) in g_t.neighbors.iter().enumerate() {
                let l = edge_consistency(e_q, e_t);
                if l > best.1 {
                    best = (ti, l);
                }
            }
            (qi, best.0, best.1)
        })
        .collect()
}

/// Mean edge consistency over the greedy matching. Two neighborless stars
/// are vacuously consistent (1.0); a star mismatch in which exactly one side
/// is neighborless is structural evidence against identity (0.0).
pub fn neighborhood_score(g_q: &StarGraph, g_t: &StarGraph) -> f64 {
    match (g_q.neighbors.is_empty(), g_t.neighbors.is_empty()) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        (false, false) => {
            let pairs = greedy_edge_match(g_q, g_t);
            let sum: f64 = pairs.iter().map(|(_, _, l)| l).sum();
            sum / pairs.len() as f64
        }
    }
}

/// Full multi-criteria consistency of a query star against a tracklet star.
pub fn pair_score(
    g_q: &StarGraph,
    g_t: &StarGraph,
    weights: Weights,
    icp: &IcpConfig,
    giou_mode: GiouMode,
) -> ConsistencyScore {
    let neighborhood = neighborhood_score(g_q, g_t);
    let spatial = ngiou_mode(&g_q.center.box3, &g_t.center.box3, giou_mode);
    // ICP initialization maps the detection's box frame onto the tracklet's.
    let init = g_t.center.pose.compose(&g_q.center.pose.invert());
    let shape = shape_score(&g_q.center.points, &g_t.center.points, &init, icp);
    ConsistencyScore::combine(neighborhood, spatial, shape, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Box3, PointFrame, PointSet};
    use crate::graph::{build_frame_graph, Node};
    use approx::assert_relative_eq;
    use nalgebra::Vector3;

    fn star(center_id: u64, centers: &[(f64, f64)]) -> StarGraph {
        let nodes: Vec<Node> = centers
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| {
                Node::from_box(
                    i as u64,
                    Box3::new(Vector3::new(x, y, 0.75), [4.2, 1.9, 1.5], 0.0),
                    PointSet::empty(PointFrame::World),
                )
            })
            .collect();
        build_frame_graph(&nodes, 4, 8.0)
            .stars
            .into_iter()
            .find(|s| s.center.id == center_id)
            .unwrap()
    }

    #[test]
    fn edge_consistency_analytic_values() {
        let id = Pose::identity();
        assert_eq!(edge_consistency(&id, &id), 1.0);
        assert_relative_eq!(
            edge_consistency(&Pose::from_translation(1.0, 0.0, 0.0), &id),
            (-1.0f64).exp(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            edge_consistency(&Pose::from_xyz_yaw(0.0, 0.0, 0.0, std::f64::consts::PI), &id),
            (-(8.0f64.sqrt())).exp(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn greedy_picks_exact_duplicate() {
        let g_q = star(0, &[(0.0, 0.0), (2.0, 0.0)]);
        let g_t = star(0, &[(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)]);
        let pairs = greedy_edge_match(&g_q, &g_t);
        assert_eq!(pairs.len(), 1);
        let (qi, ti, l) = pairs[0];
        assert_eq!((qi, ti), (0, 0));
        assert_relative_eq!(l, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn greedy_with_empty_tracklet_star() {
        let g_q = star(0, &[(0.0, 0.0), (2.0, 0.0)]);
        let g_t = star(0, &[(0.0, 0.0)]);
        assert!(greedy_edge_match(&g_q, &g_t).is_empty());
    }

    #[test]
    fn identical_stars_score_one() {
        let g = star(1, &[(0.0, 0.0), (2.0, 1.0), (4.0, -1.0)]);
        let pairs = greedy_edge_match(&g, &g);
        assert_eq!(pairs.len(), g.neighbors.len());
        assert!(pairs.iter().all(|(_, _, l)| (l - 1.0).abs() < 1e-12));
        assert_relative_eq!(neighborhood_score(&g, &g), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn neighborless_star_conventions() {
        let lone = star(0, &[(0.0, 0.0)]);
        let busy = star(0, &[(0.0, 0.0), (2.0, 0.0)]);
        assert_eq!(neighborhood_score(&lone, &lone), 1.0);
        assert_eq!(neighborhood_score(&lone, &busy), 0.0);
        assert_eq!(neighborhood_score(&busy, &lone), 0.0);
    }

    #[test]
    fn weight_projection_isolates_component() {
        let g_q = star(0, &[(0.0, 0.0), (2.0, 0.5)]);
        let g_t = star(0, &[(0.3, 0.0), (2.0, 0.4)]);
        let icp = IcpConfig::default();
        let full = pair_score(&g_q, &g_t, Weights([1.0, 0.0, 0.0]), &icp, GiouMode::Enclosing);
        assert_relative_eq!(full.combined, neighborhood_score(&g_q, &g_t), epsilon = 1e-12);
        let spatial = pair_score(&g_q, &g_t, Weights([0.0, 1.0, 0.0]), &icp, GiouMode::Enclosing);
        assert_relative_eq!(
            spatial.combined,
            crate::geometry::ngiou(&g_q.center.box3, &g_t.center.box3),
            epsilon = 1e-12
        );
    }

    #[test]
    fn identical_pair_scores_one_for_any_weights() {
        let mut nodes = Vec::new();
        for (i, &(x, y)) in [(0.0, 0.0), (2.5, 1.0), (4.0, -2.0)].iter().enumerate() {
            let b = Box3::new(Vector3::new(x, y, 0.75), [4.4, 1.8, 1.5], 0.2 * i as f64);
            let mut rng = <rand_chacha::ChaCha12Rng as rand::SeedableRng>::seed_from_u64(i as u64);
            let points = crate::sim::sample_surface_points(&b, 30, 0.0, &mut rng);
            nodes.push(Node::from_box(i as u64, b, points));
        }
        let g = build_frame_graph(&nodes, 3, 8.0);
        let icp = IcpConfig::default();
        for w in [Weights::default(), Weights([0.5, 0.25, 0.25]), Weights([0.1, 0.1, 0.8])] {
            let s = pair_score(&g.stars[0], &g.stars[0], w, &icp, GiouMode::Enclosing);
            assert_relative_eq!(s.combined, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn ablation_renormalizes() {
        let w = Weights::default().ablated(false, false, true);
        assert_relative_eq!(w.0[0] + w.0[1], 1.0, epsilon = 1e-12);
        assert_eq!(w.0[2], 0.0);
        w.validate().unwrap();
    }
}
