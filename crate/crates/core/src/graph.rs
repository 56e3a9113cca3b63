//! Query/Tracklet graph construction: per-node local star graphs with
//! relative-transform edges to the K nearest neighbors within distance L.

use crate::geometry::{Box3, PointSet, Pose};

/// A graph node: one detection or one predicted tracklet in the world frame.
#[derive(Debug, Clone)]
pub struct Node {
    pub id: u64,
    /// World<-object pose, built from the box center and yaw.
    pub pose: Pose,
    pub box3: Box3,
    pub points: PointSet,
}

impl Node {
    pub fn from_box(id: u64, box3: Box3, points: PointSet) -> Self {
        Node { id, pose: box3.pose(), box3, points }
    }
}

/// One node and its neighbor edges. The edge transform for neighbor `m` is
/// `center.pose^-1 * m.pose`, i.e. the neighbor pose expressed in the center
/// object's frame.
#[derive(Debug, Clone)]
pub struct StarGraph {
    pub center: Node,
    pub neighbors: Vec<(Node, Pose)>,
}

impl StarGraph {
    pub fn edge_transforms(&self) -> impl Iterator<Item = &Pose> {
        self.neighbors.iter().map(|(_, e)| e)
    }
}

/// All star graphs of one frame, plus the construction parameters.
#[derive(Debug, Clone)]
pub struct FrameGraph {
    pub stars: Vec<StarGraph>,
    pub k: usize,
    pub l: f64,
}

impl FrameGraph {
    pub fn len(&self) -> usize {
        self.stars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stars.is_empty()
    }
}

/// Builds the frame graph: for each node, the nearest `k` nodes within
/// distance `l` (Euclidean, 3D, between box centers) become its neighbors,
/// sorted by ascending distance with ties broken by lower node id.
pub fn build_frame_graph(nodes: &[Node], k: usize, l: f64) -> FrameGraph {
    assert!(k >= 1, "neighbor count k must be >= 1");
    assert!(l > 0.0, "distance threshold l must be > 0");
    let stars = nodes
        .iter()
        .map(|center| {
            let mut cands: Vec<(f64, usize)> = nodes
                .iter()
                .enumerate()
                .filter(|(_, n)| n.id != center.id)
                .map(|(idx, n)| ((n.box3.center() - center.box3.center()).norm(), idx))
                .filter(|(d, _)| *d <= l)
                .collect();
            cands.sort_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .unwrap()
                    .then_with(|| nodes[a.1].id.cmp(&nodes[b.1].id))
            });
            cands.truncate(k);
            let inv_center = center.pose.invert();
            let neighbors = cands
                .into_iter()
                .map(|(_, idx)| {
                    let n = nodes[idx].clone();
                    let edge = inv_center.compose(&n.pose);
                    (n, edge)
                })
                .collect();
            StarGraph { center: center.clone(), neighbors }
        })
        .collect();
    FrameGraph { stars, k, l }
}
