//! Point-to-point ICP and the shape-consistency score.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::geometry::{PointSet, Pose};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IcpConfig {
    pub max_iterations: usize,
    /// Correspondences beyond this distance are rejected; also the
    /// registration-success radius for the fitness count.
    pub max_correspondence_distance: f64,
    /// Stop when the incremental update deviates from identity by less than
    /// this (Frobenius).
    pub convergence_tol: f64,
    /// Try four yaw seeds at 90-degree increments about the source centroid
    /// before refining; guards against near-symmetric vehicle shapes.
    pub yaw_hypotheses: bool,
}

impl Default for IcpConfig {
    fn default() -> Self {
        IcpConfig {
            max_iterations: 30,
            max_correspondence_distance: 0.3,
            convergence_tol: 1e-6,
            yaw_hypotheses: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IcpResult {
    /// Maps source points onto the target cloud.
    pub transform: Pose,
    /// Fraction of source points within the correspondence radius of the
    /// target after alignment.
    pub inlier_fraction: f64,
    pub iterations: usize,
}

/// Least-squares rigid fit mapping `src[i]` onto `dst[i]` (Kabsch). Returns
/// `None` for fewer than 3 pairs.
pub fn fit_rigid_points(src: &[Vector3<f64>], dst: &[Vector3<f64>]) -> Option<Pose> {
    if src.len() < 3 || src.len() != dst.len() {
        return None;
    }
    let n = src.len() as f64;
    let sc: Vector3<f64> = src.iter().sum::<Vector3<f64>>() / n;
    let dc: Vector3<f64> = dst.iter().sum::<Vector3<f64>>() / n;
    let mut h = Matrix3::zeros();
    for (s, d) in src.iter().zip(dst.iter()) {
        h += (s - sc) * (d - dc).transpose();
    }
    let svd = h.svd(true, true);
    let (u, v_t) = (svd.u?, svd.v_t?);
    let mut d = Matrix3::identity();
    if (v_t.transpose() * u.transpose()).determinant() < 0.0 {
        d[(2, 2)] = -1.0;
    }
    let r = v_t.transpose() * d * u.transpose();
    let t = dc - r * sc;
    Some(Pose::from_rotation_matrix(&r, t))
}

fn nearest(target: &[Vector3<f64>], p: &Vector3<f64>) -> (usize, f64) {
    let mut best = (0usize, f64::INFINITY);
    for (i, t) in target.iter().enumerate() {
        let d2 = (t - p).norm_squared();
        if d2 < best.1 {
            best = (i, d2);
        }
    }
    (best.0, best.1.sqrt())
}

/// Aligns `source` onto `target` starting from `init`.
pub fn icp_point_to_point(
    source: &[Vector3<f64>],
    target: &[Vector3<f64>],
    init: &Pose,
    cfg: &IcpConfig,
) -> IcpResult {
    let mut transform = *init;
    let mut iterations = 0;
    if !source.is_empty() && !target.is_empty() {
        let mut moved: Vec<Vector3<f64>> = source.iter().map(|p| transform.transform_point(p)).collect();
        for _ in 0..cfg.max_iterations {
            let mut pair_src = Vec::with_capacity(moved.len());
            let mut pair_dst = Vec::with_capacity(moved.len());
            for m in &moved {
                let (idx, dist) = nearest(target, m);
                if dist <= cfg.max_correspondence_distance {
                    pair_src.push(*m);
                    pair_dst.push(target[idx]);
                }
            }
            let Some(step) = fit_rigid_points(&pair_src, &pair_dst) else {
                break;
            };
            iterations += 1;
            transform = step.compose(&transform);
            for m in moved.iter_mut() {
                *m = step.transform_point(m);
            }
            if step.frobenius_deviation() < cfg.convergence_tol {
                break;
            }
        }
    }
    let inlier_fraction = if source.is_empty() {
        0.0
    } else {
        let inliers = source
            .iter()
            .filter(|p| {
                let m = transform.transform_point(p);
                !target.is_empty() && nearest(target, &m).1 <= cfg.max_correspondence_distance
            })
            .count();
        inliers as f64 / source.len() as f64
    };
    IcpResult { transform, inlier_fraction, iterations }
}

/// Shape consistency: registered-point fraction `n_c / max(|p|, |q|)` after
/// ICP alignment of `p` onto `q`, starting from the relative pose of the two
/// boxes. Returns 0 when either cloud is empty.
pub fn shape_score(p: &PointSet, q: &PointSet, init: &Pose, cfg: &IcpConfig) -> f64 {
    if p.is_empty() || q.is_empty() {
        return 0.0;
    }
    let src: Vec<Vector3<f64>> = p.iter_vectors().collect();
    let dst: Vec<Vector3<f64>> = q.iter_vectors().collect();

    let centroid = p.centroid().expect("non-empty");
    let seeds: &[f64] = if cfg.yaw_hypotheses {
        &[0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI, -std::f64::consts::FRAC_PI_2]
    } else {
        &[0.0]
    };
    let mut best_count = 0usize;
    for &yaw in seeds {
        let seed_init = if yaw == 0.0 {
            *init
        } else {
            // Rotate the source about its own centroid before applying the
            // box-relative initialization.
            let spin = Pose::from_translation(centroid.x, centroid.y, centroid.z)
                .compose(&Pose::from_xyz_yaw(0.0, 0.0, 0.0, yaw))
                .compose(&Pose::from_translation(-centroid.x, -centroid.y, -centroid.z));
            init.compose(&spin)
        };
        let result = icp_point_to_point(&src, &dst, &seed_init, cfg);
        let count = (result.inlier_fraction * src.len() as f64).round() as usize;
        if count > best_count {
            best_count = count;
        }
        if best_count == src.len() {
            break;
        }
    }
    best_count as f64 / p.len().max(q.len()) as f64
}
