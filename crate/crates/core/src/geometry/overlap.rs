//! Volumetric overlap of upright oriented boxes.
//!
//! Intersection is computed as the bird's-eye-view convex polygon overlap
//! (Sutherland-Hodgman clipping of the two yaw-rotated footprints) times the
//! vertical interval overlap.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use super::box3::Box3;

/// Which enclosing region the generalized-IoU penalty term uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GiouMode {
    /// Convex hull of both BEV footprints times the joint vertical span.
    /// This is the minimum upright enclosing region, so identical boxes
    /// score exactly 1; for axis-aligned boxes it coincides with the
    /// minimum axis-aligned enclosing box.
    #[default]
    Enclosing,
    /// Literal union-based penalty; algebraically 2*IoU - 1.
    Literal,
}

/// Clips `subject` against one half-plane defined by the directed edge
/// `(a, b)` (inside = left of the edge).
fn clip_edge(subject: &[Vector2<f64>], a: Vector2<f64>, b: Vector2<f64>) -> Vec<Vector2<f64>> {
    let mut out = Vec::with_capacity(subject.len() + 1);
    let edge = b - a;
    let side = |p: Vector2<f64>| edge.x * (p.y - a.y) - edge.y * (p.x - a.x);
    for i in 0..subject.len() {
        let cur = subject[i];
        let prev = subject[(i + subject.len() - 1) % subject.len()];
        let (sc, sp) = (side(cur), side(prev));
        if sc >= 0.0 {
            if sp < 0.0 {
                out.push(intersect(prev, cur, a, b));
            }
            out.push(cur);
        } else if sp >= 0.0 {
            out.push(intersect(prev, cur, a, b));
        }
    }
    out
}

fn intersect(p1: Vector2<f64>, p2: Vector2<f64>, a: Vector2<f64>, b: Vector2<f64>) -> Vector2<f64> {
    let d1 = p2 - p1;
    let d2 = b - a;
    let denom = d1.x * d2.y - d1.y * d2.x;
    if denom.abs() < 1e-15 {
        return p1;
    }
    let t = ((a.x - p1.x) * d2.y - (a.y - p1.y) * d2.x) / denom;
    p1 + d1 * t
}

/// Monotone-chain convex hull, counter-clockwise without the repeated
/// endpoint.
fn convex_hull(points: &[Vector2<f64>]) -> Vec<Vector2<f64>> {
    let mut pts: Vec<Vector2<f64>> = points.to_vec();
    pts.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap()));
    pts.dedup_by(|a, b| a.x == b.x && a.y == b.y);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: &Vector2<f64>, a: &Vector2<f64>, b: &Vector2<f64>| {
        (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
    };
    let mut lower: Vec<Vector2<f64>> = Vec::with_capacity(pts.len());
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<Vector2<f64>> = Vec::with_capacity(pts.len());
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn polygon_area(poly: &[Vector2<f64>]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        acc += p.x * q.y - q.x * p.y;
    }
    acc.abs() / 2.0
}

/// BEV intersection area of the two box footprints.
pub fn bev_intersection_area(a: &Box3, b: &Box3) -> f64 {
    let mut poly: Vec<Vector2<f64>> = a.bev_corners().to_vec();
    let clip = b.bev_corners();
    for i in 0..4 {
        if poly.is_empty() {
            return 0.0;
        }
        poly = clip_edge(&poly, clip[i], clip[(i + 1) % 4]);
    }
    polygon_area(&poly)
}

/// Geometric intersection volume; 0 for disjoint boxes.
pub fn intersection_volume(a: &Box3, b: &Box3) -> f64 {
    let (az0, az1) = a.z_interval();
    let (bz0, bz1) = b.z_interval();
    let dz = (az1.min(bz1) - az0.max(bz0)).max(0.0);
    if dz == 0.0 {
        return 0.0;
    }
    bev_intersection_area(a, b) * dz
}

pub fn iou3d(a: &Box3, b: &Box3) -> f64 {
    let inter = intersection_volume(a, b);
    let union = a.volume() + b.volume() - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

/// Generalized IoU over 3D boxes, in (-1, 1]; 1 iff the boxes are identical.
pub fn giou3d(a: &Box3, b: &Box3) -> f64 {
    giou3d_mode(a, b, GiouMode::Enclosing)
}

pub fn giou3d_mode(a: &Box3, b: &Box3, mode: GiouMode) -> f64 {
    let inter = intersection_volume(a, b);
    let union = a.volume() + b.volume() - inter;
    let iou = if union <= 0.0 { 0.0 } else { inter / union };
    match mode {
        GiouMode::Literal => 2.0 * iou - 1.0,
        GiouMode::Enclosing => {
            let pts: Vec<Vector2<f64>> = a
                .bev_corners()
                .iter()
                .chain(b.bev_corners().iter())
                .copied()
                .collect();
            let hull_area = polygon_area(&convex_hull(&pts));
            let (az0, az1) = a.z_interval();
            let (bz0, bz1) = b.z_interval();
            let enclosing = hull_area * (az1.max(bz1) - az0.min(bz0));
            if enclosing <= 0.0 {
                return iou;
            }
            iou - (enclosing - union) / enclosing
        }
    }
}

/// Generalized IoU affinely mapped to [0, 1].
pub fn ngiou(a: &Box3, b: &Box3) -> f64 {
    ngiou_mode(a, b, GiouMode::Enclosing)
}

pub fn ngiou_mode(a: &Box3, b: &Box3, mode: GiouMode) -> f64 {
    (giou3d_mode(a, b, mode) + 1.0) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::Vector3;
    use rand::{Rng as _, SeedableRng};

    fn cube_at(x: f64) -> Box3 {
        Box3::new(Vector3::new(x, 0.0, 0.0), [1.0, 1.0, 1.0], 0.0)
    }

    #[test]
    fn identical_and_disjoint_cubes() {
        assert_relative_eq!(intersection_volume(&cube_at(0.0), &cube_at(0.0)), 1.0, epsilon = 1e-12);
        assert_relative_eq!(intersection_volume(&cube_at(0.0), &cube_at(10.0)), 0.0);
        assert_relative_eq!(intersection_volume(&cube_at(0.0), &cube_at(0.5)), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn giou_analytic_cases() {
        assert_relative_eq!(giou3d(&cube_at(0.0), &cube_at(0.0)), 1.0, epsilon = 1e-12);
        // Offset 0.5: IoU = (0.5/1.5), enclosing box = 1.5, union = 1.5.
        assert_relative_eq!(giou3d(&cube_at(0.0), &cube_at(0.5)), 1.0 / 3.0, epsilon = 1e-12);
        // 10 m apart: IoU = 0, enclosing = 11, union = 2.
        assert_relative_eq!(giou3d(&cube_at(0.0), &cube_at(10.0)), -9.0 / 11.0, epsilon = 1e-12);
        assert_relative_eq!(ngiou(&cube_at(0.0), &cube_at(10.0)), 1.0 / 11.0, epsilon = 1e-12);
        assert_relative_eq!(ngiou(&cube_at(0.0), &cube_at(0.5)), 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(ngiou(&cube_at(0.0), &cube_at(0.0)), 1.0);
    }

    #[test]
    fn identical_rotated_boxes_score_one() {
        let b = Box3::new(Vector3::new(2.0, -1.0, 0.7), [4.5, 1.9, 1.5], 0.83);
        assert_relative_eq!(giou3d(&b, &b), 1.0, epsilon = 1e-12);
        assert_relative_eq!(ngiou(&b, &b), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn giou_symmetric_on_random_boxes() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(17);
        for _ in 0..300 {
            let a = random_box(&mut rng);
            let b = random_box(&mut rng);
            let ab = giou3d(&a, &b);
            let ba = giou3d(&b, &a);
            assert!((ab - ba).abs() < 1e-9, "asymmetry {ab} vs {ba}");
            assert!(ab <= iou3d(&a, &b) + 1e-12);
            let ng = ngiou(&a, &b);
            assert!((0.0..=1.0).contains(&ng));
        }
    }

    #[test]
    fn literal_mode_is_affine_iou() {
        let a = cube_at(0.0);
        let b = cube_at(0.5);
        assert_relative_eq!(
            giou3d_mode(&a, &b, GiouMode::Literal),
            2.0 * iou3d(&a, &b) - 1.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(ngiou_mode(&a, &b, GiouMode::Literal), iou3d(&a, &b), epsilon = 1e-12);
    }

    #[test]
    fn rotated_overlap_against_monte_carlo() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(42);
        for _ in 0..20 {
            let a = random_box(&mut rng);
            let b = Box3::new(
                a.center() + Vector3::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() * 0.4 - 0.2),
                [1.0 + rng.gen::<f64>() * 3.0, 1.0 + rng.gen::<f64>() * 2.0, 1.0 + rng.gen::<f64>()],
                rng.gen::<f64>() * 6.0 - 3.0,
            );
            let exact = intersection_volume(&a, &b);
            let mc = monte_carlo_intersection(&a, &b, 1_000_000, &mut rng);
            let scale = a.volume().min(b.volume());
            assert!(
                (exact - mc).abs() <= 0.02 * scale,
                "exact {exact} vs mc {mc} (scale {scale})"
            );
            assert!(exact <= a.volume().min(b.volume()) + 1e-9);
        }
    }

    fn random_box(rng: &mut impl rand::Rng) -> Box3 {
        Box3::new(
            Vector3::new(rng.gen::<f64>() * 2.0, rng.gen::<f64>() * 2.0, rng.gen::<f64>()),
            [1.0 + rng.gen::<f64>() * 3.0, 1.0 + rng.gen::<f64>() * 2.0, 1.0 + rng.gen::<f64>()],
            rng.gen::<f64>() * 6.0 - 3.0,
        )
    }

    /// Sampling oracle: draw points uniformly inside `a`, count how many fall
    /// inside `b`.
    fn monte_carlo_intersection(a: &Box3, b: &Box3, n: usize, rng: &mut impl rand::Rng) -> f64 {
        let pose_a = a.pose();
        let inv_b = b.pose().invert();
        let mut hits = 0usize;
        for _ in 0..n {
            let local = Vector3::new(
                (rng.gen::<f64>() - 0.5) * a.dims[0],
                (rng.gen::<f64>() - 0.5) * a.dims[1],
                (rng.gen::<f64>() - 0.5) * a.dims[2],
            );
            let world = pose_a.transform_point(&local);
            let lb = inv_b.transform_point(&world);
            if lb.x.abs() <= b.dims[0] / 2.0 && lb.y.abs() <= b.dims[1] / 2.0 && lb.z.abs() <= b.dims[2] / 2.0 {
                hits += 1;
            }
        }
        hits as f64 / n as f64 * a.volume()
    }
}
