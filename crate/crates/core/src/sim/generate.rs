//! Deterministic scenario synthesis.
//!
//! A single seeded RNG drives every draw in a fixed order, so a (config,
//! seed) pair always produces the same scenario, byte for byte.

use nalgebra::Vector3;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::error::Result;
use crate::geometry::{wrap_angle, Box3, PointFrame, PointSet, Pose, Twist};

use super::config::{NoiseSpec, SimConfig};
use super::scenario::{AgentTruth, Detection, Frame, LandmarkObs, Scenario};

struct KinematicState {
    x: f64,
    y: f64,
    yaw: f64,
    speed: f64,
    yaw_rate: f64,
    frames_left: usize,
}

impl KinematicState {
    fn step(&mut self, dt: f64) {
        self.x += self.speed * self.yaw.cos() * dt;
        self.y += self.speed * self.yaw.sin() * dt;
        self.yaw = wrap_angle(self.yaw + self.yaw_rate * dt);
    }

    fn resample_segment(&mut self, cfg: &SimConfig, speed_range: (f64, f64), rng: &mut ChaCha12Rng) {
        self.speed = sample_range(speed_range, rng);
        let mag = sample_range(cfg.yaw_rate_range, rng);
        self.yaw_rate = if rng.gen::<bool>() { mag } else { -mag };
        self.frames_left = rng.gen_range(cfg.segment_frames.0..=cfg.segment_frames.1);
    }
}

fn sample_range(r: (f64, f64), rng: &mut ChaCha12Rng) -> f64 {
    if r.1 > r.0 {
        rng.gen_range(r.0..r.1)
    } else {
        r.0
    }
}

fn gauss(sigma: f64, rng: &mut ChaCha12Rng) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    Normal::new(0.0, sigma).unwrap().sample(rng)
}

fn gauss3(sigma: f64, rng: &mut ChaCha12Rng) -> Vector3<f64> {
    Vector3::new(gauss(sigma, rng), gauss(sigma, rng), gauss(sigma, rng))
}

/// Generates a scenario. Deterministic for a fixed (config, seed).
pub fn generate(config: &SimConfig, seed: u64) -> Result<Scenario> {
    config.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let dt = config.dt;

    // Landmarks: uniform in the world box, between ground and 5 m up.
    let landmarks_gt: Vec<[f64; 3]> = (0..config.num_landmarks)
        .map(|_| {
            [
                rng.gen_range(-config.world_half_extent..config.world_half_extent),
                rng.gen_range(-config.world_half_extent..config.world_half_extent),
                rng.gen_range(0.5..5.0),
            ]
        })
        .collect();

    // Agents: rejection-sampled positions with a minimum separation, so
    // congested scenes form irregular constellations rather than lattices.
    let n_static = (config.num_agents as f64 * config.static_fraction).round() as usize;
    let mut placed: Vec<(f64, f64)> = Vec::new();
    let mut agent_states: Vec<KinematicState> = Vec::new();
    let mut agent_dims: Vec<[f64; 3]> = Vec::new();
    for i in 0..config.num_agents {
        let (x, y) = loop {
            let x = rng.gen_range(-config.world_half_extent..config.world_half_extent);
            let y = rng.gen_range(-config.world_half_extent..config.world_half_extent);
            let ok = placed
                .iter()
                .all(|&(px, py)| ((px - x).powi(2) + (py - y).powi(2)).sqrt() >= config.min_agent_separation);
            if ok {
                break (x, y);
            }
        };
        placed.push((x, y));
        let dims = [
            sample_range(config.length_range, &mut rng),
            sample_range(config.width_range, &mut rng),
            sample_range(config.height_range, &mut rng),
        ];
        agent_dims.push(dims);
        let yaw = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let mut st = KinematicState { x, y, yaw, speed: 0.0, yaw_rate: 0.0, frames_left: usize::MAX };
        if i >= n_static {
            st.resample_segment(config, config.speed_range, &mut rng);
        }
        agent_states.push(st);
    }

    // Ego starts near the west edge heading east, weaving gently.
    let mut ego = KinematicState {
        x: -config.world_half_extent * 0.8,
        y: rng.gen_range(-0.3..0.3) * config.world_half_extent,
        yaw: rng.gen_range(-0.2..0.2),
        speed: 0.0,
        yaw_rate: 0.0,
        frames_left: 0,
    };
    ego.resample_segment(config, config.ego_speed_range, &mut rng);

    let mut agents_gt: Vec<AgentTruth> = (0..config.num_agents)
        .map(|i| AgentTruth {
            id: i as u32,
            dims: agent_dims[i],
            is_static: i < n_static,
            poses: Vec::with_capacity(config.num_frames),
            visible: Vec::with_capacity(config.num_frames),
        })
        .collect();

    let ego_height = 1.2;
    let mut frames: Vec<Frame> = Vec::with_capacity(config.num_frames);
    let mut ego_odom = Pose::identity();
    let mut prev_ego_gt = Pose::identity();

    for t in 0..config.num_frames {
        if t > 0 {
            for (i, st) in agent_states.iter_mut().enumerate() {
                if i >= n_static {
                    if st.frames_left == 0 {
                        st.resample_segment(config, config.speed_range, &mut rng);
                    }
                    st.step(dt);
                    st.frames_left -= 1;
                }
            }
            if ego.frames_left == 0 {
                ego.resample_segment(config, config.ego_speed_range, &mut rng);
            }
            ego.step(dt);
            ego.frames_left -= 1;
        }

        let ego_gt = Pose::from_xyz_yaw(ego.x, ego.y, ego_height, ego.yaw);
        if t == 0 {
            // The odometry frame is anchored at the true starting pose.
            ego_odom = ego_gt;
        } else {
            let rel_gt = prev_ego_gt.invert().compose(&ego_gt);
            let noise = crate::geometry::exp_se3(&Twist {
                rho: gauss3(config.sigma_odom_t, &mut rng),
                phi: gauss3(config.sigma_odom_r, &mut rng),
            });
            ego_odom = ego_odom.compose(&rel_gt).compose(&noise);
        }
        prev_ego_gt = ego_gt;
        let world_to_sensor = ego_gt.invert();

        let mut detections: Vec<Detection> = Vec::new();
        for (i, st) in agent_states.iter().enumerate() {
            let gt_pose = Pose::from_xyz_yaw(st.x, st.y, agent_dims[i][2] / 2.0, st.yaw);
            agents_gt[i].poses.push(gt_pose);
            let in_sensor = world_to_sensor.transform_point(&gt_pose.translation());
            let dist = in_sensor.norm();
            let bearing = in_sensor.y.atan2(in_sensor.x);
            let visible = dist <= config.sensor_range && bearing.abs() <= config.sensor_fov / 2.0;
            agents_gt[i].visible.push(visible);
            if !visible {
                continue;
            }
            if config.p_miss > 0.0 && rng.gen::<f64>() < config.p_miss {
                continue;
            }
            let gt_box_sensor = Box3::new(in_sensor, agent_dims[i], wrap_angle(st.yaw - ego.yaw));
            let noisy = perturb_box(&gt_box_sensor, config.sigma_pos, config.sigma_yaw, config.sigma_dim, &mut rng);
            let points = sample_surface_points(&noisy, config.points_per_detection, config.sigma_point, &mut rng);
            detections.push(Detection {
                box3: noisy,
                points,
                gt_agent_id: Some(i as u32),
                clutter: false,
            });
        }

        if config.clutter_rate > 0.0 {
            let n_clutter = Poisson::new(config.clutter_rate).unwrap().sample(&mut rng) as usize;
            for _ in 0..n_clutter {
                let r = rng.gen_range(2.0..config.sensor_range.min(2.5 * config.world_half_extent));
                let b = rng.gen_range(-config.sensor_fov / 2.0..config.sensor_fov / 2.0);
                let dims = [
                    sample_range(config.length_range, &mut rng),
                    sample_range(config.width_range, &mut rng),
                    sample_range(config.height_range, &mut rng),
                ];
                let center = Vector3::new(r * b.cos(), r * b.sin(), dims[2] / 2.0 - ego_height);
                let yaw = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
                let cbox = Box3::new(center, dims, yaw);
                let points = sample_surface_points(&cbox, config.points_per_detection, config.sigma_point, &mut rng);
                detections.push(Detection { box3: cbox, points, gt_agent_id: None, clutter: true });
            }
        }

        let mut landmark_obs = Vec::new();
        for (id, l) in landmarks_gt.iter().enumerate() {
            let in_sensor = world_to_sensor.transform_point(&Vector3::from(*l));
            let bearing = in_sensor.y.atan2(in_sensor.x);
            if in_sensor.norm() <= config.sensor_range && bearing.abs() <= config.sensor_fov / 2.0 {
                let obs = in_sensor + gauss3(config.sigma_landmark, &mut rng);
                landmark_obs.push(LandmarkObs { id: id as u32, point: [obs.x, obs.y, obs.z] });
            }
        }

        frames.push(Frame {
            index: t,
            time: t as f64 * dt,
            ego_gt,
            ego_odom,
            detections,
            landmark_obs,
        });
    }

    Ok(Scenario {
        config: config.clone(),
        seed,
        landmarks_gt,
        agents_gt,
        frames,
    })
}

fn perturb_box(b: &Box3, sigma_pos: f64, sigma_yaw: f64, sigma_dim: f64, rng: &mut ChaCha12Rng) -> Box3 {
    let center = b.center() + gauss3(sigma_pos, rng);
    let mut dims = b.dims;
    for d in dims.iter_mut() {
        *d = (*d + gauss(sigma_dim, rng)).max(0.2);
    }
    Box3::new(center, dims, b.yaw + gauss(sigma_yaw, rng))
}

/// Samples points uniformly over the three sensor-facing faces of the box,
/// area-weighted, then jitters them. Points are clamped into 1.45x the box
/// extent so the stored cloud always satisfies the 1.5x containment bound.
pub fn sample_surface_points(
    box_sensor: &Box3,
    n: usize,
    sigma_point: f64,
    rng: &mut ChaCha12Rng,
) -> PointSet {
    if n == 0 {
        return PointSet::empty(PointFrame::Sensor);
    }
    let pose = box_sensor.pose();
    let sensor_in_box = pose.invert().transform_point(&Vector3::zeros());
    let half = [box_sensor.dims[0] / 2.0, box_sensor.dims[1] / 2.0, box_sensor.dims[2] / 2.0];
    // One visible face per axis: the face whose outward normal points
    // toward the sensor.
    let signs = [
        if sensor_in_box.x >= 0.0 { 1.0 } else { -1.0 },
        if sensor_in_box.y >= 0.0 { 1.0 } else { -1.0 },
        if sensor_in_box.z >= 0.0 { 1.0 } else { -1.0 },
    ];
    let areas = [
        box_sensor.dims[1] * box_sensor.dims[2],
        box_sensor.dims[0] * box_sensor.dims[2],
        box_sensor.dims[0] * box_sensor.dims[1],
    ];
    let total: f64 = areas.iter().sum();
    let mut pts = Vec::with_capacity(n);
    for _ in 0..n {
        let pick = rng.gen::<f64>() * total;
        let axis = if pick < areas[0] {
            0
        } else if pick < areas[0] + areas[1] {
            1
        } else {
            2
        };
        let mut local = Vector3::new(
            (rng.gen::<f64>() - 0.5) * box_sensor.dims[0],
            (rng.gen::<f64>() - 0.5) * box_sensor.dims[1],
            (rng.gen::<f64>() - 0.5) * box_sensor.dims[2],
        );
        local[axis] = signs[axis] * half[axis];
        local += gauss3(sigma_point, rng);
        for k in 0..3 {
            local[k] = local[k].clamp(-1.45 * half[k], 1.45 * half[k]);
        }
        pts.push(pose.transform_point(&local));
    }
    PointSet::from_vectors(pts, PointFrame::Sensor)
}

/// Applies additional Gaussian perturbation to detection boxes and/or the
/// odometry chain. Surface clouds and ground truth stay untouched: the spec
/// of the perturbation is detector-level, not sensor-level.
pub fn inject_noise(scenario: &Scenario, spec: &NoiseSpec, seed: u64) -> Result<Scenario> {
    spec.validate()?;
    let mut out = scenario.clone();
    if spec.is_zero() {
        return Ok(out);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);

    let perturb_odom = spec.sigma_odom_t > 0.0 || spec.sigma_odom_r > 0.0;
    let mut prev_old = Pose::identity();
    let mut prev_new = Pose::identity();
    for (t, frame) in out.frames.iter_mut().enumerate() {
        if spec.sigma_pos > 0.0 || spec.sigma_yaw > 0.0 || spec.sigma_dim > 0.0 {
            for d in frame.detections.iter_mut() {
                d.box3 = perturb_box(&d.box3, spec.sigma_pos, spec.sigma_yaw, spec.sigma_dim, &mut rng);
            }
        }
        if perturb_odom {
            let old = frame.ego_odom;
            if t == 0 {
                prev_old = old;
                prev_new = old;
            } else {
                let rel = prev_old.invert().compose(&old);
                let noise = crate::geometry::exp_se3(&Twist {
                    rho: gauss3(spec.sigma_odom_t, &mut rng),
                    phi: gauss3(spec.sigma_odom_r, &mut rng),
                });
                let new = prev_new.compose(&rel).compose(&noise);
                prev_old = old;
                prev_new = new;
                frame.ego_odom = new;
            }
        }
    }
    Ok(out)
}
