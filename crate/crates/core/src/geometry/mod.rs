//! SE(3) poses, oriented boxes, point sets and overlap scores.

mod box3;
mod overlap;
mod pointset;
mod pose;

pub use box3::Box3;
pub use overlap::{
    bev_intersection_area, giou3d, giou3d_mode, intersection_volume, iou3d, ngiou, ngiou_mode,
    GiouMode,
};
pub use pointset::{PointFrame, PointSet};
pub use pose::{exp_se3, se3_generator, skew, wrap_angle, Pose, Twist};
