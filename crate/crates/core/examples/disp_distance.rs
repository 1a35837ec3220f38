//! DISP between end-effector poses and the cost of a pose path.

use jist::geometry::{disp_distance, path_cost, HullPoints, Pose};
use nalgebra::Vector3;

fn main() {
    let hull = HullPoints::box_corners(0.04, 0.08, 0.06);
    let a = Pose::identity();
    let b = Pose::from_translation(0.3, 0.0, 0.0);
    let c = Pose::from_axis_angle(Vector3::z(), std::f64::consts::FRAC_PI_2);
    println!("pure translation: {:.4} m", disp_distance(&hull, &a, &b));
    println!("quarter turn about z: {:.4} m", disp_distance(&hull, &a, &c));
    let path = [a, b, b.compose(&c)];
    println!("path cost: {:.4} m", path_cost(&hull, &path).unwrap());
}
