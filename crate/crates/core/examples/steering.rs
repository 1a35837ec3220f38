//! J⁺ steering, joint-space interpolation and IK steering toward one target pose.

use jist::kinematics::{robots, JointConfig};
use jist::steering::{cspace_steer, estimate_ee_velocity_bound, ik_steer, jplus_steer, solve_ik, SteeringParams};

fn main() {
    let chain = robots::spatial_7r();
    let params = SteeringParams::default();
    let q = JointConfig(vec![0.0, 0.4, 0.0, -1.4, 0.0, 0.9, 0.0]);
    let target = chain.fk_pose(&JointConfig(vec![0.5, 0.6, -0.2, -1.0, 0.3, 0.7, 0.1])).unwrap();

    let jplus = jplus_steer(&chain, &q, &target, &params).unwrap();
    println!("jacobian: reached {}, {} waypoints, ee path {:.3} m", jplus.reached, jplus.configs.len(), jplus.ee_path_cost);

    if let Some(goal) = solve_ik(&chain, &target, &q, 10, 0, &params).unwrap() {
        let local = cspace_steer(&chain, &q, &goal, &params).unwrap();
        println!("local: {} waypoints, ee path {:.3} m", local.configs.len(), local.ee_path_cost);
    }

    let bound = estimate_ee_velocity_bound(&chain, 200, 0, &params).unwrap();
    let ik = ik_steer(&chain, &q, &target, bound, &params).unwrap();
    println!("ik: reached {}, ee path {:.3} m", ik.reached, ik.ee_path_cost);
}
