//! Forward kinematics and the geometric Jacobian of the bundled arms.

use jist::kinematics::{robots, JointConfig};

fn main() {
    for name in robots::BUNDLED {
        let chain = robots::load_robot(name).unwrap();
        let q = JointConfig(vec![0.3; chain.dof()]);
        let pose = chain.fk_pose(&q).unwrap();
        let j = chain.jacobian(&q).unwrap();
        println!(
            "{name}: {} joints, reach {:.2} m, ee at {:.3?}, jacobian {}x{}, self-collision {}",
            chain.dof(),
            chain.total_reach(),
            pose.translation.as_slice(),
            j.0.nrows(),
            j.0.ncols(),
            chain.self_collision(&q).unwrap()
        );
    }
}
