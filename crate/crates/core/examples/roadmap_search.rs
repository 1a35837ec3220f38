//! Multi-start A* from the goal poses of a bundled problem back to its start.

use jist::kinematics::robots;
use jist::roadmap::ReachabilityRoadmap;
use jist::scenes::load_problem;
use jist::search::{heuristic_h, msmo_astar};

fn main() {
    let chain = robots::spatial_7r();
    let roadmap = ReachabilityRoadmap::build(&chain, 5000, 0).unwrap();
    for name in ["table", "shelf"] {
        let problem = load_problem(name).unwrap();
        let goals = problem.goals(&chain).unwrap();
        let e_start = chain.fk_pose(&problem.problem.start).unwrap();
        let attachment = roadmap.attach_query(&e_start, &goals.goal_poses).unwrap();
        let closed = msmo_astar(&roadmap, &attachment, &problem.scene.collision_obstacles(), &chain.ee_body);
        println!(
            "{name}: {} goals, {} expanded, start reached with {:?} colliding waypoints, h(start) = {:.3} m",
            goals.goal_poses.len(),
            closed.len(),
            closed.min_collisions,
            heuristic_h(&e_start, &closed).unwrap()
        );
    }
}
