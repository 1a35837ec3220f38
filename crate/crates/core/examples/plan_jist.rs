//! Anytime JIST planning on the bundled problems.

use jist::kinematics::robots;
use jist::planner::{jist_plan, PlannerParams};
use jist::roadmap::ReachabilityRoadmap;
use jist::scenes::{bundled, load_problem};

fn main() {
    let chain = robots::spatial_7r();
    let roadmap = ReachabilityRoadmap::build(&chain, 25_000, 0).unwrap();
    let params = PlannerParams {
        time_budget: 5.0,
        ..PlannerParams::default()
    };
    for name in bundled::NAMES {
        let problem = load_problem(name).unwrap();
        let goals = problem.goals(&chain).unwrap();
        let r = jist_plan(&chain, &problem.scene, &problem.problem.start, &goals, &roadmap, &params).unwrap();
        println!("{name}: {} iterations, {} nodes", r.stats.iterations, r.stats.nodes);
        for c in &r.cost_history {
            println!("  {:7.3} s  cost {:.4} m", c.elapsed, c.cost);
        }
        if let Some(approach) = &r.approach {
            println!("  approach motion of {} waypoints", approach.configs.len());
        }
    }
}
