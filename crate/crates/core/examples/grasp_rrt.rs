//! The goal-biased RRT baseline on the bundled problems.

use jist::baselines::{grasp_rrt, RrtParams};
use jist::kinematics::robots;
use jist::scenes::{bundled, load_problem};

fn main() {
    let chain = robots::spatial_7r();
    for name in bundled::NAMES {
        let problem = load_problem(name).unwrap();
        let goals = problem.goals(&chain).unwrap();
        for seed in 0..3 {
            let params = RrtParams {
                rng_seed: seed,
                ..RrtParams::default()
            };
            let r = grasp_rrt(&chain, &problem.scene, &problem.problem.start, &goals, &params).unwrap();
            println!(
                "{name} seed {seed}: {} after {} iterations ({:.2} s)",
                r.best_cost.map_or("no solution".to_string(), |c| format!("cost {c:.3} m")),
                r.stats.iterations,
                r.stats.elapsed
            );
        }
    }
}
