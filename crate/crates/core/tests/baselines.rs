use jist::baselines::{grasp_rrt, RrtParams};
use jist::geometry::{Obstacle, Shape};
use jist::kinematics::{robots, JointConfig};
use jist::planner::validate_solution;
use jist::scenes::{GoalSpec, Scene};

#[test]
fn obstacle_free_planar_success_rate() {
    let chain = robots::planar_3r();
    let q_start = JointConfig(vec![1.2, -0.6, -0.4]);
    let goal = chain.fk_pose(&JointConfig(vec![-0.4, 0.5, 0.3])).unwrap();
    let goals = GoalSpec::explicit(vec![goal]).unwrap();
    let scene = Scene::default();
    let mut solved = 0;
    for seed in 0..50 {
        let params = RrtParams {
            rng_seed: seed,
            time_budget: 1e9,
            ..RrtParams::default()
        };
        let r = grasp_rrt(&chain, &scene, &q_start, &goals, &params).unwrap();
        if let Some(path) = &r.best_path {
            assert!(validate_solution(&chain, path, &[], 0.001, 0.01).unwrap());
            assert_eq!(r.cost_history.len(), 1);
            solved += 1;
        }
    }
    let rate = solved as f64 / 50.0;
    eprintln!("grasp-rrt obstacle-free planar-3R success rate {rate}");
    assert!(rate >= 0.98, "{rate}");
}

#[test]
fn enclosed_goal_fails() {
    let chain = robots::planar_3r();
    let q_start = JointConfig(vec![1.2, -0.6, -0.4]);
    let goal = chain.fk_pose(&JointConfig(vec![-0.4, 0.5, 0.3])).unwrap();
    let t = goal.translation;
    let scene = Scene::new(vec![Obstacle::new(1, Shape::sphere([t.x, t.y, t.z], 0.12))]);
    let params = RrtParams {
        max_iters: 1000,
        time_budget: 1e9,
        ..RrtParams::default()
    };
    let r = grasp_rrt(&chain, &scene, &q_start, &GoalSpec::explicit(vec![goal]).unwrap(), &params).unwrap();
    assert!(!r.solved());
    assert_eq!(r.stats.iterations, 1000);
}

#[test]
fn same_seed_same_result() {
    let chain = robots::planar_3r();
    let q_start = JointConfig(vec![0.2, 0.3, 0.1]);
    let goal = chain.fk_pose(&JointConfig(vec![2.0, -0.5, 0.3])).unwrap();
    let goals = GoalSpec::explicit(vec![goal]).unwrap();
    let params = RrtParams {
        clock: jist::planner::Clock::DESKTOP,
        ..RrtParams::default()
    };
    let a = grasp_rrt(&chain, &Scene::default(), &q_start, &goals, &params).unwrap();
    let b = grasp_rrt(&chain, &Scene::default(), &q_start, &goals, &params).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
