//! Clutter generation, scene files, and pre-grasp goals.

use jist::kinematics::robots;
use jist::scenes::{generate_clutter_scene, load_problem, pose_clearance, ClutterSpec, Scene};

fn main() {
    for fraction in [0.0, 0.05, 0.1, 0.15] {
        let spec = ClutterSpec {
            bounds: [[-1.0, -1.0, -0.5], [1.0, 1.0, 0.5]],
            occupied_fraction: fraction,
            size_range: [0.04, 0.12],
            rng_seed: 1,
            keep_clear: Vec::new(),
        };
        let (scene, achieved) = generate_clutter_scene(&spec).unwrap();
        let back = Scene::from_json(&scene.to_json()).unwrap();
        println!(
            "target {fraction:.2}: {} obstacles, achieved {achieved:.4}, round trip {}",
            scene.obstacles.len(),
            back == scene
        );
    }

    let chain = robots::spatial_7r();
    for name in ["table", "shelf"] {
        let problem = load_problem(name).unwrap();
        let goals = problem.goals(&chain).unwrap();
        let obstacles = problem.scene.collision_obstacles();
        let clearances: Vec<f64> = goals
            .goal_poses
            .iter()
            .map(|g| pose_clearance(&chain.ee_body, g, &obstacles, 0.2))
            .collect();
        let mean = clearances.iter().sum::<f64>() / clearances.len() as f64;
        println!("{name}: {} pre-grasp goals, mean clearance {mean:.3} m", clearances.len());
    }
}
