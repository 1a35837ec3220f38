//! A short benchmark of JIST against the RRT baseline, written as CSV.

use jist::baselines::RrtParams;
use jist::bench::{run_benchmark, write_benchmark, BenchmarkConfig, PlannerSpec, RoadmapSource};
use jist::planner::{Clock, PlannerParams};

fn main() {
    let config = BenchmarkConfig {
        robot: "spatial-7r".into(),
        roadmap: RoadmapSource::Build { vertices: 25_000, seed: 0 },
        planners: vec![
            PlannerSpec::Jist {
                name: "jist".into(),
                params: PlannerParams::default(),
            },
            PlannerSpec::GraspRrt {
                name: "grasp-rrt".into(),
                params: RrtParams::default(),
            },
        ],
        problems: vec!["table".into(), "shelf".into()],
        trials: 5,
        time_budget: 5.0,
        sample_interval: 1.0,
        base_seed: 0,
        clock: Clock::Wall,
        stop_at_first_solution: false,
    };
    let out = run_benchmark(&config).unwrap();
    let dir = std::env::temp_dir().join("jist_example_benchmark");
    write_benchmark(&out, &dir).unwrap();
    for b in &out.buckets {
        println!(
            "{:9} {:6} t={:3.0} s  success {:.2}  mean cost {}",
            b.planner,
            b.problem,
            b.time,
            b.success_rate,
            b.mean_cost.map_or("-".into(), |c| format!("{c:.3}"))
        );
    }
    println!("tables in {}", dir.display());
}
