//! Builds an end-effector roadmap, saves it, and loads it back.

use jist::kinematics::robots;
use jist::roadmap::ReachabilityRoadmap;

fn main() {
    let chain = robots::spatial_7r();
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5000);
    let started = std::time::Instant::now();
    let roadmap = ReachabilityRoadmap::build(&chain, n, 0).unwrap();
    println!(
        "{} vertices, {} edges, k = {}, ee speed bound {:.2} m/s, {:.2} s",
        roadmap.len(),
        roadmap.edge_count(),
        roadmap.meta.neighbors,
        roadmap.ee_velocity_bound,
        started.elapsed().as_secs_f64()
    );
    let path = std::env::temp_dir().join("jist_example_roadmap.bin");
    roadmap.save(&path).unwrap();
    let back = ReachabilityRoadmap::load(&path, &chain).unwrap();
    println!("round trip equal: {}", back == roadmap);
}
