//! Acceptance suite: each criterion prints one PASS or FAIL line, and the binary exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use jist::baselines::RrtParams;
use jist::bench::{
    eval_steering, run_benchmark, spearman, write_benchmark, BenchmarkConfig, PlannerSpec, RoadmapSource,
    SteeringEvalConfig, SteeringMethod,
};
use jist::geometry::{disp_distance, HullPoints, Pose};
use jist::kinematics::{robots, KinematicChain};
use jist::planner::{jist_plan, validate_solution, Clock, PlannerParams};
use jist::roadmap::{neighbor_count, ReachabilityRoadmap};
use jist::scenes::{bundled, load_problem};
use jist::search::msmo_astar_graph;
use jist::steering::{jplus_distance_trace, jplus_steer, SteeringParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn jacobian_oracle() -> Verdict {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    for chain in [robots::planar_2r(), robots::planar_3r(), robots::spatial_7r()] {
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        for _ in 0..1000 {
            let q = chain.sample_config(&mut rng);
            worst = worst.max(common::fd_jacobian_error(&chain, &q, 1e-6));
        }
    }
    let secs = started.elapsed().as_secs_f64();
    verdict(
        worst < 1e-4 && secs < 10.0,
        format!("max |J - J_fd| = {worst:.2e} over 3000 configs in {secs:.2} s"),
    )
}

fn disp_suite() -> Verdict {
    let hulls = [
        HullPoints::box_corners(0.05, 0.02, 0.1),
        robots::planar_3r().ee_hull,
        robots::spatial_7r().ee_hull,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut asym, mut negative, mut triangle, mut translation) = (0, 0, 0, 0);
    for hull in &hulls {
        for _ in 0..500 {
            let a = common::random_pose(&mut rng, 1.0);
            let b = common::random_pose(&mut rng, 1.0);
            let c = common::random_pose(&mut rng, 1.0);
            let ab = disp_distance(hull, &a, &b);
            asym += (ab != disp_distance(hull, &b, &a)) as usize;
            negative += (ab < 0.0) as usize;
            triangle += (ab > disp_distance(hull, &a, &c) + disp_distance(hull, &c, &b) + 1e-9) as usize;
            let shift = Pose::new(a.translation + c.translation, a.rotation);
            translation += ((disp_distance(hull, &a, &shift) - c.translation.norm()).abs() > 1e-12) as usize;
        }
    }
    verdict(
        asym + negative + triangle + translation == 0,
        format!(
            "1500 triples: {asym} asymmetric, {negative} negative, {triangle} triangle, {translation} translation violations"
        ),
    )
}

fn astar_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let (mut expanded, mut mismatches) = (0, 0);
    for _ in 0..50 {
        let inst = common::random_search_instance(&mut rng);
        let oracle = common::lexicographic_dijkstra(&inst);
        let closed = msmo_astar_graph(&inst.graph, inst.start, &inst.goals, &inst.scene, &inst.ee_body);
        for e in &closed.entries {
            expanded += 1;
            mismatches += (oracle[e.vertex_id] != Some((e.f1, e.g2))) as usize;
        }
        mismatches += (closed.get(inst.start).is_some() != oracle[inst.start].is_some()) as usize;
    }
    verdict(
        mismatches == 0,
        format!("50 graphs, {expanded} expanded vertices, {mismatches} mismatches"),
    )
}

fn steering_regression() -> Verdict {
    let chain = robots::planar_3r();
    let params = SteeringParams::default();
    let limit = 0.75 * chain.total_reach();
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let (mut targets, mut reached, mut far, mut violations) = (0, 0, 0, 0);
    while targets < 1000 {
        let q_goal = chain.sample_config(&mut rng);
        let target = chain.fk_pose(&q_goal).unwrap();
        if target.translation.norm() > limit {
            continue;
        }
        targets += 1;
        let q = chain.sample_config(&mut rng);
        let traj = jplus_steer(&chain, &q, &target, &params).unwrap();
        if traj.reached {
            reached += 1;
            let end = chain.fk_pose(traj.last()).unwrap();
            far += (disp_distance(&chain.ee_hull, &end, &target) > 0.005) as usize;
        }
        let trace = jplus_distance_trace(&chain, &q, &target, &params).unwrap();
        violations += trace.windows(2).filter(|w| w[1] > w[0] + 1e-9).count();
    }
    let rate = reached as f64 / targets as f64;
    verdict(
        rate >= 0.95 && far == 0 && violations == 0,
        format!(
            "reached {rate:.3} within {} iterations, {far} above 5 mm, {violations} distance increases",
            params.max_iters
        ),
    )
}

fn anytime_contract(chain: &KinematicChain, roadmap: &ReachabilityRoadmap) -> Verdict {
    let (mut runs, mut solved, mut invalid, mut non_decreasing, mut followed, mut broken) = (0, 0, 0, 0, 0, 0);
    for name in bundled::NAMES {
        let problem = load_problem(name).unwrap();
        let goals = problem.goals(chain).unwrap();
        let obstacles = problem.scene.collision_obstacles();
        for seed in 0..20 {
            let params = PlannerParams {
                rng_seed: seed,
                time_budget: 2.0,
                clock: Clock::DESKTOP,
                record_trace: true,
                ..PlannerParams::default()
            };
            let r = jist_plan(chain, &problem.scene, &problem.problem.start, &goals, roadmap, &params).unwrap();
            runs += 1;
            non_decreasing += r.cost_history.windows(2).filter(|w| w[1].cost >= w[0].cost).count();
            if let Some(path) = &r.best_path {
                solved += 1;
                invalid += !validate_solution(chain, path, &obstacles, 0.001, 0.01).unwrap() as usize;
            }
            let trace = r.trace.unwrap();
            for w in trace.iterations.windows(2) {
                let Some(n) = w[0].added else { continue };
                let parent = trace.nodes[n].parent.unwrap();
                if trace.nodes[n].h < trace.nodes[parent].h {
                    if w[1].selected == n && w[1].greedy {
                        followed += 1;
                    } else {
                        broken += 1;
                    }
                }
            }
        }
    }
    verdict(
        invalid == 0 && non_decreasing == 0 && broken == 0 && followed > 0,
        format!(
            "{runs} runs, {solved} solved, {invalid} invalid solutions, {non_decreasing} non-decreasing cost steps, \
             {followed} improving insertions selected next, {broken} not"
        ),
    )
}

fn clutter_ordering() -> Verdict {
    let started = Instant::now();
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
        trials: 50,
        time_budget: 30.0,
        sample_interval: 5.0,
        base_seed: 1000,
        clock: Clock::Wall,
        stop_at_first_solution: true,
    };
    let out = run_benchmark(&config).unwrap();
    let rate = |planner: &str, problem: &str, t: f64| {
        out.buckets
            .iter()
            .find(|b| b.planner == planner && b.problem == problem && b.time == t)
            .map(|b| b.success_rate)
            .unwrap()
    };
    let (table5, shelf5) = (rate("jist", "table", 5.0), rate("jist", "shelf", 5.0));
    let (jist30, rrt30) = (rate("jist", "shelf", 30.0), rate("grasp-rrt", "shelf", 30.0));
    let rrt_table30 = rate("grasp-rrt", "table", 30.0);
    let first_time = |problem: &str| {
        let times: Vec<f64> = out
            .trials
            .iter()
            .filter(|t| t.planner == "jist" && t.problem == problem)
            .filter_map(|t| t.first_solution_time)
            .collect();
        times.iter().sum::<f64>() / times.len().max(1) as f64
    };
    let secs = started.elapsed().as_secs_f64();
    verdict(
        table5 >= shelf5 && jist30 >= rrt30 && secs <= 3600.0,
        format!(
            "jist@5s table {table5:.2} shelf {shelf5:.2}; shelf@30s jist {jist30:.2} grasp-rrt {rrt30:.2} \
             (grasp-rrt table@30s {rrt_table30:.2}); jist mean first solution table {:.3} s shelf {:.3} s; \
             50 trials per cell in {secs:.0} s",
            first_time("table"),
            first_time("shelf")
        ),
    )
}

fn steering_sweep() -> Verdict {
    let config = SteeringEvalConfig::default();
    let out = eval_steering(&config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    out.write(dir.path()).unwrap();
    let header = std::fs::read_to_string(dir.path().join("steering.csv")).unwrap();
    let header = header.lines().next().unwrap_or_default();
    let metrics = ["success", "time_s", "path_length", "ee_displacement"];
    let emitted = metrics.iter().all(|m| header.split(',').any(|c| c == *m));
    let mut pass = emitted;
    let mut parts = Vec::new();
    for method in SteeringMethod::ALL {
        let curve = out.success_curve(method);
        let (xs, ys): (Vec<f64>, Vec<f64>) = curve.iter().copied().unzip();
        let rho = spearman(&xs, &ys);
        pass &= rho.is_some_and(|r| r < 0.0);
        let monotone = ys.windows(2).all(|w| w[1] <= w[0]);
        let rates: Vec<String> = ys.iter().map(|y| format!("{y:.3}")).collect();
        parts.push(format!(
            "{} [{}] rho {} {}",
            method.name(),
            rates.join(" "),
            rho.map_or("undefined".into(), |r| format!("{r:.2}")),
            if monotone { "non-increasing" } else { "rises between some fractions" }
        ));
    }
    verdict(
        pass,
        format!("fractions {:?}: {}; metrics emitted: {emitted}", config.fractions, parts.join("; ")),
    )
}

fn determinism(chain: &KinematicChain) -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let build = |file: &str| {
        let path = dir.path().join(file);
        ReachabilityRoadmap::build(chain, 1000, 5).unwrap().save(&path).unwrap();
        std::fs::read(path).unwrap()
    };
    let roadmap_same = build("a.bin") == build("b.bin");

    let roadmap = ReachabilityRoadmap::build(chain, 1000, 5).unwrap();
    let problem = load_problem("clutter-table").unwrap();
    let goals = problem.goals(chain).unwrap();
    let params = PlannerParams {
        rng_seed: 9,
        time_budget: 1.0,
        clock: Clock::DESKTOP,
        record_trace: true,
        ..PlannerParams::default()
    };
    let plan = || {
        let r = jist_plan(chain, &problem.scene, &problem.problem.start, &goals, &roadmap, &params).unwrap();
        serde_json::to_string(&r).unwrap()
    };
    let plan_same = plan() == plan();

    let config = BenchmarkConfig {
        robot: "spatial-7r".into(),
        roadmap: RoadmapSource::Build { vertices: 1000, seed: 5 },
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
        trials: 3,
        time_budget: 1.0,
        sample_interval: 0.25,
        base_seed: 40,
        clock: Clock::DESKTOP,
        stop_at_first_solution: false,
    };
    let bench = |sub: &str| {
        let out = dir.path().join(sub);
        write_benchmark(&run_benchmark(&config).unwrap(), &out).unwrap();
        ["trials.csv", "trial_buckets.csv", "buckets.csv"].map(|f| std::fs::read(out.join(f)).unwrap())
    };
    let bench_same = bench("x") == bench("y");
    verdict(
        roadmap_same && plan_same && bench_same,
        format!("identical bytes: build-roadmap {roadmap_same}, jist_plan {plan_same}, run_benchmark {bench_same}"),
    )
}

fn roadmap_constants(chain: &KinematicChain) -> Verdict {
    let mut audit = Vec::new();
    let mut pass = true;
    for n in [100, 1000] {
        let r = ReachabilityRoadmap::build(chain, n, 6).unwrap();
        let k = neighbor_count(n);
        let failures = (0..n)
            .filter(|&u| {
                let nearest = r.index().knn_linear(&r.vertices[u], k, |i| i == u);
                r.adjacency[u].len() < k || !nearest.iter().all(|nb| r.adjacency[u].iter().any(|e| e.to == nb.id))
            })
            .count();
        pass &= failures == 0 && r.meta.neighbors == k;
        audit.push(format!("n={n} k={k} failures {failures}"));
    }
    let started = Instant::now();
    let big = ReachabilityRoadmap::build(chain, 25_000, 0).unwrap();
    let secs = started.elapsed().as_secs_f64();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.bin");
    big.save(&path).unwrap();
    let round_trip = ReachabilityRoadmap::load(&path, chain).unwrap() == big;
    pass &= secs < 300.0 && round_trip;
    verdict(
        pass,
        format!(
            "{}; n=25000 built in {secs:.1} s with {} edges, round trip {round_trip}",
            audit.join(", "),
            big.edge_count()
        ),
    )
}

fn main() -> ExitCode {
    let chain = robots::spatial_7r();
    let roadmap = ReachabilityRoadmap::build(&chain, 25_000, 0).unwrap();
    let criteria: Vec<Criterion> = vec![
        ("jacobian matches finite differences", Box::new(jacobian_oracle)),
        ("DISP metric suite", Box::new(disp_suite)),
        ("MSMO-A* equals lexicographic Dijkstra", Box::new(astar_oracle)),
        ("J+ steering regression", Box::new(steering_regression)),
        ("JIST anytime contract", Box::new(|| anytime_contract(&chain, &roadmap))),
        ("clutter ordering table/shelf/grasp-rrt", Box::new(clutter_ordering)),
        ("steering clutter sweep", Box::new(steering_sweep)),
        ("determinism", Box::new(|| determinism(&chain))),
        ("roadmap construction constants", Box::new(|| roadmap_constants(&chain))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        failed += !v.pass as usize;
        println!(
            "criterion {} {}: {name}: {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
