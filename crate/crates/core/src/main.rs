use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use jist::baselines::{grasp_rrt, RrtParams};
use jist::bench::{emit_report, eval_steering, run_benchmark, write_benchmark, BenchmarkConfig, SteeringEvalConfig};
use jist::geometry::Pose;
use jist::kinematics::{robots, JointConfig};
use jist::planner::{jist_plan, BabMode, Clock, PlannerParams};
use jist::roadmap::ReachabilityRoadmap;
use jist::scenes::{generate_clutter_scene, load_problem, ClutterSpec, GoalSpec, Scene};
use jist::search::msmo_astar;
use jist::{Error, Result};

#[derive(Parser)]
#[command(name = "jist", version, about = "Manipulation planning with roadmap-guided J⁺ steering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Jist,
    GraspRrt,
}

#[derive(Clone, Copy, ValueEnum)]
enum Bab {
    G,
    Gh,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClockKind {
    Wall,
    Virtual,
}

#[derive(Subcommand)]
enum Command {
    /// Build and save an end-effector roadmap.
    BuildRoadmap {
        #[arg(long, default_value = "spatial-7r")]
        robot: String,
        #[arg(long, default_value_t = 25_000)]
        vertices: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plan one query and write the result as JSON.
    Plan {
        #[arg(long, default_value = "spatial-7r")]
        robot: String,
        /// Bundled problem name or problem file; replaces --scene/--start/--goals.
        #[arg(long)]
        problem: Option<String>,
        #[arg(long)]
        scene: Option<PathBuf>,
        /// Start configuration as a JSON array.
        #[arg(long)]
        start: Option<String>,
        /// JSON file holding a list of goal poses.
        #[arg(long)]
        goals: Option<PathBuf>,
        #[arg(long)]
        roadmap: PathBuf,
        #[arg(long, value_enum, default_value = "jist")]
        algo: Algo,
        #[arg(long, value_enum, default_value = "gh")]
        bab: Bab,
        #[arg(long, default_value_t = 10_000)]
        iters: usize,
        #[arg(long, default_value_t = 20)]
        kappa: usize,
        #[arg(long, default_value_t = 30.0)]
        time_budget: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "wall")]
        clock: ClockKind,
        /// Also write the closed list of the roadmap search as CSV.
        #[arg(long)]
        dump_closed: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a cluttered scene.
    GenScene {
        /// min_x,min_y,min_z,max_x,max_y,max_z
        #[arg(long, value_delimiter = ',', num_args = 6, default_value = "-1,-1,-0.5,1,1,0.5")]
        bounds: Vec<f64>,
        #[arg(long)]
        fraction: f64,
        /// smallest,largest primitive size
        #[arg(long, value_delimiter = ',', num_args = 2, default_value = "0.04,0.12")]
        sizes: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a benchmark configuration and write CSV tables.
    Benchmark {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare steering methods over a clutter sweep.
    EvalSteering {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Aggregate trial_buckets.csv files into summary.json and report.csv.
    Report {
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.clone(),
        source: e,
    })?;
    Ok(serde_json::from_str(&text)?)
}

fn write_text(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.clone(),
        source: e,
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::BuildRoadmap { robot, vertices, seed, out } => {
            let chain = robots::load_robot(&robot)?;
            let roadmap = ReachabilityRoadmap::build(&chain, vertices, seed)?;
            roadmap.save(&out)?;
            println!("{} vertices, {} edges -> {}", roadmap.len(), roadmap.edge_count(), out.display());
        }
        Command::Plan {
            robot,
            problem,
            scene,
            start,
            goals,
            roadmap,
            algo,
            bab,
            iters,
            kappa,
            time_budget,
            seed,
            clock,
            dump_closed,
            out,
        } => {
            let chain = robots::load_robot(&robot)?;
            let (scene, start, goals) = match problem {
                Some(name) => {
                    let p = load_problem(&name)?;
                    let goals = p.goals(&chain)?;
                    (p.scene, p.problem.start, goals)
                }
                None => {
                    let missing = || Error::InvalidParameter("give --problem or all of --scene, --start, --goals".into());
                    let scene = Scene::load(&scene.ok_or_else(missing)?)?;
                    let start: Vec<f64> = serde_json::from_str(&start.ok_or_else(missing)?)?;
                    let poses: Vec<Pose> = read_json(&goals.ok_or_else(missing)?)?;
                    (scene, JointConfig(start), GoalSpec::explicit(poses)?)
                }
            };
            let roadmap = ReachabilityRoadmap::load(&roadmap, &chain)?;
            let params = PlannerParams {
                iterations: iters,
                kappa,
                time_budget,
                rng_seed: seed,
                bab: match bab {
                    Bab::G => BabMode::G,
                    Bab::Gh => BabMode::GPlusH,
                },
                clock: match clock {
                    ClockKind::Wall => Clock::Wall,
                    ClockKind::Virtual => Clock::DESKTOP,
                },
                ..PlannerParams::default()
            };
            if let Some(path) = dump_closed {
                let e_start = chain.fk_pose(&start)?;
                let attachment = roadmap.attach_query(&e_start, &goals.goal_poses)?;
                msmo_astar(&roadmap, &attachment, &scene.collision_obstacles(), &chain.ee_body).write_csv(&path)?;
            }
            let result = match algo {
                Algo::Jist => jist_plan(&chain, &scene, &start, &goals, &roadmap, &params)?,
                Algo::GraspRrt => grasp_rrt(&chain, &scene, &start, &goals, &RrtParams::from_planner(&params))?,
            };
            write_text(&out, &serde_json::to_string_pretty(&result)?)?;
            match result.best_cost {
                Some(c) => println!("solved, cost {c:.4} m, {} improvements", result.cost_history.len()),
                None => println!("no solution after {} iterations", result.stats.iterations),
            }
        }
        Command::GenScene { bounds, fraction, sizes, seed, out } => {
            let spec = ClutterSpec {
                bounds: [[bounds[0], bounds[1], bounds[2]], [bounds[3], bounds[4], bounds[5]]],
                occupied_fraction: fraction,
                size_range: [sizes[0], sizes[1]],
                rng_seed: seed,
                keep_clear: Vec::new(),
            };
            let (scene, achieved) = generate_clutter_scene(&spec)?;
            scene.save(&out)?;
            println!("{} obstacles, fraction {achieved:.4}", scene.obstacles.len());
        }
        Command::Benchmark { config, out } => {
            let config = BenchmarkConfig::load(&config)?;
            let output = run_benchmark(&config)?;
            write_benchmark(&output, &out)?;
            for b in output.buckets.iter().filter(|b| b.time == config.time_budget) {
                println!("{} {} success {:.2} mean cost {:?}", b.planner, b.problem, b.success_rate, b.mean_cost);
            }
        }
        Command::EvalSteering { config, out } => {
            let config = match config {
                Some(path) => SteeringEvalConfig::load(&path)?,
                None => SteeringEvalConfig::default(),
            };
            let output = eval_steering(&config)?;
            output.write(&out)?;
            for s in &output.summary {
                println!("{:.2} {} success {:.3}", s.fraction, s.method.name(), s.success_rate);
            }
        }
        Command::Report { inputs, out } => {
            let summary = emit_report(&inputs, &out)?;
            println!("{} rows -> {}", summary.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
