//! Benchmark harness, steering evaluation under clutter, and report aggregation.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{grasp_rrt, RrtParams};
use crate::error::{Error, Result};
use crate::geometry::{Pose, Shape};
use crate::index::PoseIndex;
use crate::kinematics::{robots, JointConfig, KinematicChain};
use crate::planner::{jist_plan, validate_solution, Clock, PlanResult, PlannerParams};
use crate::roadmap::ReachabilityRoadmap;
use crate::scenes::{generate_clutter_scene, load_problem, ClutterSpec};
use crate::steering::{cspace_steer, estimate_ee_velocity_bound, ik_steer, jplus_steer, solve_ik, SteeringParams, Trajectory};

/// A planner and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algo", rename_all = "kebab-case")]
pub enum PlannerSpec {
    Jist {
        name: String,
        #[serde(default)]
        params: PlannerParams,
    },
    GraspRrt {
        name: String,
        #[serde(default)]
        params: RrtParams,
    },
}

impl PlannerSpec {
    pub fn name(&self) -> &str {
        match self {
            PlannerSpec::Jist { name, .. } | PlannerSpec::GraspRrt { name, .. } => name,
        }
    }
}

/// Where the benchmark roadmap comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RoadmapSource {
    File { path: PathBuf },
    Build { vertices: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub robot: String,
    pub roadmap: RoadmapSource,
    pub planners: Vec<PlannerSpec>,
    /// Bundled problem names or problem file paths.
    pub problems: Vec<String>,
    pub trials: usize,
    /// Seconds per trial; overrides each planner's budget.
    pub time_budget: f64,
    /// Spacing of the reported time buckets (s).
    pub sample_interval: f64,
    pub base_seed: u64,
    /// Overrides each planner's clock.
    #[serde(default)]
    pub clock: Clock,
    /// End each trial at its first solution; success curves are unaffected.
    #[serde(default)]
    pub stop_at_first_solution: bool,
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0
            || self.planners.is_empty()
            || self.problems.is_empty()
            || !(self.time_budget > 0.0)
            || !(self.sample_interval > 0.0 && self.sample_interval <= self.time_budget)
        {
            return Err(Error::InvalidParameter(format!("benchmark config {self:?}")));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Bucket end times: every `sample_interval` up to the budget, which is always last.
    pub fn buckets(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut k = 1;
        while (k as f64) * self.sample_interval < self.time_budget - 1e-9 {
            out.push(k as f64 * self.sample_interval);
            k += 1;
        }
        out.push(self.time_budget);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Success,
    /// Budget (time or iterations) exhausted without a solution.
    Timeout,
    /// The problem has no valid start or goal set.
    Infeasible,
    Error,
}

/// One row of `trials.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub planner: String,
    pub problem: String,
    pub trial: usize,
    pub seed: u64,
    pub outcome: Outcome,
    pub first_solution_time: Option<f64>,
    pub final_cost: Option<f64>,
    pub iterations: usize,
    pub nodes: usize,
    pub collision_checks: usize,
    pub elapsed: f64,
    pub message: String,
}

/// One row of `trial_buckets.csv`: a trial's state at the end of a time bucket.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialBucketRow {
    pub planner: String,
    pub problem: String,
    pub trial: usize,
    pub time: f64,
    pub solved: u8,
    pub cost: Option<f64>,
}

/// One row of `buckets.csv` and of report output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketSummary {
    pub planner: String,
    pub problem: String,
    pub time: f64,
    pub trials: usize,
    pub success_rate: f64,
    pub success_ci_low: Option<f64>,
    pub success_ci_high: Option<f64>,
    pub solved: usize,
    pub mean_cost: Option<f64>,
    pub cost_ci_low: Option<f64>,
    pub cost_ci_high: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkOutput {
    pub trials: Vec<TrialRow>,
    pub trial_buckets: Vec<TrialBucketRow>,
    pub buckets: Vec<BucketSummary>,
}

fn load_roadmap(chain: &KinematicChain, source: &RoadmapSource) -> Result<ReachabilityRoadmap> {
    match source {
        RoadmapSource::File { path } => ReachabilityRoadmap::load(path, chain),
        RoadmapSource::Build { vertices, seed } => ReachabilityRoadmap::build(chain, *vertices, *seed),
    }
}

fn run_trial(
    spec: &PlannerSpec,
    config: &BenchmarkConfig,
    chain: &KinematicChain,
    roadmap: &ReachabilityRoadmap,
    problem: &crate::scenes::LoadedProblem,
    seed: u64,
) -> Result<PlanResult> {
    let goals = problem.goals(chain)?;
    let start = &problem.problem.start;
    match spec {
        PlannerSpec::Jist { params, .. } => {
            let params = PlannerParams {
                rng_seed: seed,
                time_budget: config.time_budget,
                clock: config.clock,
                stop_at_first_solution: config.stop_at_first_solution || params.stop_at_first_solution,
                ..params.clone()
            };
            jist_plan(chain, &problem.scene, start, &goals, roadmap, &params)
        }
        PlannerSpec::GraspRrt { params, .. } => {
            let params = RrtParams {
                rng_seed: seed,
                time_budget: config.time_budget,
                clock: config.clock,
                ..params.clone()
            };
            grasp_rrt(chain, &problem.scene, start, &goals, &params)
        }
    }
}

/// Runs every planner on every problem for `trials` seeds (`base_seed + trial`).
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkOutput> {
    config.validate()?;
    let chain = robots::load_robot(&config.robot)?;
    let roadmap = load_roadmap(&chain, &config.roadmap)?;
    let problems = config
        .problems
        .iter()
        .map(|p| load_problem(p).map(|lp| (p.clone(), lp)))
        .collect::<Result<Vec<_>>>()?;
    let buckets = config.buckets();
    let mut trials = Vec::new();
    let mut trial_buckets = Vec::new();
    for spec in &config.planners {
        for (label, problem) in &problems {
            for trial in 0..config.trials {
                let seed = config.base_seed + trial as u64;
                let started = Instant::now();
                let result = run_trial(spec, config, &chain, &roadmap, problem, seed);
                let wall = match config.clock {
                    Clock::Wall => started.elapsed().as_secs_f64(),
                    Clock::Virtual { .. } => 0.0,
                };
                let row = trial_row(spec.name(), label, trial, seed, &result, wall);
                for &t in &buckets {
                    let cost = result.as_ref().ok().and_then(|r| r.cost_at(t));
                    trial_buckets.push(TrialBucketRow {
                        planner: spec.name().to_string(),
                        problem: label.clone(),
                        trial,
                        time: t,
                        solved: cost.is_some() as u8,
                        cost,
                    });
                }
                trials.push(row);
            }
        }
    }
    let buckets = aggregate(&trial_buckets)?;
    Ok(BenchmarkOutput {
        trials,
        trial_buckets,
        buckets,
    })
}

fn trial_row(planner: &str, problem: &str, trial: usize, seed: u64, result: &Result<PlanResult>, wall: f64) -> TrialRow {
    let base = TrialRow {
        planner: planner.to_string(),
        problem: problem.to_string(),
        trial,
        seed,
        outcome: Outcome::Error,
        first_solution_time: None,
        final_cost: None,
        iterations: 0,
        nodes: 0,
        collision_checks: 0,
        elapsed: wall,
        message: String::new(),
    };
    match result {
        Ok(r) => TrialRow {
            outcome: if r.solved() { Outcome::Success } else { Outcome::Timeout },
            first_solution_time: r.first_solution_time(),
            final_cost: r.best_cost,
            iterations: r.stats.iterations,
            nodes: r.stats.nodes,
            collision_checks: r.stats.collision_checks,
            elapsed: r.stats.elapsed,
            ..base
        },
        Err(e @ (Error::EmptyGoalSet | Error::StartInCollision | Error::StartOutOfLimits)) => TrialRow {
            outcome: Outcome::Infeasible,
            message: e.to_string(),
            ..base
        },
        Err(e) => TrialRow {
            message: e.to_string(),
            ..base
        },
    }
}

/// Writes `trials.csv`, `trial_buckets.csv` and `buckets.csv` into `dir`.
pub fn write_benchmark(output: &BenchmarkOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_csv(&dir.join("trials.csv"), &output.trials)?;
    write_csv(&dir.join("trial_buckets.csv"), &output.trial_buckets)?;
    write_csv(&dir.join("buckets.csv"), &output.buckets)
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Mean and the half-width of its normal 95% interval; the interval needs two samples.
fn mean_ci(xs: &[f64]) -> Option<(f64, Option<f64>)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return Some((mean, None));
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some((mean, Some(1.96 * (var / n).sqrt())))
}

/// Per (planner, problem, time) success rate and mean cost among solved trials, with
/// 95% normal intervals. Groups keep first-appearance order.
pub fn aggregate(rows: &[TrialBucketRow]) -> Result<Vec<BucketSummary>> {
    if rows.is_empty() {
        return Err(Error::EmptyReport);
    }
    let mut order: Vec<(String, String, u64)> = Vec::new();
    let mut groups: BTreeMap<(String, String, u64), Vec<&TrialBucketRow>> = BTreeMap::new();
    for r in rows {
        let key = (r.planner.clone(), r.problem.clone(), r.time.to_bits());
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(r);
    }
    Ok(order
        .into_iter()
        .map(|key| {
            let group = &groups[&key];
            let success: Vec<f64> = group.iter().map(|r| r.solved as f64).collect();
            let costs: Vec<f64> = group.iter().filter(|r| r.solved == 1).filter_map(|r| r.cost).collect();
            let (rate, rate_hw) = mean_ci(&success).expect("groups are non-empty");
            let cost = mean_ci(&costs);
            let hw_cost = cost.and_then(|c| c.1);
            BucketSummary {
                planner: key.0,
                problem: key.1,
                time: f64::from_bits(key.2),
                trials: group.len(),
                success_rate: rate,
                success_ci_low: rate_hw.map(|h| rate - h),
                success_ci_high: rate_hw.map(|h| rate + h),
                solved: costs.len(),
                mean_cost: cost.map(|c| c.0),
                cost_ci_low: cost.zip(hw_cost).map(|(c, h)| c.0 - h),
                cost_ci_high: cost.zip(hw_cost).map(|(c, h)| c.0 + h),
            }
        })
        .collect())
}

/// Reads `trial_buckets.csv` files and writes `summary.json` and `report.csv` into
/// `out_dir`. Returns the summary rows.
pub fn emit_report(inputs: &[PathBuf], out_dir: &Path) -> Result<Vec<BucketSummary>> {
    let mut rows = Vec::new();
    for path in inputs {
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::Reader::from_reader(file);
        for (i, row) in reader.deserialize::<TrialBucketRow>().enumerate() {
            rows.push(row.map_err(|e| Error::MalformedCsv(format!("{} record {}: {e}", path.display(), i + 1)))?);
        }
    }
    let summary = aggregate(&rows)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let json = out_dir.join("summary.json");
    fs::write(&json, serde_json::to_string_pretty(&summary)?).map_err(|e| Error::io(&json, e))?;
    write_csv(&out_dir.join("report.csv"), &summary)?;
    Ok(summary)
}

/// Steering methods compared under clutter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SteeringMethod {
    /// IK for the target, then straight joint-space interpolation.
    Local,
    /// IK along the straight end-effector interpolation.
    Ik,
    /// J⁺ steering.
    Jacobian,
}

impl SteeringMethod {
    pub const ALL: [SteeringMethod; 3] = [SteeringMethod::Local, SteeringMethod::Ik, SteeringMethod::Jacobian];

    pub fn name(self) -> &'static str {
        match self {
            SteeringMethod::Local => "local",
            SteeringMethod::Ik => "ik",
            SteeringMethod::Jacobian => "jacobian",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteeringEvalConfig {
    pub robot: String,
    pub fractions: Vec<f64>,
    /// Collision-free states `n`.
    pub free_states: usize,
    /// Reachable poses `k`.
    pub reachable_poses: usize,
    /// Evaluation pairs `m`.
    pub pairs: usize,
    /// Nearest-pose pool as a fraction of `k` (`l ≈ 0.25 k`).
    pub neighbor_fraction: f64,
    /// Poses drawn per state `j`.
    pub picks_per_state: usize,
    pub methods: Vec<SteeringMethod>,
    pub rng_seed: u64,
    pub clutter_bounds: [[f64; 3]; 2],
    pub clutter_sizes: [f64; 2],
    pub keep_clear: Vec<Shape>,
    pub ik_restarts: usize,
    pub validation_resolution: f64,
    pub joint_resolution: f64,
    pub steering: SteeringParams,
}

impl Default for SteeringEvalConfig {
    fn default() -> Self {
        Self {
            robot: "planar-3r".into(),
            fractions: vec![0.0, 0.05, 0.10, 0.15],
            free_states: 1000,
            reachable_poses: 500,
            pairs: 500,
            neighbor_fraction: 0.25,
            picks_per_state: 5,
            methods: SteeringMethod::ALL.to_vec(),
            rng_seed: 0,
            clutter_bounds: [[-1.0, -1.0, -0.5], [1.0, 1.0, 0.5]],
            clutter_sizes: [0.04, 0.12],
            keep_clear: vec![Shape::sphere([0.0, 0.0, 0.0], 0.15)],
            ik_restarts: 10,
            validation_resolution: 0.001,
            joint_resolution: 0.01,
            steering: SteeringParams::default(),
        }
    }
}

impl SteeringEvalConfig {
    pub fn pool_size(&self) -> usize {
        ((self.neighbor_fraction * self.reachable_poses as f64).round() as usize).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.fractions.is_empty()
            || self.free_states == 0
            || self.reachable_poses == 0
            || self.pairs == 0
            || self.methods.is_empty()
            || self.picks_per_state == 0
            || self.ik_restarts == 0
            || !(self.neighbor_fraction > 0.0 && self.neighbor_fraction <= 1.0)
            || self.picks_per_state >= self.pool_size()
        {
            return Err(Error::InvalidParameter(format!("steering evaluation config {self:?}")));
        }
        self.steering.validate()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// One row of `steering.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteeringRow {
    pub fraction: f64,
    pub achieved_fraction: f64,
    pub pair: usize,
    pub method: SteeringMethod,
    /// Reached the target with a collision-free trajectory.
    pub success: u8,
    pub reached: u8,
    pub collision_free: u8,
    pub time_s: f64,
    pub path_length: f64,
    pub ee_displacement: f64,
}

/// One row of `steering_summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteeringSummary {
    pub fraction: f64,
    pub method: SteeringMethod,
    pub pairs: usize,
    pub success_rate: f64,
    pub mean_time_s: f64,
    pub mean_path_length: f64,
    pub mean_ee_displacement: f64,
}

#[derive(Debug, Clone)]
pub struct SteeringEvalOutput {
    pub rows: Vec<SteeringRow>,
    pub summary: Vec<SteeringSummary>,
}

impl SteeringEvalOutput {
    /// Success rates per fraction for one method, in fraction order.
    pub fn success_curve(&self, method: SteeringMethod) -> Vec<(f64, f64)> {
        self.summary
            .iter()
            .filter(|s| s.method == method)
            .map(|s| (s.fraction, s.success_rate))
            .collect()
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_csv(&dir.join("steering.csv"), &self.rows)?;
        write_csv(&dir.join("steering_summary.csv"), &self.summary)
    }
}

fn sample_free(
    chain: &KinematicChain,
    obstacles: &[crate::geometry::Obstacle],
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<JointConfig>> {
    let mut out = Vec::with_capacity(count);
    let limit = count * 200;
    for _ in 0..limit {
        if out.len() == count {
            break;
        }
        let q = chain.sample_config(rng);
        if !chain.collide_config(&q, obstacles, &[])? {
            out.push(q);
        }
    }
    if out.len() < count {
        return Err(Error::InsufficientSamples {
            requested: count,
            achieved: out.len(),
        });
    }
    Ok(out)
}

/// Pairs `(state, pose)`: a random free state and `j` poses drawn from its `l` nearest
/// reachable poses, repeated until `m` pairs exist.
fn evaluation_pairs(
    chain: &KinematicChain,
    free: &[JointConfig],
    reachable: &[Pose],
    config: &SteeringEvalConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(usize, Pose)>> {
    let index = PoseIndex::new(&chain.ee_hull, reachable);
    let pool = config.pool_size().min(reachable.len());
    let mut out = Vec::with_capacity(config.pairs);
    while out.len() < config.pairs {
        let x = rng.gen_range(0..free.len());
        let near = index.knn(&chain.fk_pose(&free[x])?, pool, |_| false);
        let picks = config.picks_per_state.min(near.len());
        for i in sample(rng, near.len(), picks) {
            if out.len() < config.pairs {
                out.push((x, reachable[near[i].id]));
            }
        }
    }
    Ok(out)
}

fn run_method(
    chain: &KinematicChain,
    method: SteeringMethod,
    x: &JointConfig,
    target: &Pose,
    ee_velocity_bound: f64,
    pair_seed: u64,
    config: &SteeringEvalConfig,
) -> Result<Trajectory> {
    let params = &config.steering;
    match method {
        SteeringMethod::Local => match solve_ik(chain, target, x, config.ik_restarts, pair_seed, params)? {
            Some(goal) => cspace_steer(chain, x, &goal, params),
            None => Ok(Trajectory::stationary(x.clone(), false)),
        },
        SteeringMethod::Ik => ik_steer(chain, x, target, ee_velocity_bound, params),
        SteeringMethod::Jacobian => jplus_steer(chain, x, target, params),
    }
}

/// Runs the clutter sweep: for each fraction, generates a scene, samples free states,
/// reachable poses and pairs, then runs every method on every pair.
pub fn eval_steering(config: &SteeringEvalConfig) -> Result<SteeringEvalOutput> {
    config.validate()?;
    let chain = robots::load_robot(&config.robot)?;
    let velocity = estimate_ee_velocity_bound(&chain, 200, config.rng_seed, &config.steering)?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &fraction in &config.fractions {
        let (scene, achieved) = generate_clutter_scene(&ClutterSpec {
            bounds: config.clutter_bounds,
            occupied_fraction: fraction,
            size_range: config.clutter_sizes,
            rng_seed: config.rng_seed,
            keep_clear: config.keep_clear.clone(),
        })?;
        let obstacles = scene.collision_obstacles();
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed ^ 0x5eed);
        let free = sample_free(&chain, &obstacles, config.free_states, &mut rng)?;
        let reachable = sample_free(&chain, &obstacles, config.reachable_poses, &mut rng)?
            .iter()
            .map(|q| chain.fk_pose(q))
            .collect::<Result<Vec<_>>>()?;
        let pairs = evaluation_pairs(&chain, &free, &reachable, config, &mut rng)?;
        for &method in &config.methods {
            let first = rows.len();
            for (pair, (x, target)) in pairs.iter().enumerate() {
                let started = Instant::now();
                let traj = run_method(&chain, method, &free[*x], target, velocity, pair as u64, config)?;
                let time_s = started.elapsed().as_secs_f64();
                let collision_free = validate_solution(
                    &chain,
                    &traj,
                    &obstacles,
                    config.validation_resolution,
                    config.joint_resolution,
                )?;
                rows.push(SteeringRow {
                    fraction,
                    achieved_fraction: achieved,
                    pair,
                    method,
                    success: (traj.reached && collision_free) as u8,
                    reached: traj.reached as u8,
                    collision_free: collision_free as u8,
                    time_s,
                    path_length: traj.cspace_length(),
                    ee_displacement: traj.ee_path_cost,
                });
            }
            let block = &rows[first..];
            let n = block.len() as f64;
            summary.push(SteeringSummary {
                fraction,
                method,
                pairs: block.len(),
                success_rate: block.iter().map(|r| r.success as f64).sum::<f64>() / n,
                mean_time_s: block.iter().map(|r| r.time_s).sum::<f64>() / n,
                mean_path_length: block.iter().map(|r| r.path_length).sum::<f64>() / n,
                mean_ee_displacement: block.iter().map(|r| r.ee_displacement).sum::<f64>() / n,
            });
        }
    }
    Ok(SteeringEvalOutput { rows, summary })
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|a, b| xs[*a].total_cmp(&xs[*b]));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            out[order[k]] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation with average ranks for ties; `None` when either side is
/// constant or shorter than two.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    Some(cov / (vx * vy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_values() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]), None);
        let r = spearman(&[0.0, 0.05, 0.1, 0.15], &[0.9, 0.9, 0.8, 0.7]).unwrap();
        assert!(r < 0.0 && r > -1.0);
    }

    #[test]
    fn buckets_end_at_budget() {
        let mut c = BenchmarkConfig {
            robot: "planar-3r".into(),
            roadmap: RoadmapSource::Build { vertices: 10, seed: 0 },
            planners: vec![],
            problems: vec![],
            trials: 1,
            time_budget: 30.0,
            sample_interval: 5.0,
            base_seed: 0,
            clock: Clock::Wall,
            stop_at_first_solution: false,
        };
        assert_eq!(c.buckets(), vec![5.0, 10.0, 15.0, 20.0, 25.0, 30.0]);
        c.sample_interval = 7.0;
        assert_eq!(c.buckets(), vec![7.0, 14.0, 21.0, 28.0, 30.0]);
    }

    #[test]
    fn single_trial_has_no_interval() {
        let rows = vec![TrialBucketRow {
            planner: "jist".into(),
            problem: "p".into(),
            trial: 0,
            time: 1.0,
            solved: 1,
            cost: Some(0.4),
        }];
        let s = aggregate(&rows).unwrap();
        assert_eq!(s[0].success_rate, 1.0);
        assert_eq!(s[0].success_ci_low, None);
        assert_eq!(s[0].mean_cost, Some(0.4));
        assert_eq!(s[0].cost_ci_high, None);
        assert!(matches!(aggregate(&[]), Err(Error::EmptyReport)));
    }
}
