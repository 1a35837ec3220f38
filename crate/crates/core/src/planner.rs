//! The JIST anytime tree search.
//!
//! A tree of arm configurations grows from the start. Nodes are chosen greedily after
//! progress and otherwise at random with weight `1 / (ε + g + h)`, where `h` comes from
//! the closed list of the roadmap search. Each node first tries end-effector targets
//! taken from the closed list, then random controls and discovered goal states.

use std::collections::VecDeque;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{disp_distance, HullPoints, Obstacle, Pose};
use crate::kinematics::{JointConfig, KinematicChain};
use crate::roadmap::{PoseGraph, QueryGraph, ReachabilityRoadmap};
use crate::scenes::{GoalSpec, Scene};
use crate::search::{heuristic_h, msmo_astar, ClosedList};
use crate::steering::{cspace_steer, jplus_steer, random_control, SteeringParams, Trajectory};

/// Added to `g + h` in the selection weight (m).
pub const SELECTION_EPS: f64 = 1e-3;
const MAX_BISECTION_DEPTH: usize = 40;

/// What branch and bound compares against the incumbent cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BabMode {
    /// Prune when `g + h ≥ best`.
    #[default]
    #[serde(rename = "gh")]
    GPlusH,
    /// Prune when `g ≥ best`.
    #[serde(rename = "g")]
    G,
}

impl FromStr for BabMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gh" => Ok(BabMode::GPlusH),
            "g" => Ok(BabMode::G),
            other => Err(Error::InvalidParameter(format!("bab mode {other:?} (expected g or gh)"))),
        }
    }
}

/// Time source for budgets and cost-history stamps.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Clock {
    #[default]
    Wall,
    /// Deterministic time charged per iteration and per collision or pose check.
    Virtual { per_iteration: f64, per_check: f64 },
}

impl Clock {
    /// Charges roughly what a desktop core spends on the bundled 7-DOF problems.
    pub const DESKTOP: Clock = Clock::Virtual {
        per_iteration: 1.2e-4,
        per_check: 3.5e-6,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerParams {
    pub iterations: usize,
    pub kappa: usize,
    /// DISP tolerance for reaching a goal pose (m).
    pub goal_tol: f64,
    /// Seconds, measured by `clock`.
    pub time_budget: f64,
    pub rng_seed: u64,
    pub bab: BabMode,
    /// Largest end-effector DISP between collision-checked configurations (m).
    pub validation_resolution: f64,
    /// Largest joint change between collision-checked configurations (rad).
    pub joint_resolution: f64,
    pub clock: Clock,
    pub record_trace: bool,
    pub stop_at_first_solution: bool,
    pub steering: SteeringParams,
}

impl Default for PlannerParams {
    fn default() -> Self {
        Self {
            iterations: 10_000,
            kappa: 20,
            goal_tol: 0.005,
            time_budget: 30.0,
            rng_seed: 0,
            bab: BabMode::GPlusH,
            validation_resolution: 0.001,
            joint_resolution: 0.01,
            clock: Clock::Wall,
            record_trace: false,
            stop_at_first_solution: false,
            steering: SteeringParams::default(),
        }
    }
}

impl PlannerParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.goal_tol,
            self.time_budget,
            self.validation_resolution,
            self.joint_resolution,
        ];
        if self.iterations == 0 || self.kappa == 0 || positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidParameter(format!("planner params {self:?}")));
        }
        if let Clock::Virtual { per_iteration, per_check } = self.clock {
            if !(per_iteration >= 0.0 && per_check >= 0.0) {
                return Err(Error::InvalidParameter(format!("clock {:?}", self.clock)));
            }
        }
        self.steering.validate()
    }
}

/// A way to extend the tree out of a node.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    /// Steer the end effector to `pose`, whose heuristic value is `h`.
    TargetPose { pose: Pose, h: f64 },
    RandomControl { seed: u64 },
    /// Interpolate in C-space to a configuration that reached goal `goal`.
    GoalConfigTarget { config: JointConfig, goal: usize },
}

impl Action {
    /// Priority: lower is tried first. Random controls have no known outcome.
    pub fn h(&self) -> f64 {
        match self {
            Action::TargetPose { h, .. } => *h,
            Action::RandomControl { .. } => f64::INFINITY,
            Action::GoalConfigTarget { .. } => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Candidates {
    Unexpanded,
    /// Empty once every greedy or fallback action was consumed.
    Pending(VecDeque<Action>),
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub config: JointConfig,
    pub pose: Pose,
    pub parent: Option<usize>,
    /// Motion from the parent.
    pub edge: Option<Trajectory>,
    pub g: f64,
    pub h: f64,
    /// Index of the goal pose this node satisfies.
    pub goal: Option<usize>,
    cand: Candidates,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostRecord {
    pub elapsed: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanStats {
    pub iterations: usize,
    pub nodes: usize,
    pub collision_checks: usize,
    pub astar_pose_checks: usize,
    pub closed_size: usize,
    /// Target-pose actions steered.
    pub greedy_steers: usize,
    /// Random-control and goal-state actions steered.
    pub fallback_steers: usize,
    pub elapsed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub selected: usize,
    /// Selected because the previous insertion improved on its parent's heuristic.
    pub greedy: bool,
    pub added: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub parent: Option<usize>,
    pub g: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanTrace {
    pub iterations: Vec<IterationRecord>,
    pub nodes: Vec<NodeRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    /// Start to goal.
    pub best_path: Option<Trajectory>,
    pub best_cost: Option<f64>,
    pub matched_goal: Option<usize>,
    /// Final motion from the matched pre-grasp to its grasp, when one was found.
    pub approach: Option<Trajectory>,
    pub cost_history: Vec<CostRecord>,
    pub goal_configs: Vec<JointConfig>,
    pub stats: PlanStats,
    pub trace: Option<PlanTrace>,
}

impl PlanResult {
    pub fn solved(&self) -> bool {
        self.best_path.is_some()
    }

    /// Elapsed time of the first recorded solution.
    pub fn first_solution_time(&self) -> Option<f64> {
        self.cost_history.first().map(|r| r.elapsed)
    }

    /// Best cost recorded at or before `t`.
    pub fn cost_at(&self, t: f64) -> Option<f64> {
        self.cost_history
            .iter()
            .take_while(|r| r.elapsed <= t)
            .last()
            .map(|r| r.cost)
    }
}

/// `1 / (ε + g + h)`.
pub fn selection_weight(g: f64, h: f64) -> f64 {
    1.0 / (SELECTION_EPS + g + h)
}

/// Samples node ids with probability proportional to their selection weights.
#[derive(Debug, Clone, Default)]
pub struct Selector {
    prefix: Vec<f64>,
}

impl Selector {
    pub fn push(&mut self, g: f64, h: f64) {
        let total = self.prefix.last().copied().unwrap_or(0.0);
        self.prefix.push(total + selection_weight(g, h));
    }

    pub fn len(&self) -> usize {
        self.prefix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.prefix.last().expect("selector has nodes");
        let u = rng.gen_range(0.0..total);
        self.prefix.partition_point(|p| *p <= u).min(self.prefix.len() - 1)
    }
}

/// True when a node with cost `g` and heuristic `h` cannot beat `best`.
pub fn bab_check(mode: BabMode, g: f64, h: f64, best: f64) -> bool {
    if !best.is_finite() {
        return false;
    }
    match mode {
        BabMode::GPlusH => g + h >= best,
        BabMode::G => g >= best,
    }
}

/// Nearest goal to `pose` under DISP if within `tol`; ties go to the lower index.
pub fn goal_check(hull: &HullPoints, pose: &Pose, goals: &[Pose], tol: f64) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, g) in goals.iter().enumerate() {
        let d = disp_distance(hull, pose, g);
        if best.is_none_or(|(_, b)| d < b) {
            best = Some((i, d));
        }
    }
    best.filter(|(_, d)| *d <= tol)
}

/// Target poses for a node: closed vertices adjacent to the predecessor chain of the
/// closed vertex nearest `pose`, with a lower heuristic than `h_sel`, padded with the
/// goal poses nearest `pose`. Sorted by ascending `h`, ties in discovery order.
pub fn greedy_edges<G: PoseGraph>(
    pose: &Pose,
    h_sel: f64,
    closed: &ClosedList,
    graph: &G,
    goals: &[Pose],
    kappa: usize,
) -> Result<Vec<Action>> {
    let (near, _) = closed.nearest(pose)?;
    let mut taken = vec![false; graph.vertex_count()];
    let mut out = Vec::new();
    let mut cursor = Some(near.vertex_id);
    'walk: while let Some(v) = cursor {
        for edge in graph.edges(v) {
            let Some(entry) = closed.get(edge.to) else { continue };
            if taken[edge.to] || entry.g2 >= h_sel {
                continue;
            }
            taken[edge.to] = true;
            out.push(Action::TargetPose {
                pose: *graph.pose(edge.to),
                h: entry.g2,
            });
            if out.len() == kappa {
                break 'walk;
            }
        }
        cursor = closed.get(v).and_then(|e| e.predecessor);
    }
    if out.len() < kappa {
        let hull = graph.hull();
        let mut by_distance: Vec<(f64, usize)> = goals
            .iter()
            .enumerate()
            .map(|(i, g)| (disp_distance(hull, pose, g), i))
            .collect();
        by_distance.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (_, i) in by_distance.into_iter().take(kappa - out.len()) {
            out.push(Action::TargetPose {
                pose: goals[i],
                h: heuristic_h(&goals[i], closed)?,
            });
        }
    }
    out.sort_by(|a, b| a.h().total_cmp(&b.h()));
    Ok(out)
}

/// One random control and, when goal states are known, one of them chosen uniformly.
pub fn fallback_edges<R: Rng + ?Sized>(goal_configs: &[(JointConfig, usize)], rng: &mut R) -> Vec<Action> {
    let mut out = vec![Action::RandomControl { seed: rng.gen() }];
    if !goal_configs.is_empty() {
        let (config, goal) = &goal_configs[rng.gen_range(0..goal_configs.len())];
        out.push(Action::GoalConfigTarget {
            config: config.clone(),
            goal: *goal,
        });
    }
    out.sort_by(|a, b| a.h().total_cmp(&b.h()));
    out
}

/// Collision checking along trajectories at a fixed resolution.
#[derive(Debug, Clone)]
pub struct MotionChecker<'a> {
    pub chain: &'a KinematicChain,
    pub obstacles: &'a [Obstacle],
    pub ignore_ids: &'a [u32],
    pub resolution: f64,
    pub joint_resolution: f64,
    pub checks: usize,
}

impl<'a> MotionChecker<'a> {
    pub fn new(chain: &'a KinematicChain, obstacles: &'a [Obstacle], resolution: f64, joint_resolution: f64) -> Self {
        Self {
            chain,
            obstacles,
            ignore_ids: &[],
            resolution,
            joint_resolution,
            checks: 0,
        }
    }

    fn collides(&mut self, q: &JointConfig) -> Result<(bool, Pose)> {
        self.checks += 1;
        let fk = self.chain.fk(q)?;
        Ok((self.chain.collide_fk(&fk, self.obstacles, self.ignore_ids), fk.ee))
    }

    /// Checks the motion from `a` (assumed valid) to `b`, including `b`. The straight
    /// joint-space segment is bisected until neighbours are within both resolutions.
    fn motion_free(&mut self, a: &JointConfig, pa: &Pose, b: &JointConfig) -> Result<bool> {
        let (hit, pb) = self.collides(b)?;
        if hit {
            return Ok(false);
        }
        let mut stack = vec![(a.clone(), *pa, b.clone(), pb, 0usize)];
        while let Some((a, pa, b, pb, depth)) = stack.pop() {
            let joint_step = a.0.iter().zip(&b.0).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            let fine = disp_distance(&self.chain.ee_hull, &pa, &pb) <= self.resolution
                && joint_step <= self.joint_resolution;
            if fine || depth >= MAX_BISECTION_DEPTH {
                continue;
            }
            let m = a.lerp(&b, 0.5);
            let (hit, pm) = self.collides(&m)?;
            if hit {
                return Ok(false);
            }
            stack.push((m.clone(), pm, b, pb, depth + 1));
            stack.push((a, pa, m, pm, depth + 1));
        }
        Ok(true)
    }

    /// Checks every motion of `traj` after its first configuration.
    pub fn edge_free(&mut self, traj: &Trajectory) -> Result<bool> {
        let mut prev = traj.configs[0].clone();
        let mut prev_pose = self.chain.fk_pose(&prev)?;
        for q in &traj.configs[1..] {
            if !self.motion_free(&prev, &prev_pose, q)? {
                return Ok(false);
            }
            prev_pose = self.chain.fk_pose(q)?;
            prev = q.clone();
        }
        Ok(true)
    }

    /// Checks the first configuration and every motion of `traj`.
    pub fn trajectory_free(&mut self, traj: &Trajectory) -> Result<bool> {
        Ok(!self.collides(&traj.configs[0])?.0 && self.edge_free(traj)?)
    }
}

/// True iff `traj` is collision-free at the given resolutions.
pub fn validate_solution(
    chain: &KinematicChain,
    traj: &Trajectory,
    obstacles: &[Obstacle],
    resolution: f64,
    joint_resolution: f64,
) -> Result<bool> {
    if traj.configs.is_empty() {
        return Err(Error::EmptyPath);
    }
    MotionChecker::new(chain, obstacles, resolution, joint_resolution).trajectory_free(traj)
}

struct Timer {
    clock: Clock,
    start: Instant,
}

impl Timer {
    fn elapsed(&self, iterations: usize, checks: usize) -> f64 {
        match self.clock {
            Clock::Wall => self.start.elapsed().as_secs_f64(),
            Clock::Virtual { per_iteration, per_check } => {
                iterations as f64 * per_iteration + checks as f64 * per_check
            }
        }
    }
}

pub(crate) fn check_start(chain: &KinematicChain, q: &JointConfig, obstacles: &[Obstacle], goals: &[Pose]) -> Result<()> {
    chain.fk(q)?;
    if !chain.within_limits(q) {
        return Err(Error::StartOutOfLimits);
    }
    if chain.collide_config(q, obstacles, &[])? {
        return Err(Error::StartInCollision);
    }
    if goals.is_empty() {
        return Err(Error::EmptyGoalSet);
    }
    Ok(())
}

/// Steers from a pre-grasp goal to its grasp, ignoring the goal's listed obstacles.
pub(crate) fn approach_motion(
    chain: &KinematicChain,
    obstacles: &[Obstacle],
    goals: &GoalSpec,
    q_goal: &JointConfig,
    goal: usize,
    params: &PlannerParams,
) -> Result<Option<Trajectory>> {
    let Some(target) = goals.approach_poses.as_ref().and_then(|a| a.get(goal)) else {
        return Ok(None);
    };
    let traj = jplus_steer(chain, q_goal, target, &params.steering)?;
    if !traj.reached {
        return Ok(None);
    }
    let mut checker = MotionChecker::new(chain, obstacles, params.validation_resolution, params.joint_resolution);
    checker.ignore_ids = &goals.approach_ignore_ids;
    Ok(checker.edge_free(&traj)?.then_some(traj))
}

fn steer(chain: &KinematicChain, q: &JointConfig, action: &Action, params: &SteeringParams) -> Result<Trajectory> {
    match action {
        Action::TargetPose { pose, .. } => jplus_steer(chain, q, pose, params),
        Action::GoalConfigTarget { config, .. } => cspace_steer(chain, q, config, params),
        Action::RandomControl { seed } => random_control(chain, q, &mut ChaCha8Rng::seed_from_u64(*seed), params),
    }
}

/// Runs JIST from `q_start` toward the goal poses of `goals`.
pub fn jist_plan(
    chain: &KinematicChain,
    scene: &Scene,
    q_start: &JointConfig,
    goals: &GoalSpec,
    roadmap: &ReachabilityRoadmap,
    params: &PlannerParams,
) -> Result<PlanResult> {
    let timer = Timer {
        clock: params.clock,
        start: Instant::now(),
    };
    params.validate()?;
    let obstacles = scene.collision_obstacles();
    let goal_poses = &goals.goal_poses;
    check_start(chain, q_start, &obstacles, goal_poses)?;
    let hull = &chain.ee_hull;
    let e_start = chain.fk_pose(q_start)?;
    let mut stats = PlanStats::default();

    if let Some((goal, _)) = goal_check(hull, &e_start, goal_poses, params.goal_tol) {
        stats.nodes = 1;
        stats.elapsed = timer.elapsed(0, 0);
        let path = Trajectory::stationary(q_start.clone(), true);
        let approach = approach_motion(chain, &obstacles, goals, q_start, goal, params)?;
        return Ok(PlanResult {
            best_path: Some(path),
            best_cost: Some(0.0),
            matched_goal: Some(goal),
            approach,
            cost_history: vec![CostRecord {
                elapsed: stats.elapsed,
                cost: 0.0,
            }],
            goal_configs: vec![q_start.clone()],
            stats,
            trace: params.record_trace.then(PlanTrace::default),
        });
    }

    let attachment = roadmap.attach_query(&e_start, goal_poses)?;
    let closed = msmo_astar(roadmap, &attachment, &obstacles, &chain.ee_body);
    let graph = QueryGraph::new(roadmap, &attachment);
    stats.astar_pose_checks = closed.pose_checks;
    stats.closed_size = closed.len();

    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut checker = MotionChecker::new(chain, &obstacles, params.validation_resolution, params.joint_resolution);
    let mut tree = vec![TreeNode {
        config: q_start.clone(),
        pose: e_start,
        parent: None,
        edge: None,
        g: 0.0,
        h: heuristic_h(&e_start, &closed)?,
        goal: None,
        cand: Candidates::Unexpanded,
    }];
    let mut selector = Selector::default();
    selector.push(0.0, tree[0].h);
    let mut goal_configs: Vec<(JointConfig, usize)> = Vec::new();
    let mut history = Vec::new();
    let mut best: Option<usize> = None;
    let mut best_cost = f64::INFINITY;
    let mut trace = params.record_trace.then(PlanTrace::default);
    let mut last_new: Option<usize> = None;

    let astar_checks = stats.astar_pose_checks;
    let elapsed = |iterations: usize, checks: usize| timer.elapsed(iterations, checks + astar_checks);
    for iteration in 0..params.iterations {
        if elapsed(iteration, checker.checks) >= params.time_budget {
            break;
        }
        stats.iterations = iteration + 1;

        let improved = last_new.filter(|&n| {
            let parent = tree[n].parent.expect("inserted nodes have parents");
            tree[n].h < tree[parent].h
        });
        let sel = improved.unwrap_or_else(|| selector.sample(&mut rng));
        let node = &tree[sel];
        let refill = match &node.cand {
            Candidates::Unexpanded => Some(greedy_edges(&node.pose, node.h, &closed, &graph, goal_poses, params.kappa)?),
            Candidates::Pending(list) if list.is_empty() => Some(fallback_edges(&goal_configs, &mut rng)),
            Candidates::Pending(_) => None,
        };
        if let Some(actions) = refill {
            tree[sel].cand = Candidates::Pending(actions.into());
        }
        let Candidates::Pending(list) = &mut tree[sel].cand else { unreachable!() };
        let action = list.pop_front();
        last_new = None;

        if let Some(action) = action {
            match action {
                Action::TargetPose { .. } => stats.greedy_steers += 1,
                _ => stats.fallback_steers += 1,
            }
            let traj = steer(chain, &tree[sel].config, &action, &params.steering)?;
            last_new = try_insert(
                chain,
                &traj,
                sel,
                &mut tree,
                &closed,
                goal_poses,
                best_cost,
                params,
                &mut checker,
            )?;
        }
        if let Some(trace) = trace.as_mut() {
            trace.iterations.push(IterationRecord {
                selected: sel,
                greedy: improved.is_some(),
                added: last_new,
            });
        }
        let Some(id) = last_new else { continue };
        selector.push(tree[id].g, tree[id].h);
        if let Some(goal) = tree[id].goal {
            goal_configs.push((tree[id].config.clone(), goal));
            if tree[id].g < best_cost {
                best_cost = tree[id].g;
                best = Some(id);
                history.push(CostRecord {
                    elapsed: elapsed(iteration + 1, checker.checks),
                    cost: best_cost,
                });
                if params.stop_at_first_solution || best_cost == 0.0 {
                    break;
                }
            }
        }
    }

    stats.nodes = tree.len();
    stats.collision_checks = checker.checks;
    stats.elapsed = elapsed(stats.iterations, checker.checks);
    let (best_path, matched_goal, approach) = match best {
        Some(id) => {
            let goal = tree[id].goal.expect("solutions reach a goal");
            let approach = approach_motion(chain, &obstacles, goals, &tree[id].config, goal, params)?;
            (Some(extract_path(&tree, id)), Some(goal), approach)
        }
        None => (None, None, None),
    };
    if let Some(trace) = trace.as_mut() {
        trace.nodes = tree
            .iter()
            .map(|n| NodeRecord {
                parent: n.parent,
                g: n.g,
                h: n.h,
            })
            .collect();
    }
    Ok(PlanResult {
        best_path,
        best_cost: best.map(|_| best_cost),
        matched_goal,
        approach,
        cost_history: history,
        goal_configs: goal_configs.into_iter().map(|(q, _)| q).collect(),
        stats,
        trace,
    })
}

#[allow(clippy::too_many_arguments)]
fn try_insert(
    chain: &KinematicChain,
    traj: &Trajectory,
    sel: usize,
    tree: &mut Vec<TreeNode>,
    closed: &ClosedList,
    goals: &[Pose],
    best_cost: f64,
    params: &PlannerParams,
    checker: &mut MotionChecker,
) -> Result<Option<usize>> {
    if traj.configs.len() < 2 {
        return Ok(None);
    }
    let q_new = traj.last().clone();
    let pose = chain.fk_pose(&q_new)?;
    let g = tree[sel].g + traj.ee_path_cost;
    let goal = goal_check(&chain.ee_hull, &pose, goals, params.goal_tol).map(|(i, _)| i);
    let h = heuristic_h(&pose, closed)?;
    let h_bound = if goal.is_some() { 0.0 } else { h };
    if bab_check(params.bab, g, h_bound, best_cost) || !checker.edge_free(traj)? {
        return Ok(None);
    }
    tree.push(TreeNode {
        config: q_new,
        pose,
        parent: Some(sel),
        edge: Some(traj.clone()),
        g,
        h,
        goal,
        cand: Candidates::Unexpanded,
    });
    Ok(Some(tree.len() - 1))
}

fn extract_path(tree: &[TreeNode], leaf: usize) -> Trajectory {
    let mut chain = vec![leaf];
    while let Some(p) = tree[*chain.last().expect("non-empty")].parent {
        chain.push(p);
    }
    let mut path = Trajectory::stationary(tree[0].config.clone(), false);
    for id in chain.into_iter().rev().skip(1) {
        path.extend(tree[id].edge.as_ref().expect("non-root nodes have edges"));
    }
    path.reached = true;
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Shape;
    use crate::kinematics::robots;

    #[test]
    fn bab_boundaries() {
        assert!(!bab_check(BabMode::GPlusH, 5.0, 5.0, f64::INFINITY));
        assert!(bab_check(BabMode::GPlusH, 0.5, 0.5, 1.0));
        assert!(!bab_check(BabMode::GPlusH, 0.5, 0.49, 1.0));
        assert!(!bab_check(BabMode::G, 0.5, 0.6, 1.0));
        assert!(bab_check(BabMode::G, 1.0, 0.0, 1.0));
    }

    #[test]
    fn goal_check_boundaries() {
        let hull = HullPoints::box_corners(0.05, 0.05, 0.05);
        let g = Pose::from_translation(0.3, 0.0, 0.0);
        assert_eq!(goal_check(&hull, &g, &[g], 0.005), Some((0, 0.0)));
        let off = Pose::from_translation(0.3 + 0.005 + 1e-6, 0.0, 0.0);
        assert_eq!(goal_check(&hull, &off, &[g], 0.005), None);
        let mid = Pose::from_translation(0.3, 0.001, 0.0);
        let (a, b) = (Pose::from_translation(0.3, 0.0, 0.0), Pose::from_translation(0.3, 0.002, 0.0));
        assert_eq!(goal_check(&hull, &mid, &[b, a], 0.005).map(|x| x.0), Some(0));
    }

    #[test]
    fn selector_single_node() {
        let mut s = Selector::default();
        s.push(3.0, 4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..100).all(|_| s.sample(&mut rng) == 0));
    }

    #[test]
    fn fallback_without_goals_is_one_random_control() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = fallback_edges(&[], &mut rng);
        assert!(matches!(a.as_slice(), [Action::RandomControl { .. }]));
        let mut again = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(fallback_edges(&[], &mut again), a);
    }

    #[test]
    fn validation_sees_thin_walls() {
        let chain = robots::planar_2r();
        let q0 = JointConfig(vec![0.0, 0.0]);
        let q1 = JointConfig(vec![1.0, 0.0]);
        let free = Trajectory {
            configs: vec![q0.clone(), q1.clone()],
            reached: true,
            ee_path_cost: 0.0,
        };
        assert!(validate_solution(&chain, &free, &[], 0.001, 0.01).unwrap());
        let reach = chain.total_reach();
        let angle: f64 = 0.5;
        let p = [reach * angle.cos(), reach * angle.sin(), 0.0];
        let wall = [Obstacle::new(1, Shape::sphere(p, 0.002))];
        assert!(!validate_solution(&chain, &free, &wall, 0.001, 0.01).unwrap());
    }

    #[test]
    fn bab_mode_parses() {
        assert_eq!("g".parse::<BabMode>().unwrap(), BabMode::G);
        assert_eq!("gh".parse::<BabMode>().unwrap(), BabMode::GPlusH);
        assert!("x".parse::<BabMode>().is_err());
    }
}
