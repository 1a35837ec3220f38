//! An RRT that uses J⁺ steering toward goal poses while goal biasing.
//!
//! Representative of the Grasp-RRT family rather than a reproduction of it.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{disp_distance, Pose};
use crate::kinematics::{JointConfig, KinematicChain};
use crate::planner::{approach_motion, check_start, goal_check, Clock, CostRecord, MotionChecker, PlanResult, PlanStats, PlannerParams};
use crate::scenes::{GoalSpec, Scene};
use crate::steering::{cspace_steer, jplus_steer, SteeringParams, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RrtParams {
    pub goal_bias: f64,
    /// Extension length under the weighted joint metric (rad).
    pub step: f64,
    pub max_iters: usize,
    pub rng_seed: u64,
    pub goal_tol: f64,
    pub time_budget: f64,
    pub validation_resolution: f64,
    pub joint_resolution: f64,
    pub clock: Clock,
    pub steering: SteeringParams,
}

impl Default for RrtParams {
    fn default() -> Self {
        Self {
            goal_bias: 0.1,
            step: 0.1,
            max_iters: 5000,
            rng_seed: 0,
            goal_tol: 0.005,
            time_budget: 30.0,
            validation_resolution: 0.001,
            joint_resolution: 0.01,
            clock: Clock::Wall,
            steering: SteeringParams::default(),
        }
    }
}

impl RrtParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.goal_bias)
            || !(self.step > 0.0)
            || self.max_iters == 0
            || !(self.goal_tol > 0.0 && self.time_budget > 0.0)
            || !(self.validation_resolution > 0.0 && self.joint_resolution > 0.0)
        {
            return Err(Error::InvalidParameter(format!("rrt params {self:?}")));
        }
        self.steering.validate()
    }

    /// The matching settings of a JIST run, for head-to-head comparisons.
    pub fn from_planner(p: &PlannerParams) -> Self {
        Self {
            rng_seed: p.rng_seed,
            goal_tol: p.goal_tol,
            time_budget: p.time_budget,
            validation_resolution: p.validation_resolution,
            joint_resolution: p.joint_resolution,
            clock: p.clock,
            steering: p.steering.clone(),
            ..Self::default()
        }
    }

    fn planner_view(&self) -> PlannerParams {
        PlannerParams {
            goal_tol: self.goal_tol,
            validation_resolution: self.validation_resolution,
            joint_resolution: self.joint_resolution,
            steering: self.steering.clone(),
            ..PlannerParams::default()
        }
    }
}

/// Per-joint weights: the distance from each joint to the end effector at the zero
/// configuration, normalised to sum to one, so proximal joints count more.
pub fn joint_weights(chain: &KinematicChain) -> Result<Vec<f64>> {
    let fk = chain.fk(&JointConfig::zeros(chain.dof()))?;
    let raw: Vec<f64> = (0..chain.dof())
        .map(|i| (fk.ee.translation - fk.frames[i + 1].translation).norm().max(1e-3))
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

fn weighted_distance(w: &[f64], a: &JointConfig, b: &JointConfig) -> f64 {
    w.iter()
        .zip(a.0.iter().zip(&b.0))
        .map(|(w, (x, y))| w * (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

struct Node {
    config: JointConfig,
    pose: Pose,
    parent: Option<usize>,
    edge: Option<Trajectory>,
    g: f64,
}

/// Longest prefix of `traj` whose motions are collision-free.
fn valid_prefix(checker: &mut MotionChecker, traj: &Trajectory) -> Result<Trajectory> {
    let mut keep = 1;
    for i in 1..traj.configs.len() {
        let step = Trajectory {
            configs: traj.configs[i - 1..=i].to_vec(),
            reached: false,
            ee_path_cost: 0.0,
        };
        if !checker.edge_free(&step)? {
            break;
        }
        keep = i + 1;
    }
    let mut out = Trajectory::stationary(traj.configs[0].clone(), traj.reached && keep == traj.configs.len());
    out.configs.extend_from_slice(&traj.configs[1..keep]);
    out.ee_path_cost = out.recompute_cost(checker.chain)?;
    Ok(out)
}

/// RRT with uniform C-space sampling and J⁺ goal biasing. Stops at the first solution.
pub fn grasp_rrt(
    chain: &KinematicChain,
    scene: &Scene,
    q_start: &JointConfig,
    goals: &GoalSpec,
    params: &RrtParams,
) -> Result<PlanResult> {
    let started = Instant::now();
    params.validate()?;
    let obstacles = scene.collision_obstacles();
    let goal_poses = &goals.goal_poses;
    check_start(chain, q_start, &obstacles, goal_poses)?;
    let hull = &chain.ee_hull;
    let weights = joint_weights(chain)?;
    let elapsed = |iterations: usize, checks: usize| match params.clock {
        Clock::Wall => started.elapsed().as_secs_f64(),
        Clock::Virtual { per_iteration, per_check } => iterations as f64 * per_iteration + checks as f64 * per_check,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut checker = MotionChecker::new(chain, &obstacles, params.validation_resolution, params.joint_resolution);
    let e_start = chain.fk_pose(q_start)?;
    let mut tree = vec![Node {
        config: q_start.clone(),
        pose: e_start,
        parent: None,
        edge: None,
        g: 0.0,
    }];
    let mut solution = goal_check(hull, &e_start, goal_poses, params.goal_tol).map(|(g, _)| (0, g));
    let mut stats = PlanStats::default();

    while solution.is_none() && stats.iterations < params.max_iters {
        if elapsed(stats.iterations, checker.checks) >= params.time_budget {
            break;
        }
        stats.iterations += 1;
        let (near, traj) = if rng.gen_bool(params.goal_bias) {
            let target = &goal_poses[rng.gen_range(0..goal_poses.len())];
            let near = (0..tree.len())
                .min_by(|a, b| {
                    disp_distance(hull, &tree[*a].pose, target).total_cmp(&disp_distance(hull, &tree[*b].pose, target))
                })
                .expect("tree is non-empty");
            let traj = jplus_steer(chain, &tree[near].config, target, &params.steering)?;
            (near, valid_prefix(&mut checker, &traj)?)
        } else {
            let q_rand = chain.sample_config(&mut rng);
            let near = (0..tree.len())
                .min_by(|a, b| {
                    weighted_distance(&weights, &tree[*a].config, &q_rand)
                        .total_cmp(&weighted_distance(&weights, &tree[*b].config, &q_rand))
                })
                .expect("tree is non-empty");
            let from = &tree[near].config;
            let d = weighted_distance(&weights, from, &q_rand);
            let q_new = if d <= params.step {
                q_rand
            } else {
                from.lerp(&q_rand, params.step / d)
            };
            let traj = cspace_steer(chain, from, &q_new, &params.steering)?;
            if !checker.edge_free(&traj)? {
                continue;
            }
            (near, traj)
        };
        if traj.configs.len() < 2 {
            continue;
        }
        let config = traj.last().clone();
        let pose = chain.fk_pose(&config)?;
        tree.push(Node {
            config,
            pose,
            parent: Some(near),
            g: tree[near].g + traj.ee_path_cost,
            edge: Some(traj),
        });
        solution = goal_check(hull, &pose, goal_poses, params.goal_tol).map(|(g, _)| (tree.len() - 1, g));
    }

    stats.nodes = tree.len();
    stats.collision_checks = checker.checks;
    stats.elapsed = elapsed(stats.iterations, checker.checks);
    let Some((leaf, goal)) = solution else {
        return Ok(PlanResult {
            best_path: None,
            best_cost: None,
            matched_goal: None,
            approach: None,
            cost_history: Vec::new(),
            goal_configs: Vec::new(),
            stats,
            trace: None,
        });
    };
    let mut ids = vec![leaf];
    while let Some(p) = tree[*ids.last().expect("non-empty")].parent {
        ids.push(p);
    }
    let mut path = Trajectory::stationary(q_start.clone(), true);
    for id in ids.iter().rev().skip(1) {
        path.extend(tree[*id].edge.as_ref().expect("non-root nodes have edges"));
    }
    path.reached = true;
    let approach = approach_motion(chain, &obstacles, goals, &tree[leaf].config, goal, &params.planner_view())?;
    Ok(PlanResult {
        best_cost: Some(tree[leaf].g),
        matched_goal: Some(goal),
        approach,
        cost_history: vec![CostRecord {
            elapsed: stats.elapsed,
            cost: tree[leaf].g,
        }],
        goal_configs: vec![tree[leaf].config.clone()],
        best_path: Some(path),
        stats,
        trace: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::robots;

    #[test]
    fn weights_favour_proximal_joints() {
        let w = joint_weights(&robots::planar_3r()).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w[0] > w[1] && w[1] > w[2]);
    }

    #[test]
    fn start_at_goal_is_immediate() {
        let chain = robots::planar_3r();
        let q = JointConfig(vec![0.3, -0.2, 0.4]);
        let goals = GoalSpec::explicit(vec![chain.fk_pose(&q).unwrap()]).unwrap();
        let r = grasp_rrt(&chain, &Scene::default(), &q, &goals, &RrtParams::default()).unwrap();
        assert_eq!(r.best_cost, Some(0.0));
        assert_eq!(r.stats.iterations, 0);
    }
}
