//! Local trajectory generators for the arm.
//!
//! Every generator returns a [`Trajectory`] whose consecutive configurations are at most
//! `waypoint_res` apart in end-effector DISP. None of them check collisions.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, Vector6};

use crate::geometry::{disp_distance, path_cost, HullPoints, Pose, SE3Segment};
use crate::kinematics::{dls_pinv, FkResult, Jacobian, JointConfig, KinematicChain};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SteeringParams {
    /// Damping of the pseudo-inverse.
    pub lambda: f64,
    /// Largest joint-space step norm per iteration (rad).
    pub step_clamp: f64,
    pub max_iters: usize,
    /// Success threshold on DISP to the target (m).
    pub goal_tol: f64,
    /// Largest DISP gap between recorded configurations (m).
    pub waypoint_res: f64,
    /// Control period used for velocity-bounded interpolation (s).
    pub control_dt: f64,
    /// Duration range of random controls (s).
    pub random_duration: [f64; 2],
    /// How many times a rejected step is halved before the iteration stalls.
    pub max_step_halvings: usize,
}

impl Default for SteeringParams {
    fn default() -> Self {
        Self {
            lambda: 0.05,
            step_clamp: 0.05,
            max_iters: 500,
            goal_tol: 0.005,
            waypoint_res: 0.005,
            control_dt: 0.05,
            random_duration: [0.2, 1.0],
            max_step_halvings: 6,
        }
    }
}

impl SteeringParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.step_clamp,
            self.goal_tol,
            self.waypoint_res,
            self.control_dt,
        ];
        if self.lambda < 0.0 || positive.iter().any(|v| !(*v > 0.0)) || self.max_iters == 0 {
            return Err(Error::InvalidParameter(format!("steering params {self:?}")));
        }
        if !(self.random_duration[0] > 0.0 && self.random_duration[0] <= self.random_duration[1]) {
            return Err(Error::InvalidParameter(format!(
                "random duration range {:?}",
                self.random_duration
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub configs: Vec<JointConfig>,
    pub reached: bool,
    /// Sum of DISP gaps of the end-effector poses along `configs`.
    pub ee_path_cost: f64,
}

impl Trajectory {
    pub fn stationary(q: JointConfig, reached: bool) -> Self {
        Self {
            configs: vec![q],
            reached,
            ee_path_cost: 0.0,
        }
    }

    pub fn last(&self) -> &JointConfig {
        self.configs.last().expect("trajectories are non-empty")
    }

    /// Summed joint-space distances between consecutive configurations.
    pub fn cspace_length(&self) -> f64 {
        self.configs.windows(2).map(|w| w[0].distance(&w[1])).sum()
    }

    /// Recomputes the end-effector cost from scratch.
    pub fn recompute_cost(&self, chain: &KinematicChain) -> Result<f64> {
        let poses = self
            .configs
            .iter()
            .map(|q| chain.fk_pose(q))
            .collect::<Result<Vec<_>>>()?;
        path_cost(&chain.ee_hull, &poses)
    }

    /// Appends `other`, whose first configuration must equal our last.
    pub fn extend(&mut self, other: &Trajectory) {
        self.configs.extend(other.configs.iter().skip(1).cloned());
        self.ee_path_cost += other.ee_path_cost;
        self.reached = other.reached;
    }
}

/// Accumulates configurations and keeps end-effector gaps under a resolution.
pub(crate) struct TrajBuilder<'a> {
    chain: &'a KinematicChain,
    res: f64,
    configs: Vec<JointConfig>,
    last_pose: Pose,
    cost: f64,
}

impl<'a> TrajBuilder<'a> {
    pub(crate) fn new(chain: &'a KinematicChain, start: JointConfig, start_pose: Pose, res: f64) -> Self {
        Self {
            chain,
            res,
            configs: vec![start],
            last_pose: start_pose,
            cost: 0.0,
        }
    }

    /// Moves along the joint-space segment to `q` (whose pose is `pose`), inserting
    /// bisection points until every end-effector gap is at most the resolution.
    pub(crate) fn push(&mut self, q: JointConfig, pose: Pose) {
        let hull = &self.chain.ee_hull;
        let from = self.configs.last().expect("non-empty").clone();
        let mut stack = vec![(q, pose, 0u32)];
        let mut left = (from, self.last_pose);
        while let Some((q_r, e_r, depth)) = stack.pop() {
            let gap = disp_distance(hull, &left.1, &e_r);
            if gap <= self.res || depth >= 40 {
                self.cost += gap;
                self.configs.push(q_r.clone());
                left = (q_r, e_r);
            } else {
                let mid = left.0.lerp(&q_r, 0.5);
                let e_mid = self.chain.fk_pose(&mid).expect("dimension checked");
                stack.push((q_r, e_r, depth + 1));
                stack.push((mid, e_mid, depth + 1));
            }
        }
        self.last_pose = left.1;
    }

    pub(crate) fn last(&self) -> &JointConfig {
        self.configs.last().expect("non-empty")
    }

    pub(crate) fn finish(self, reached: bool) -> Trajectory {
        Trajectory {
            configs: self.configs,
            reached,
            ee_path_cost: self.cost,
        }
    }
}

fn check_start(chain: &KinematicChain, q: &JointConfig) -> Result<Pose> {
    let pose = chain.fk_pose(q)?;
    if !chain.within_limits(q) {
        return Err(Error::StartOutOfLimits);
    }
    Ok(pose)
}

/// Outcome of the damped-least-squares iteration without trajectory recording.
struct Descent {
    q: JointConfig,
    distance: f64,
}

/// Runs the update `Δq = J⁺(q)·(e_target ⊖ e)` with step clamping and a halving line
/// search that only accepts steps which do not increase DISP to the target. When no
/// halving of that step helps, the same search is tried along the damped least-squares
/// solution for the stacked hull-point displacements before the iteration gives up.
/// `on_step` sees each accepted configuration and its pose.
fn descend(
    chain: &KinematicChain,
    q_start: &JointConfig,
    target: &Pose,
    params: &SteeringParams,
    mut on_step: impl FnMut(&JointConfig, &Pose),
) -> Result<Descent> {
    let hull = &chain.ee_hull;
    let mut q = q_start.clone();
    let mut fk = chain.fk(&q)?;
    let mut dist = disp_distance(hull, &fk.ee, target);
    for _ in 0..params.max_iters {
        if dist <= params.goal_tol {
            break;
        }
        let jac = chain.jacobian_from_fk(&fk);
        let err = Vector6::from(fk.ee.error_to(target));
        let mut accepted = line_search(chain, &q, dls_pinv(&jac, params.lambda)? * err, dist, target, params)?;
        if accepted.is_none() {
            let dq = hull_point_step(hull, &jac, &fk.ee, target, params.lambda);
            accepted = line_search(chain, &q, dq, dist, target, params)?;
        }
        let Some((q_new, fk_new, d_new)) = accepted else {
            break;
        };
        on_step(&q_new, &fk_new.ee);
        q = q_new;
        fk = fk_new;
        dist = d_new;
    }
    Ok(Descent { q, distance: dist })
}

type Accepted = Option<(JointConfig, FkResult, f64)>;

fn line_search(
    chain: &KinematicChain,
    q: &JointConfig,
    mut dq: DVector<f64>,
    dist: f64,
    target: &Pose,
    params: &SteeringParams,
) -> Result<Accepted> {
    let norm = dq.norm();
    if !norm.is_finite() || norm == 0.0 {
        return Ok(None);
    }
    if norm > params.step_clamp {
        dq *= params.step_clamp / norm;
    }
    let mut scale = 1.0;
    for _ in 0..=params.max_step_halvings {
        let mut q_try = JointConfig(q.0.iter().zip(dq.iter()).map(|(a, b)| a + scale * b).collect());
        chain.clamp_to_limits(&mut q_try);
        let fk_try = chain.fk(&q_try)?;
        let d_try = disp_distance(&chain.ee_hull, &fk_try.ee, target);
        if d_try < dist {
            return Ok(Some((q_try, fk_try, d_try)));
        }
        scale *= 0.5;
    }
    Ok(None)
}

/// Damped least-squares step for the displacement of every hull point:
/// `(Σ J_kᵀ J_k + λ² I)⁻¹ Σ J_kᵀ e_k` with `J_k = J_v − [r_k]× J_ω`.
fn hull_point_step(hull: &HullPoints, jac: &Jacobian, pose: &Pose, target: &Pose, lambda: f64) -> DVector<f64> {
    let d = jac.0.ncols();
    let jv = jac.0.fixed_rows::<3>(0);
    let jw = jac.0.fixed_rows::<3>(3);
    let mut normal = DMatrix::<f64>::identity(d, d) * (lambda * lambda);
    let mut rhs = DVector::<f64>::zeros(d);
    for p in hull.points() {
        let r = pose.transform_vector(p);
        let e = target.transform_point(p) - pose.transform_point(p);
        let jk = jv - r.cross_matrix() * jw;
        normal += jk.transpose() * &jk;
        rhs += jk.transpose() * e;
    }
    normal
        .cholesky()
        .map(|c| c.solve(&rhs))
        .unwrap_or_else(|| DVector::zeros(d))
}

/// Jacobian pseudo-inverse steering toward an end-effector pose.
pub fn jplus_steer(
    chain: &KinematicChain,
    q_start: &JointConfig,
    target: &Pose,
    params: &SteeringParams,
) -> Result<Trajectory> {
    let start_pose = check_start(chain, q_start)?;
    let mut builder = TrajBuilder::new(chain, q_start.clone(), start_pose, params.waypoint_res);
    let outcome = descend(chain, q_start, target, params, |q, e| {
        builder.push(q.clone(), *e)
    })?;
    Ok(builder.finish(outcome.distance <= params.goal_tol))
}

/// Per-step DISP distances to the target along the accepted iterates of [`jplus_steer`].
pub fn jplus_distance_trace(
    chain: &KinematicChain,
    q_start: &JointConfig,
    target: &Pose,
    params: &SteeringParams,
) -> Result<Vec<f64>> {
    let start_pose = check_start(chain, q_start)?;
    let hull = &chain.ee_hull;
    let mut trace = vec![disp_distance(hull, &start_pose, target)];
    descend(chain, q_start, target, params, |_, e| {
        trace.push(disp_distance(hull, e, target))
    })?;
    Ok(trace)
}

/// Straight-line joint interpolation, at most `max_velocity · control_dt` per joint per step.
pub fn cspace_steer(
    chain: &KinematicChain,
    q_start: &JointConfig,
    q_goal: &JointConfig,
    params: &SteeringParams,
) -> Result<Trajectory> {
    let start_pose = chain.fk_pose(q_start)?;
    chain.fk(q_goal)?;
    let mut builder = TrajBuilder::new(chain, q_start.clone(), start_pose, params.waypoint_res);
    append_cspace(chain, &mut builder, q_goal, params)?;
    Ok(builder.finish(true))
}

fn append_cspace(
    chain: &KinematicChain,
    builder: &mut TrajBuilder,
    q_goal: &JointConfig,
    params: &SteeringParams,
) -> Result<()> {
    let from = builder.last().clone();
    let steps = chain
        .joints
        .iter()
        .zip(from.0.iter().zip(&q_goal.0))
        .map(|(j, (a, b))| ((b - a).abs() / (j.max_velocity * params.control_dt)).ceil() as usize)
        .max()
        .unwrap_or(0);
    for k in 1..=steps {
        let q = if k == steps {
            q_goal.clone()
        } else {
            from.lerp(q_goal, k as f64 / steps as f64)
        };
        let pose = chain.fk_pose(&q)?;
        builder.push(q, pose);
    }
    Ok(())
}

/// Inverse kinematics by repeated J⁺ descent: first from `seed`, then from uniform restarts.
pub fn solve_ik(
    chain: &KinematicChain,
    target: &Pose,
    seed: &JointConfig,
    restarts: usize,
    rng_seed: u64,
    params: &SteeringParams,
) -> Result<Option<JointConfig>> {
    if restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for attempt in 0..restarts {
        let start = if attempt == 0 {
            let mut s = seed.clone();
            chain.fk(&s)?;
            chain.clamp_to_limits(&mut s);
            s
        } else {
            chain.sample_config(&mut rng)
        };
        let out = descend(chain, &start, target, params, |_, _| {})?;
        if out.distance <= params.goal_tol {
            return Ok(Some(out.q));
        }
    }
    Ok(None)
}

/// Follows the straight SE(3) interpolation to `target`, solving IK at each waypoint
/// (seeded by the previous solution) and joining solutions by C-space steering.
pub fn ik_steer(
    chain: &KinematicChain,
    q_start: &JointConfig,
    target: &Pose,
    ee_velocity_bound: f64,
    params: &SteeringParams,
) -> Result<Trajectory> {
    let start_pose = check_start(chain, q_start)?;
    let spacing = (ee_velocity_bound * params.control_dt).min(2.0 * params.waypoint_res);
    let mut builder = TrajBuilder::new(chain, q_start.clone(), start_pose, params.waypoint_res);
    if disp_distance(&chain.ee_hull, &start_pose, target) <= params.goal_tol {
        return Ok(builder.finish(true));
    }
    let seg = SE3Segment::with_resolution(&chain.ee_hull, start_pose, *target, spacing);
    for waypoint in seg.waypoints.iter().skip(1) {
        let seed = builder.last().clone();
        match solve_ik(chain, waypoint, &seed, 1, 0, params)? {
            Some(q) => append_cspace(chain, &mut builder, &q, params)?,
            None => return Ok(builder.finish(false)),
        }
    }
    Ok(builder.finish(true))
}

/// Constant random joint velocities (uniform in ±max_velocity) held for a random duration,
/// integrated at `control_dt` with clamping to the joint limits.
pub fn random_control<R: Rng + ?Sized>(
    chain: &KinematicChain,
    q: &JointConfig,
    rng: &mut R,
    params: &SteeringParams,
) -> Result<Trajectory> {
    let start_pose = chain.fk_pose(q)?;
    let velocities: Vec<f64> = chain
        .joints
        .iter()
        .map(|j| rng.gen_range(-j.max_velocity..=j.max_velocity))
        .collect();
    let duration = rng.gen_range(params.random_duration[0]..=params.random_duration[1]);
    let mut builder = TrajBuilder::new(chain, q.clone(), start_pose, params.waypoint_res);
    let mut current = q.clone();
    let mut elapsed = 0.0;
    while elapsed < duration - 1e-12 {
        let dt = params.control_dt.min(duration - elapsed);
        let mut next = JointConfig(current.0.iter().zip(&velocities).map(|(a, v)| a + v * dt).collect());
        chain.clamp_to_limits(&mut next);
        elapsed += dt;
        if next == current {
            continue;
        }
        let pose = chain.fk_pose(&next)?;
        builder.push(next.clone(), pose);
        current = next;
    }
    Ok(builder.finish(true))
}

/// Largest end-effector DISP rate (m/s) observed over `samples` random C-space
/// steering motions.
pub fn estimate_ee_velocity_bound(
    chain: &KinematicChain,
    samples: usize,
    rng_seed: u64,
    params: &SteeringParams,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let hull = &chain.ee_hull;
    let mut best = 0.0f64;
    for _ in 0..samples {
        let a = chain.sample_config(&mut rng);
        let b = chain.sample_config(&mut rng);
        let steps = chain
            .joints
            .iter()
            .zip(a.0.iter().zip(&b.0))
            .map(|(j, (x, y))| ((y - x).abs() / (j.max_velocity * params.control_dt)).ceil() as usize)
            .max()
            .unwrap_or(1)
            .max(1);
        let mut prev = chain.fk_pose(&a)?;
        for k in 1..=steps {
            let q = a.lerp(&b, k as f64 / steps as f64);
            let e = chain.fk_pose(&q)?;
            best = best.max(disp_distance(hull, &prev, &e) / params.control_dt);
            prev = e;
        }
    }
    Ok(best)
}
