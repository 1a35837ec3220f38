//! Scenes, procedural clutter, and pick/place goal sets.

use std::collections::HashSet;
use std::path::Path;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{collide_pose, Obstacle, Pose, Shape};
use crate::kinematics::{JointConfig, KinematicChain};

pub const SCENE_FORMAT_VERSION: u32 = 1;
/// Default pre-grasp offset (m).
pub const PREGRASP_OFFSET: f64 = 0.02;
/// Default pre-placement lift (m).
pub const PREPLACEMENT_LIFT: f64 = 0.05;

fn default_version() -> u32 {
    SCENE_FORMAT_VERSION
}

/// The object to be manipulated; `shape` is given in the object frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetObject {
    pub id: u32,
    pub shape: Shape,
    pub pose: Pose,
}

impl TargetObject {
    pub fn world_shape(&self) -> Shape {
        self.shape.transformed(&self.pose)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportSurface {
    pub point: [f64; 3],
    /// Unit normal pointing away from the surface.
    pub normal: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub obstacles: Vec<Obstacle>,
    #[serde(default)]
    pub target_object: Option<TargetObject>,
    #[serde(default)]
    pub support_surfaces: Vec<SupportSurface>,
}

impl Default for Scene {
    fn default() -> Self {
        Self {
            format_version: SCENE_FORMAT_VERSION,
            obstacles: Vec::new(),
            target_object: None,
            support_surfaces: Vec::new(),
        }
    }
}

impl Scene {
    pub fn new(obstacles: Vec<Obstacle>) -> Self {
        Self {
            obstacles,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != SCENE_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                expected: SCENE_FORMAT_VERSION,
                found: self.format_version,
            });
        }
        let mut ids = HashSet::new();
        let target = self.target_object.as_ref().map(|t| t.id);
        for id in self.obstacles.iter().map(|o| o.id).chain(target) {
            if !ids.insert(id) {
                return Err(Error::DuplicateId(id));
            }
        }
        for o in &self.obstacles {
            o.shape.validate()?;
        }
        if let Some(t) = &self.target_object {
            t.shape.validate()?;
        }
        Ok(())
    }

    /// Every obstacle plus the target object in world coordinates.
    pub fn collision_obstacles(&self) -> Vec<Obstacle> {
        let mut out = self.obstacles.clone();
        if let Some(t) = &self.target_object {
            out.push(Obstacle::new(t.id, t.world_shape()));
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scene: Scene = serde_json::from_str(text).map_err(|e| Error::SceneParse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenes serialize")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

/// Parameters of procedural clutter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClutterSpec {
    /// Axis-aligned workspace `[min, max]`.
    pub bounds: [[f64; 3]; 2],
    pub occupied_fraction: f64,
    /// Range of primitive edge lengths (boxes) or diameters (spheres), m.
    pub size_range: [f64; 2],
    pub rng_seed: u64,
    /// Regions that must stay free, e.g. around the robot base.
    #[serde(default)]
    pub keep_clear: Vec<Shape>,
}

const CLUTTER_RETRIES: usize = 10_000;
const CLUTTER_ID_BASE: u32 = 1000;

/// Places random boxes and spheres until their summed volume reaches the requested
/// fraction of the workspace volume. The candidate stream depends only on the seed, so
/// a larger fraction yields a superset of obstacles. Returns the scene and the achieved
/// fraction.
pub fn generate_clutter_scene(spec: &ClutterSpec) -> Result<(Scene, f64)> {
    let [lo, hi] = spec.bounds;
    let extent = Vector3::from(hi) - Vector3::from(lo);
    if !(0.0..=0.5).contains(&spec.occupied_fraction)
        || extent.iter().any(|e| !(*e > 0.0))
        || !(spec.size_range[0] > 0.0 && spec.size_range[0] <= spec.size_range[1])
        || extent.iter().any(|e| *e < spec.size_range[1])
    {
        return Err(Error::InvalidParameter(format!("clutter spec {spec:?}")));
    }
    let volume = extent.x * extent.y * extent.z;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let mut obstacles = Vec::new();
    let mut filled = 0.0;
    let mut misses = 0;
    while filled / volume < spec.occupied_fraction {
        let size = rng.gen_range(spec.size_range[0]..=spec.size_range[1]);
        let is_box = rng.gen_bool(0.5);
        let center: Vector3<f64> =
            Vector3::from_fn(|i, _| rng.gen_range(lo[i] + size / 2.0..=hi[i] - size / 2.0));
        let shape = if is_box {
            let h = Vector3::repeat(size / 2.0);
            Shape::aabb((center - h).into(), (center + h).into())
        } else {
            Shape::sphere(center.into(), size / 2.0)
        };
        if spec.keep_clear.iter().any(|k| k.intersects(&shape)) {
            misses += 1;
            if misses >= CLUTTER_RETRIES {
                return Err(Error::ClutterPlacement {
                    achieved: filled / volume,
                    target: spec.occupied_fraction,
                });
            }
            continue;
        }
        misses = 0;
        filled += shape.volume();
        obstacles.push(Obstacle::new(CLUTTER_ID_BASE + obstacles.len() as u32, shape));
    }
    Ok((Scene::new(obstacles), filled / volume))
}

/// A grasp in the object frame; `approach` is the direction the end effector moves to
/// close in on the object, in the grasp frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grasp {
    pub pose: Pose,
    pub approach: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraspSet {
    pub object_id: u32,
    pub grasps: Vec<Grasp>,
}

impl GraspSet {
    /// Grasps expressed in the world, given the object pose.
    pub fn world_grasps(&self, object_pose: &Pose) -> Vec<Grasp> {
        self.grasps
            .iter()
            .map(|g| Grasp {
                pose: object_pose.compose(&g.pose),
                approach: g.approach,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GoalProvenance {
    Grasp { offset: f64 },
    Placement { lift: f64 },
    Explicit,
}

/// The goal pose set `E_goal`, optionally paired with the true grasp poses that each
/// goal backs away from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalSpec {
    pub goal_poses: Vec<Pose>,
    #[serde(default)]
    pub approach_poses: Option<Vec<Pose>>,
    /// Obstacles (usually the target object) ignored while moving from a goal pose to
    /// its approach pose.
    #[serde(default)]
    pub approach_ignore_ids: Vec<u32>,
    pub provenance: GoalProvenance,
}

impl GoalSpec {
    pub fn explicit(goal_poses: Vec<Pose>) -> Result<Self> {
        if goal_poses.is_empty() {
            return Err(Error::EmptyGoalSet);
        }
        Ok(Self {
            goal_poses,
            approach_poses: None,
            approach_ignore_ids: Vec::new(),
            provenance: GoalProvenance::Explicit,
        })
    }
}

/// Backs each grasp away from the object by `offset` along its approach axis and keeps
/// the results whose end-effector body is collision-free.
pub fn make_pregrasp_goals(
    grasps: &[Grasp],
    offset: f64,
    ee_body: &[Shape],
    obstacles: &[Obstacle],
    target_id: Option<u32>,
) -> Result<GoalSpec> {
    let mut goals = Vec::new();
    let mut approach = Vec::new();
    for g in grasps {
        let axis = Vector3::from(g.approach);
        let norm = axis.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter("zero approach axis".into()));
        }
        let back = -axis * (offset / norm);
        let pre = g.pose.compose(&Pose::from_translation(back.x, back.y, back.z));
        if !collide_pose(ee_body, &pre, obstacles) {
            goals.push(pre);
            approach.push(g.pose);
        }
    }
    if goals.is_empty() {
        return Err(Error::EmptyGoalSet);
    }
    Ok(GoalSpec {
        goal_poses: goals,
        approach_poses: Some(approach),
        approach_ignore_ids: target_id.into_iter().collect(),
        provenance: GoalProvenance::Grasp { offset },
    })
}

/// Lifts each placement pose by `lift` along `normal` (world frame) and keeps the
/// collision-free results.
pub fn make_preplacement_goals(
    placements: &[Pose],
    lift: f64,
    normal: [f64; 3],
    ee_body: &[Shape],
    obstacles: &[Obstacle],
) -> Result<GoalSpec> {
    let n = Vector3::from(normal);
    let n = n / n.norm();
    let goals: Vec<Pose> = placements
        .iter()
        .map(|p| Pose::new(p.translation + n * lift, p.rotation))
        .filter(|p| !collide_pose(ee_body, p, obstacles))
        .collect();
    if goals.is_empty() {
        return Err(Error::EmptyGoalSet);
    }
    Ok(GoalSpec {
        goal_poses: goals,
        approach_poses: None,
        approach_ignore_ids: Vec::new(),
        provenance: GoalProvenance::Placement { lift },
    })
}

/// Largest inflation of the end-effector body at `pose` that stays clear of `obstacles`,
/// found by bisection up to `max_margin`.
pub fn pose_clearance(ee_body: &[Shape], pose: &Pose, obstacles: &[Obstacle], max_margin: f64) -> f64 {
    let collides = |m: f64| {
        let inflated: Vec<Shape> = ee_body.iter().map(|s| s.inflated(m)).collect();
        collide_pose(&inflated, pose, obstacles)
    };
    if collides(0.0) {
        return 0.0;
    }
    if !collides(max_margin) {
        return max_margin;
    }
    let (mut lo, mut hi) = (0.0, max_margin);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if collides(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// A planning query: robot, scene, start configuration and grasp set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    pub name: String,
    pub robot: String,
    /// Scene file, relative to the problem file.
    pub scene: String,
    pub start: JointConfig,
    pub grasps: GraspSet,
    #[serde(default = "default_offset")]
    pub pregrasp_offset: f64,
}

fn default_offset() -> f64 {
    PREGRASP_OFFSET
}

/// A problem with its scene resolved.
#[derive(Debug, Clone)]
pub struct LoadedProblem {
    pub problem: Problem,
    pub scene: Scene,
}

impl LoadedProblem {
    /// Pre-grasp goals for the target object of the scene.
    pub fn goals(&self, chain: &KinematicChain) -> Result<GoalSpec> {
        let target = self
            .scene
            .target_object
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("scene has no target object".into()))?;
        if target.id != self.problem.grasps.object_id {
            return Err(Error::InvalidParameter(format!(
                "grasp set is for object {}, scene target is {}",
                self.problem.grasps.object_id, target.id
            )));
        }
        make_pregrasp_goals(
            &self.problem.grasps.world_grasps(&target.pose),
            self.problem.pregrasp_offset,
            &chain.ee_body,
            &self.scene.collision_obstacles(),
            Some(target.id),
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let problem: Problem = serde_json::from_str(&text)?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let scene = Scene::load(&dir.join(&problem.scene))?;
        Ok(Self { problem, scene })
    }
}

pub mod bundled {
    //! Scenes and problems shipped with the crate.

    use super::*;

    pub const NAMES: [&str; 3] = ["table", "shelf", "clutter-table"];

    const TABLE: &str = include_str!("../data/scenes/table.json");
    const SHELF: &str = include_str!("../data/scenes/shelf.json");
    const CLUTTER_TABLE: &str = include_str!("../data/scenes/clutter_table.json");
    const P_TABLE: &str = include_str!("../data/problems/table.json");
    const P_SHELF: &str = include_str!("../data/problems/shelf.json");
    const P_CLUTTER_TABLE: &str = include_str!("../data/problems/clutter_table.json");

    pub fn scene(name: &str) -> Result<Scene> {
        match name {
            "table" => Scene::from_json(TABLE),
            "shelf" => Scene::from_json(SHELF),
            "clutter-table" => Scene::from_json(CLUTTER_TABLE),
            other => Err(Error::InvalidParameter(format!("unknown bundled scene {other}"))),
        }
    }

    pub fn problem(name: &str) -> Result<LoadedProblem> {
        let text = match name {
            "table" => P_TABLE,
            "shelf" => P_SHELF,
            "clutter-table" => P_CLUTTER_TABLE,
            other => return Err(Error::InvalidParameter(format!("unknown bundled problem {other}"))),
        };
        let problem: Problem = serde_json::from_str(text)?;
        Ok(LoadedProblem {
            problem,
            scene: scene(name)?,
        })
    }
}

/// Loads a bundled problem by name or a problem file by path.
pub fn load_problem(name_or_path: &str) -> Result<LoadedProblem> {
    if bundled::NAMES.contains(&name_or_path) {
        bundled::problem(name_or_path)
    } else {
        LoadedProblem::load(Path::new(name_or_path))
    }
}
