//! Serial revolute chains: forward kinematics, geometric Jacobian, damped pseudo-inverse
//! and whole-arm collision checking.

mod dls;
pub mod robots;

pub use dls::dls_pinv;

use nalgebra::{DVector, Matrix6xX, Unit, UnitQuaternion, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{HullPoints, Obstacle, Pose, Shape};

pub const CHAIN_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Joint {
    /// Rotation axis in the joint frame.
    pub axis: [f64; 3],
    /// Offset of the joint frame from the parent link frame.
    pub origin: Pose,
    /// `[lo, hi]` in radians, or `null` for a continuous joint.
    pub limits: Option<[f64; 2]>,
    /// rad/s
    pub max_velocity: f64,
}

impl Joint {
    pub fn contains(&self, v: f64) -> bool {
        match self.limits {
            Some([lo, hi]) => v >= lo && v <= hi,
            None => v.is_finite(),
        }
    }

    pub fn clamp(&self, v: f64) -> f64 {
        match self.limits {
            Some([lo, hi]) => v.clamp(lo, hi),
            None => v,
        }
    }

    /// Range used for uniform sampling; one full turn for continuous joints.
    pub fn sample_range(&self) -> [f64; 2] {
        self.limits.unwrap_or([-std::f64::consts::PI, std::f64::consts::PI])
    }
}

/// A serial chain of revolute joints with primitive link geometry.
///
/// `link_bodies[0]` is the fixed base, `link_bodies[i]` moves with joint `i - 1`.
/// The end-effector body is rigidly attached to the last link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KinematicChain {
    #[serde(default = "default_version")]
    pub format_version: u32,
    #[serde(default)]
    pub name: String,
    pub joints: Vec<Joint>,
    pub link_bodies: Vec<Vec<Shape>>,
    pub ee_offset: Pose,
    pub ee_hull: HullPoints,
    pub ee_body: Vec<Shape>,
}

fn default_version() -> u32 {
    CHAIN_FORMAT_VERSION
}

/// Joint angles in radians, one per joint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JointConfig(pub Vec<f64>);

impl JointConfig {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(d: usize) -> Self {
        Self(vec![0.0; d])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }

    /// Euclidean distance in joint space.
    pub fn distance(&self, other: &JointConfig) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn lerp(&self, other: &JointConfig, t: f64) -> JointConfig {
        JointConfig(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + (b - a) * t)
                .collect(),
        )
    }
}

impl From<Vec<f64>> for JointConfig {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Geometric Jacobian: rows 0–2 linear velocity, rows 3–5 angular velocity, both in world frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian(pub Matrix6xX<f64>);

/// End-effector pose plus the world frame of every link (`frames[0]` is the base).
#[derive(Debug, Clone)]
pub struct FkResult {
    pub ee: Pose,
    pub frames: Vec<Pose>,
}

impl KinematicChain {
    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != CHAIN_FORMAT_VERSION {
            return Err(Error::InvalidChain(format!(
                "format version {} unsupported",
                self.format_version
            )));
        }
        if self.joints.is_empty() {
            return Err(Error::InvalidChain("chain has no joints".into()));
        }
        if self.link_bodies.len() != self.joints.len() + 1 {
            return Err(Error::InvalidChain(format!(
                "expected {} link bodies (base plus one per joint), got {}",
                self.joints.len() + 1,
                self.link_bodies.len()
            )));
        }
        for (i, j) in self.joints.iter().enumerate() {
            let n = Vector3::from(j.axis).norm();
            if (n - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidChain(format!("joint {i} axis norm {n}")));
            }
            if matches!(j.limits, Some([lo, hi]) if !(lo < hi)) {
                return Err(Error::InvalidChain(format!("joint {i} limits {:?}", j.limits)));
            }
            if !(j.max_velocity > 0.0) {
                return Err(Error::InvalidChain(format!(
                    "joint {i} max velocity {}",
                    j.max_velocity
                )));
            }
        }
        for s in self.link_bodies.iter().flatten().chain(&self.ee_body) {
            s.validate()?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let chain: KinematicChain = serde_json::from_str(text)?;
        chain.validate()?;
        Ok(chain)
    }

    /// Stable content hash of the chain description (hex SHA-256 of its canonical JSON).
    pub fn spec_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("chains serialize");
        let digest = Sha256::digest(json.as_bytes());
        hex::encode(digest)
    }

    fn check_dim(&self, q: &JointConfig) -> Result<()> {
        if q.len() != self.dof() {
            return Err(Error::DimensionMismatch {
                expected: self.dof(),
                got: q.len(),
            });
        }
        Ok(())
    }

    pub fn fk(&self, q: &JointConfig) -> Result<FkResult> {
        self.check_dim(q)?;
        let mut frames = Vec::with_capacity(self.dof() + 1);
        let mut current = Pose::identity();
        frames.push(current);
        for (joint, &angle) in self.joints.iter().zip(&q.0) {
            let axis = Unit::new_unchecked(Vector3::from(joint.axis));
            let spin = Pose::from_rotation(UnitQuaternion::from_axis_angle(&axis, angle));
            current = current.compose(&joint.origin).compose(&spin);
            frames.push(current);
        }
        Ok(FkResult {
            ee: current.compose(&self.ee_offset),
            frames,
        })
    }

    /// End-effector pose only.
    pub fn fk_pose(&self, q: &JointConfig) -> Result<Pose> {
        Ok(self.fk(q)?.ee)
    }

    pub fn jacobian(&self, q: &JointConfig) -> Result<Jacobian> {
        let fk = self.fk(q)?;
        Ok(self.jacobian_from_fk(&fk))
    }

    pub(crate) fn jacobian_from_fk(&self, fk: &FkResult) -> Jacobian {
        let d = self.dof();
        let p_ee = fk.ee.translation;
        let mut j = Matrix6xX::zeros(d);
        for i in 0..d {
            let frame = &fk.frames[i + 1];
            let axis = frame.transform_vector(&Vector3::from(self.joints[i].axis));
            let lin = axis.cross(&(p_ee - frame.translation));
            for r in 0..3 {
                j[(r, i)] = lin[r];
                j[(r + 3, i)] = axis[r];
            }
        }
        Jacobian(j)
    }

    pub fn within_limits(&self, q: &JointConfig) -> bool {
        q.len() == self.dof()
            && self
                .joints
                .iter()
                .zip(&q.0)
                .all(|(j, v)| j.contains(*v))
    }

    pub fn clamp_to_limits(&self, q: &mut JointConfig) {
        for (j, v) in self.joints.iter().zip(q.0.iter_mut()) {
            *v = j.clamp(*v);
        }
    }

    /// Uniform sample inside the joint limits.
    pub fn sample_config<R: Rng + ?Sized>(&self, rng: &mut R) -> JointConfig {
        JointConfig(
            self.joints
                .iter()
                .map(|j| {
                    let [lo, hi] = j.sample_range();
                    rng.gen_range(lo..=hi)
                })
                .collect(),
        )
    }

    /// Every body in world coordinates, tagged with its link index
    /// (the end-effector body shares the last link's index).
    pub fn world_bodies(&self, fk: &FkResult) -> Vec<(usize, Shape)> {
        let mut out = Vec::new();
        for (i, shapes) in self.link_bodies.iter().enumerate() {
            for s in shapes {
                out.push((i, s.transformed(&fk.frames[i])));
            }
        }
        let last = self.dof();
        for s in &self.ee_body {
            out.push((last, s.transformed(&fk.ee)));
        }
        out
    }

    /// True iff a body touches a non-ignored obstacle, or two links at least two joints
    /// apart touch each other.
    pub fn collide_config(
        &self,
        q: &JointConfig,
        scene: &[Obstacle],
        ignore_ids: &[u32],
    ) -> Result<bool> {
        let fk = self.fk(q)?;
        Ok(self.collide_fk(&fk, scene, ignore_ids))
    }

    pub(crate) fn collide_fk(&self, fk: &FkResult, scene: &[Obstacle], ignore_ids: &[u32]) -> bool {
        let bodies = self.world_bodies(fk);
        for (_, b) in &bodies {
            for o in scene {
                if !ignore_ids.contains(&o.id) && b.intersects(&o.shape) {
                    return true;
                }
            }
        }
        self.self_collides(&bodies)
    }

    pub fn self_collision(&self, q: &JointConfig) -> Result<bool> {
        let fk = self.fk(q)?;
        Ok(self.self_collides(&self.world_bodies(&fk)))
    }

    fn self_collides(&self, bodies: &[(usize, Shape)]) -> bool {
        for (a, (la, sa)) in bodies.iter().enumerate() {
            for (lb, sb) in &bodies[a + 1..] {
                if la.abs_diff(*lb) >= 2 && sa.intersects(sb) {
                    return true;
                }
            }
        }
        false
    }

    /// The arm-plus-object system: `shapes` (in the end-effector frame) join the ee body.
    pub fn with_attached(&self, shapes: &[Shape]) -> KinematicChain {
        let mut chain = self.clone();
        chain.ee_body.extend_from_slice(shapes);
        chain
    }

    /// Sum of link offsets plus the end-effector offset: an upper bound on reach from the base.
    pub fn total_reach(&self) -> f64 {
        self.joints
            .iter()
            .skip(1)
            .map(|j| j.origin.translation.norm())
            .sum::<f64>()
            + self.ee_offset.translation.norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn planar_2r_straight_and_rotated() {
        let chain = robots::planar_2r();
        let fk = chain.fk(&JointConfig(vec![0.0, 0.0])).unwrap();
        assert_relative_eq!(fk.ee.translation, Vector3::new(2.0, 0.0, 0.0), epsilon = 1e-15);
        assert!(fk.ee.rotation.angle() < 1e-15);
        let fk = chain.fk(&JointConfig(vec![FRAC_PI_2, 0.0])).unwrap();
        assert_relative_eq!(fk.ee.translation, Vector3::new(0.0, 2.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let chain = robots::planar_2r();
        assert!(matches!(
            chain.fk(&JointConfig(vec![0.0])),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(chain.jacobian(&JointConfig(vec![0.0; 3])).is_err());
        assert!(chain.collide_config(&JointConfig(vec![]), &[], &[]).is_err());
    }

    #[test]
    fn planar_2r_jacobian_at_zero() {
        let chain = robots::planar_2r();
        let j = chain.jacobian(&JointConfig(vec![0.0, 0.0])).unwrap().0;
        assert_relative_eq!(j[(0, 0)], 0.0, epsilon = 1e-15);
        assert_relative_eq!(j[(0, 1)], 0.0, epsilon = 1e-15);
        assert_relative_eq!(j[(1, 0)], 2.0, epsilon = 1e-15);
        assert_relative_eq!(j[(1, 1)], 1.0, epsilon = 1e-15);
        assert_eq!(j[(5, 0)], 1.0);
        assert_eq!(j[(5, 1)], 1.0);
    }

    #[test]
    fn single_joint_angular_part_is_world_axis() {
        let mut chain = robots::planar_2r();
        chain.joints.truncate(1);
        chain.link_bodies.truncate(2);
        let tilt = Pose::from_axis_angle(Vector3::new(1.0, 1.0, 0.0), 0.7);
        chain.joints[0].origin = tilt;
        chain.joints[0].axis = [0.0, 0.6, 0.8];
        for q in [-1.0, 0.0, 0.4, 2.5] {
            let j = chain.jacobian(&JointConfig(vec![q])).unwrap().0;
            let world_axis = tilt.transform_vector(&Vector3::new(0.0, 0.6, 0.8));
            for r in 0..3 {
                assert!((j[(r + 3, 0)] - world_axis[r]).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn appending_identity_frame_leaves_fk_unchanged() {
        let chain = robots::spatial_7r();
        let mut longer = chain.clone();
        longer.ee_offset = chain.ee_offset.compose(&Pose::identity());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let q = chain.sample_config(&mut rng);
            assert_eq!(chain.fk_pose(&q).unwrap(), longer.fk_pose(&q).unwrap());
        }
    }

    #[test]
    fn empty_scene_straight_arm_is_free() {
        let chain = robots::planar_3r();
        assert!(!chain
            .collide_config(&JointConfig(vec![0.0, 0.0, 0.0]), &[], &[])
            .unwrap());
    }

    #[test]
    fn obstacle_around_base_collides() {
        let chain = robots::planar_3r();
        let box_around_base = Obstacle::new(9, Shape::aabb([-0.1, -0.1, -0.1], [0.1, 0.1, 0.1]));
        assert!(chain
            .collide_config(&JointConfig(vec![0.0, 0.0, 0.0]), &[box_around_base], &[])
            .unwrap());
        assert!(!chain
            .collide_config(&JointConfig(vec![0.0, 0.0, 0.0]), &[box_around_base], &[9])
            .unwrap());
    }

    #[test]
    fn grazing_contact_matches_pairwise_loop() {
        let chain = robots::planar_3r();
        let q = JointConfig(vec![0.3, -0.5, 0.8]);
        let fk = chain.fk(&q).unwrap();
        // Put a sphere exactly tangent to the second link's capsule.
        let (p0, p1, r) = match chain.link_bodies[2][0].transformed(&fk.frames[2]) {
            Shape::Capsule { p0, p1, radius } => (p0, p1, radius),
            _ => unreachable!(),
        };
        let mid = (p0 + p1) * 0.5;
        let normal = Vector3::z();
        let obstacle_r = 0.05;
        for (gap, expect) in [(0.0, true), (1e-6, false)] {
            let c = mid + normal * (r + obstacle_r + gap);
            let scene = [Obstacle::new(1, Shape::Sphere { center: c, radius: obstacle_r })];
            let oracle = chain
                .world_bodies(&fk)
                .iter()
                .any(|(_, b)| scene.iter().any(|o| b.intersects(&o.shape)));
            assert_eq!(chain.collide_config(&q, &scene, &[]).unwrap(), expect);
            assert_eq!(oracle, expect);
        }
    }

    #[test]
    fn attached_object_equals_explicit_composite() {
        let chain = robots::spatial_7r();
        let object = Shape::aabb([-0.03, -0.03, -0.03], [0.03, 0.03, 0.09]);
        let attached = chain.with_attached(&[object]);
        let mut explicit = chain.clone();
        explicit.ee_body.push(object);
        let scene = vec![
            Obstacle::new(1, Shape::aabb([0.3, -0.5, -0.05], [1.0, 0.5, 0.0])),
            Obstacle::new(7, Shape::sphere([0.5, 0.0, 0.4], 0.05)),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let q = chain.sample_config(&mut rng);
            assert_eq!(
                attached.collide_config(&q, &scene, &[7]).unwrap(),
                explicit.collide_config(&q, &scene[..1], &[]).unwrap()
            );
        }
    }

    #[test]
    fn bundled_chains_validate_and_hash_stably() {
        for chain in [robots::planar_2r(), robots::planar_3r(), robots::spatial_7r()] {
            chain.validate().unwrap();
            assert_eq!(chain.spec_hash(), chain.clone().spec_hash());
            assert_eq!(chain.spec_hash().len(), 64);
        }
        assert_ne!(robots::planar_2r().spec_hash(), robots::planar_3r().spec_hash());
    }
}
