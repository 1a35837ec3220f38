use nalgebra::{Quaternion, Unit, UnitQuaternion, Vector3};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Rigid transform in SE(3): a translation followed by a unit-quaternion rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub translation: Vector3<f64>,
    pub rotation: UnitQuaternion<f64>,
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

impl Pose {
    pub fn new(translation: Vector3<f64>, rotation: UnitQuaternion<f64>) -> Self {
        Self {
            translation,
            rotation,
        }
    }

    pub fn identity() -> Self {
        Self::new(Vector3::zeros(), UnitQuaternion::identity())
    }

    pub fn from_translation(x: f64, y: f64, z: f64) -> Self {
        Self::new(Vector3::new(x, y, z), UnitQuaternion::identity())
    }

    pub fn from_rotation(rotation: UnitQuaternion<f64>) -> Self {
        Self::new(Vector3::zeros(), rotation)
    }

    /// Pure rotation of `angle` radians about `axis` (need not be normalized).
    pub fn from_axis_angle(axis: Vector3<f64>, angle: f64) -> Self {
        Self::from_rotation(UnitQuaternion::from_axis_angle(
            &Unit::new_normalize(axis),
            angle,
        ))
    }

    pub fn rot_z(angle: f64) -> Self {
        Self::from_axis_angle(Vector3::z(), angle)
    }

    /// Builds a pose from a raw `[w, x, y, z]` quaternion, normalizing it.
    pub fn from_parts(t: [f64; 3], q: [f64; 4]) -> Result<Self> {
        let quat = Quaternion::new(q[0], q[1], q[2], q[3]);
        let norm = quat.norm();
        if !norm.is_finite() || norm < 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "quaternion {q:?} cannot be normalized"
            )));
        }
        if t.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "translation {t:?} is not finite"
            )));
        }
        Ok(Self::new(
            Vector3::new(t[0], t[1], t[2]),
            UnitQuaternion::from_quaternion(quat),
        ))
    }

    /// `self ∘ other`: applies `other` first, then `self`.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            translation: self.translation + self.rotation * other.translation,
            rotation: renormalize(self.rotation * other.rotation),
        }
    }

    pub fn inverse(&self) -> Pose {
        let inv = self.rotation.inverse();
        Pose {
            translation: -(inv * self.translation),
            rotation: inv,
        }
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    pub fn transform_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * v
    }

    /// Twist-like error `target ⊖ self`: translation difference stacked with the
    /// rotation vector of `target.rotation * self.rotation⁻¹`, both in world frame.
    pub fn error_to(&self, target: &Pose) -> [f64; 6] {
        let dt = target.translation - self.translation;
        let dr = (target.rotation * self.rotation.inverse()).scaled_axis();
        [dt.x, dt.y, dt.z, dr.x, dr.y, dr.z]
    }

    /// Rotation angle (radians, in `[0, π]`) between the two orientations.
    pub fn angle_to(&self, other: &Pose) -> f64 {
        self.rotation.angle_to(&other.rotation)
    }

    pub fn quaternion_wxyz(&self) -> [f64; 4] {
        let q = self.rotation.quaternion();
        [q.w, q.i, q.j, q.k]
    }
}

pub(crate) fn renormalize(q: UnitQuaternion<f64>) -> UnitQuaternion<f64> {
    UnitQuaternion::new_normalize(q.into_inner())
}

/// Interpolates between two poses: translations linearly, rotations by shortest-arc slerp.
///
/// `t` must lie in `[0, 1]`; `t = 0` returns `a` and `t = 1` returns `b` exactly.
pub fn pose_interpolate(a: &Pose, b: &Pose, t: f64) -> Result<Pose> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::FractionOutOfRange(t));
    }
    if t == 0.0 {
        return Ok(*a);
    }
    if t == 1.0 {
        return Ok(*b);
    }
    let translation = a.translation + (b.translation - a.translation) * t;
    Ok(Pose::new(translation, slerp(&a.rotation, &b.rotation, t)))
}

fn slerp(a: &UnitQuaternion<f64>, b: &UnitQuaternion<f64>, t: f64) -> UnitQuaternion<f64> {
    let qa = a.quaternion();
    let mut qb = *b.quaternion();
    let mut dot = qa.dot(&qb);
    if dot < 0.0 {
        qb = -qb;
        dot = -dot;
    }
    let blended = if dot > 1.0 - 1e-12 {
        qa * (1.0 - t) + qb * t
    } else {
        let theta = dot.min(1.0).acos();
        let s = theta.sin();
        qa * (((1.0 - t) * theta).sin() / s) + qb * ((t * theta).sin() / s)
    };
    UnitQuaternion::new_normalize(blended)
}

#[derive(Serialize, Deserialize)]
struct PoseRepr {
    t: [f64; 3],
    q: [f64; 4],
}

impl Serialize for Pose {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PoseRepr {
            t: [self.translation.x, self.translation.y, self.translation.z],
            q: self.quaternion_wxyz(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Pose {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = PoseRepr::deserialize(deserializer)?;
        Pose::from_parts(repr.t, repr.q).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn quat_norm(p: &Pose) -> f64 {
        p.rotation.quaternion().norm()
    }

    #[test]
    fn interpolate_equal_endpoints() {
        let a = Pose::new(
            Vector3::new(0.3, -0.2, 1.0),
            UnitQuaternion::from_euler_angles(0.1, 0.2, 0.3),
        );
        let m = pose_interpolate(&a, &a, 0.5).unwrap();
        assert_relative_eq!(m.translation, a.translation, epsilon = 1e-15);
        assert!(m.rotation.angle_to(&a.rotation) < 1e-9);
    }

    #[test]
    fn interpolate_translation_midpoint() {
        let m = pose_interpolate(&Pose::identity(), &Pose::from_translation(1.0, 0.0, 0.0), 0.5)
            .unwrap();
        assert_relative_eq!(m.translation, Vector3::new(0.5, 0.0, 0.0), epsilon = 1e-15);
        assert!(m.rotation.angle() < 1e-12);
    }

    #[test]
    fn interpolate_rotation_matches_axis_angle() {
        // Oracle: half of a 90° turn about z is a 45° turn about z.
        let m = pose_interpolate(&Pose::identity(), &Pose::rot_z(FRAC_PI_2), 0.5).unwrap();
        let expected = UnitQuaternion::from_axis_angle(&Vector3::z_axis(), FRAC_PI_2 / 2.0);
        assert!(m.rotation.angle_to(&expected) < 1e-12);
        assert!((quat_norm(&m) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn interpolate_takes_short_arc_across_double_cover() {
        let a = Pose::identity();
        let b = Pose::from_rotation(UnitQuaternion::new_unchecked(-Pose::rot_z(0.4).rotation.into_inner()));
        let m = pose_interpolate(&a, &b, 0.5).unwrap();
        assert_relative_eq!(m.rotation.angle(), 0.2, epsilon = 1e-12);
    }

    #[test]
    fn interpolate_rejects_fraction_outside_unit_interval() {
        let a = Pose::identity();
        assert!(pose_interpolate(&a, &a, -0.1).is_err());
        assert!(pose_interpolate(&a, &a, 1.5).is_err());
        assert!(pose_interpolate(&a, &a, f64::NAN).is_err());
    }

    #[test]
    fn endpoints_are_exact() {
        let a = Pose::new(Vector3::new(1.0, 2.0, 3.0), UnitQuaternion::from_euler_angles(0.5, 0.0, 1.0));
        let b = Pose::new(Vector3::new(-1.0, 0.0, 0.5), UnitQuaternion::from_euler_angles(-0.5, 1.0, 0.0));
        assert_eq!(pose_interpolate(&a, &b, 0.0).unwrap(), a);
        assert_eq!(pose_interpolate(&a, &b, 1.0).unwrap(), b);
    }

    #[test]
    fn json_schema() {
        let p = Pose::from_translation(1.0, 2.0, 3.0);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"t":[1.0,2.0,3.0],"q":[1.0,0.0,0.0,0.0]}"#);
        let back: Pose = serde_json::from_str(r#"{"t":[0,0,0],"q":[2,0,0,0]}"#).unwrap();
        assert!((quat_norm(&back) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn error_to_is_translation_then_rotation_vector() {
        let a = Pose::identity();
        let b = Pose::new(Vector3::new(0.1, 0.0, 0.0), Pose::rot_z(0.3).rotation);
        let e = a.error_to(&b);
        assert_relative_eq!(e[0], 0.1, epsilon = 1e-15);
        assert_relative_eq!(e[5], 0.3, epsilon = 1e-12);
    }
}
