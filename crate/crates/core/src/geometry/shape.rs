//! Primitive collision shapes and their pairwise intersection tests.
//!
//! All tests treat shapes as closed sets: touching counts as intersecting.

use std::f64::consts::PI;

use nalgebra::{Matrix3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use super::pose::Pose;
use crate::error::Error;

/// Separation at or below this value counts as contact.
pub const CONTACT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ShapeRepr", into = "ShapeRepr")]
pub enum Shape {
    Sphere {
        center: Vector3<f64>,
        radius: f64,
    },
    Capsule {
        p0: Vector3<f64>,
        p1: Vector3<f64>,
        radius: f64,
    },
    /// Oriented box: `pose` places the box center and axes, `half_extents` are along the box axes.
    Cuboid {
        pose: Pose,
        half_extents: Vector3<f64>,
    },
}

impl Shape {
    pub fn sphere(center: [f64; 3], radius: f64) -> Self {
        Shape::Sphere {
            center: center.into(),
            radius,
        }
    }

    pub fn capsule(p0: [f64; 3], p1: [f64; 3], radius: f64) -> Self {
        Shape::Capsule {
            p0: p0.into(),
            p1: p1.into(),
            radius,
        }
    }

    /// Axis-aligned box from its min and max corners.
    pub fn aabb(min: [f64; 3], max: [f64; 3]) -> Self {
        let min = Vector3::from(min);
        let max = Vector3::from(max);
        Shape::Cuboid {
            pose: Pose::new((min + max) * 0.5, UnitQuaternion::identity()),
            half_extents: (max - min) * 0.5,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let ok = match self {
            Shape::Sphere { center, radius } => *radius > 0.0 && finite(center),
            Shape::Capsule { p0, p1, radius } => *radius > 0.0 && finite(p0) && finite(p1),
            Shape::Cuboid { pose, half_extents } => {
                half_extents.iter().all(|h| *h > 0.0) && finite(&pose.translation)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidShape(format!("{self:?}")))
        }
    }

    pub fn transformed(&self, by: &Pose) -> Shape {
        match *self {
            Shape::Sphere { center, radius } => Shape::Sphere {
                center: by.transform_point(&center),
                radius,
            },
            Shape::Capsule { p0, p1, radius } => Shape::Capsule {
                p0: by.transform_point(&p0),
                p1: by.transform_point(&p1),
                radius,
            },
            Shape::Cuboid { pose, half_extents } => Shape::Cuboid {
                pose: by.compose(&pose),
                half_extents,
            },
        }
    }

    /// Grows the shape outward by `margin` (boxes grow along each face).
    pub fn inflated(&self, margin: f64) -> Shape {
        match *self {
            Shape::Sphere { center, radius } => Shape::Sphere {
                center,
                radius: radius + margin,
            },
            Shape::Capsule { p0, p1, radius } => Shape::Capsule {
                p0,
                p1,
                radius: radius + margin,
            },
            Shape::Cuboid { pose, half_extents } => Shape::Cuboid {
                pose,
                half_extents: half_extents.add_scalar(margin),
            },
        }
    }

    pub fn volume(&self) -> f64 {
        match *self {
            Shape::Sphere { radius, .. } => 4.0 / 3.0 * PI * radius.powi(3),
            Shape::Capsule { p0, p1, radius } => {
                PI * radius * radius * (p1 - p0).norm() + 4.0 / 3.0 * PI * radius.powi(3)
            }
            Shape::Cuboid { half_extents, .. } => 8.0 * half_extents.x * half_extents.y * half_extents.z,
        }
    }

    /// Center and radius of a sphere enclosing the shape.
    pub fn bounding_sphere(&self) -> (Vector3<f64>, f64) {
        match *self {
            Shape::Sphere { center, radius } => (center, radius),
            Shape::Capsule { p0, p1, radius } => ((p0 + p1) * 0.5, (p1 - p0).norm() * 0.5 + radius),
            Shape::Cuboid { pose, half_extents } => (pose.translation, half_extents.norm()),
        }
    }

    /// Closed-set intersection test.
    pub fn intersects(&self, other: &Shape) -> bool {
        let (ca, ra) = self.bounding_sphere();
        let (cb, rb) = other.bounding_sphere();
        if (ca - cb).norm() > ra + rb + CONTACT_EPS {
            return false;
        }
        use Shape::*;
        match (self, other) {
            (Sphere { center: a, radius: r1 }, Sphere { center: b, radius: r2 }) => {
                (a - b).norm() <= r1 + r2 + CONTACT_EPS
            }
            (Sphere { center, radius: rs }, Capsule { p0, p1, radius: rc })
            | (Capsule { p0, p1, radius: rc }, Sphere { center, radius: rs }) => {
                point_segment_distance(center, p0, p1) <= rs + rc + CONTACT_EPS
            }
            (Capsule { p0: a0, p1: a1, radius: r1 }, Capsule { p0: b0, p1: b1, radius: r2 }) => {
                segment_segment_distance(a0, a1, b0, b1) <= r1 + r2 + CONTACT_EPS
            }
            (Sphere { center, radius }, Cuboid { pose, half_extents })
            | (Cuboid { pose, half_extents }, Sphere { center, radius }) => {
                point_box_distance(center, pose, half_extents) <= radius + CONTACT_EPS
            }
            (Capsule { p0, p1, radius }, Cuboid { pose, half_extents })
            | (Cuboid { pose, half_extents }, Capsule { p0, p1, radius }) => {
                segment_box_distance(p0, p1, pose, half_extents) <= radius + CONTACT_EPS
            }
            (Cuboid { pose: pa, half_extents: ha }, Cuboid { pose: pb, half_extents: hb }) => {
                boxes_overlap(pa, ha, pb, hb)
            }
        }
    }
}

fn finite(v: &Vector3<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

pub fn point_segment_distance(p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + ab * t)).norm()
}

/// Closest distance between segments `[p1, q1]` and `[p2, q2]`.
pub fn segment_segment_distance(
    p1: &Vector3<f64>,
    q1: &Vector3<f64>,
    p2: &Vector3<f64>,
    q2: &Vector3<f64>,
) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    const TINY: f64 = 1e-18;
    let (s, t);
    if a <= TINY && e <= TINY {
        return r.norm();
    }
    if a <= TINY {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= TINY {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > TINY * a * e {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    ((p1 + d1 * s) - (p2 + d2 * t)).norm()
}

pub fn point_box_distance(p: &Vector3<f64>, pose: &Pose, half: &Vector3<f64>) -> f64 {
    let local = pose.rotation.inverse() * (p - pose.translation);
    let mut sq = 0.0;
    for k in 0..3 {
        let excess = (local[k].abs() - half[k]).max(0.0);
        sq += excess * excess;
    }
    sq.sqrt()
}

/// Exact closest distance between a segment and an oriented box.
///
/// In box coordinates the squared distance along the segment is piecewise quadratic
/// in the segment parameter, with breaks where a coordinate crosses a face plane.
pub fn segment_box_distance(
    p0: &Vector3<f64>,
    p1: &Vector3<f64>,
    pose: &Pose,
    half: &Vector3<f64>,
) -> f64 {
    let inv = pose.rotation.inverse();
    let a = inv * (p0 - pose.translation);
    let d = inv * (p1 - p0);
    let sq_at = |t: f64| {
        let mut s = 0.0;
        for k in 0..3 {
            let x = a[k] + d[k] * t;
            let e = (x.abs() - half[k]).max(0.0);
            s += e * e;
        }
        s
    };

    let mut breaks = vec![0.0, 1.0];
    for k in 0..3 {
        if d[k] != 0.0 {
            for bound in [-half[k], half[k]] {
                let t = (bound - a[k]) / d[k];
                if t > 0.0 && t < 1.0 {
                    breaks.push(t);
                }
            }
        }
    }
    breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let mut best = sq_at(0.0).min(sq_at(1.0));
    for w in breaks.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        best = best.min(sq_at(t0));
        if t1 <= t0 {
            continue;
        }
        // Quadratic a2 t^2 + a1 t + const on this interval.
        let mid = 0.5 * (t0 + t1);
        let (mut a2, mut a1) = (0.0, 0.0);
        for k in 0..3 {
            let x = a[k] + d[k] * mid;
            let offset = if x > half[k] {
                a[k] - half[k]
            } else if x < -half[k] {
                a[k] + half[k]
            } else {
                continue;
            };
            a2 += d[k] * d[k];
            a1 += 2.0 * d[k] * offset;
        }
        if a2 > 0.0 {
            let t = -a1 / (2.0 * a2);
            if t > t0 && t < t1 {
                best = best.min(sq_at(t));
            }
        }
    }
    best.sqrt()
}

/// Separating-axis test for two oriented boxes (touching counts as overlap).
fn boxes_overlap(pa: &Pose, ha: &Vector3<f64>, pb: &Pose, hb: &Vector3<f64>) -> bool {
    let ra_m: Matrix3<f64> = pa.rotation.to_rotation_matrix().into_inner();
    let rb_m: Matrix3<f64> = pb.rotation.to_rotation_matrix().into_inner();
    let r = ra_m.transpose() * rb_m;
    let t = ra_m.transpose() * (pb.translation - pa.translation);
    let abs_r = r.map(|v| v.abs() + 1e-12);

    for i in 0..3 {
        let ra = ha[i];
        let rb = hb[0] * abs_r[(i, 0)] + hb[1] * abs_r[(i, 1)] + hb[2] * abs_r[(i, 2)];
        if t[i].abs() > ra + rb + CONTACT_EPS {
            return false;
        }
    }
    for j in 0..3 {
        let ra = ha[0] * abs_r[(0, j)] + ha[1] * abs_r[(1, j)] + ha[2] * abs_r[(2, j)];
        let rb = hb[j];
        let proj = t[0] * r[(0, j)] + t[1] * r[(1, j)] + t[2] * r[(2, j)];
        if proj.abs() > ra + rb + CONTACT_EPS {
            return false;
        }
    }
    for i in 0..3 {
        let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
        for j in 0..3 {
            let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
            let ra = ha[i1] * abs_r[(i2, j)] + ha[i2] * abs_r[(i1, j)];
            let rb = hb[j1] * abs_r[(i, j2)] + hb[j2] * abs_r[(i, j1)];
            let proj = t[i2] * r[(i1, j)] - t[i1] * r[(i2, j)];
            if proj.abs() > ra + rb + CONTACT_EPS {
                return false;
            }
        }
    }
    true
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum ShapeRepr {
    Sphere {
        center: [f64; 3],
        radius: f64,
    },
    Capsule {
        p0: [f64; 3],
        p1: [f64; 3],
        radius: f64,
    },
    #[serde(rename = "box")]
    Aabb {
        min: [f64; 3],
        max: [f64; 3],
    },
    Obb {
        pose: Pose,
        half_extents: [f64; 3],
    },
}

impl TryFrom<ShapeRepr> for Shape {
    type Error = Error;

    fn try_from(repr: ShapeRepr) -> Result<Self, Error> {
        let shape = match repr {
            ShapeRepr::Sphere { center, radius } => Shape::sphere(center, radius),
            ShapeRepr::Capsule { p0, p1, radius } => Shape::capsule(p0, p1, radius),
            ShapeRepr::Aabb { min, max } => {
                if (0..3).any(|k| min[k] >= max[k]) {
                    return Err(Error::InvalidShape(format!(
                        "box min {min:?} must be below max {max:?}"
                    )));
                }
                Shape::aabb(min, max)
            }
            ShapeRepr::Obb { pose, half_extents } => Shape::Cuboid {
                pose,
                half_extents: half_extents.into(),
            },
        };
        shape.validate()?;
        Ok(shape)
    }
}

impl From<Shape> for ShapeRepr {
    fn from(shape: Shape) -> Self {
        match shape {
            Shape::Sphere { center, radius } => ShapeRepr::Sphere {
                center: center.into(),
                radius,
            },
            Shape::Capsule { p0, p1, radius } => ShapeRepr::Capsule {
                p0: p0.into(),
                p1: p1.into(),
                radius,
            },
            Shape::Cuboid { pose, half_extents } => ShapeRepr::Obb {
                pose,
                half_extents: half_extents.into(),
            },
        }
    }
}
