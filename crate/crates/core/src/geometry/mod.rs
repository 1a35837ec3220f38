//! Poses, the DISP distance between end-effector poses, and primitive collision checks.

mod pose;
mod shape;

pub use pose::{pose_interpolate, Pose};
pub use shape::{
    point_box_distance, point_segment_distance, segment_box_distance, segment_segment_distance,
    Shape, CONTACT_EPS,
};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points of the end effector's convex hull, in the end-effector frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 3]>", into = "Vec<[f64; 3]>")]
pub struct HullPoints {
    points: Vec<Vector3<f64>>,
    radius: f64,
    centroid: Vector3<f64>,
}

impl HullPoints {
    pub fn new(points: Vec<Vector3<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyHull);
        }
        let radius = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
        let centroid = points.iter().sum::<Vector3<f64>>() / points.len() as f64;
        Ok(Self {
            points,
            radius,
            centroid,
        })
    }

    /// Corners of the box `[-hx, hx] × [-hy, hy] × [-hz, hz]`.
    pub fn box_corners(hx: f64, hy: f64, hz: f64) -> Self {
        let mut pts = Vec::with_capacity(8);
        for sx in [-1.0, 1.0] {
            for sy in [-1.0, 1.0] {
                for sz in [-1.0, 1.0] {
                    pts.push(Vector3::new(sx * hx, sy * hy, sz * hz));
                }
            }
        }
        Self::new(pts).expect("eight corners")
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    /// Largest distance of a hull point from the end-effector origin.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Mean of the hull points; it lies inside the convex hull, so the distance between
    /// its images under two poses lower-bounds their DISP distance.
    pub fn centroid(&self) -> Vector3<f64> {
        self.centroid
    }
}

impl TryFrom<Vec<[f64; 3]>> for HullPoints {
    type Error = Error;
    fn try_from(v: Vec<[f64; 3]>) -> Result<Self> {
        Self::new(v.into_iter().map(Vector3::from).collect())
    }
}

impl From<HullPoints> for Vec<[f64; 3]> {
    fn from(h: HullPoints) -> Self {
        h.points.into_iter().map(Into::into).collect()
    }
}

/// DISP: the largest displacement of any hull point between poses `a` and `b`.
pub fn disp_distance(hull: &HullPoints, a: &Pose, b: &Pose) -> f64 {
    let mut best = 0.0f64;
    for p in &hull.points {
        let d = a.transform_point(p) - b.transform_point(p);
        best = best.max(d.norm_squared());
    }
    best.sqrt()
}

/// Checked variant of [`disp_distance`] for hulls built without validation.
pub fn try_disp_distance(points: &[Vector3<f64>], a: &Pose, b: &Pose) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyHull);
    }
    Ok(points
        .iter()
        .map(|p| (a.transform_point(p) - b.transform_point(p)).norm_squared())
        .fold(0.0, f64::max)
        .sqrt())
}

/// Sum of DISP distances between consecutive poses.
pub fn path_cost(hull: &HullPoints, poses: &[Pose]) -> Result<f64> {
    if poses.is_empty() {
        return Err(Error::EmptyPath);
    }
    Ok(poses
        .windows(2)
        .map(|w| disp_distance(hull, &w[0], &w[1]))
        .sum())
}

/// A static obstacle (or the target object) in a scene.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub id: u32,
    pub shape: Shape,
}

impl Obstacle {
    pub fn new(id: u32, shape: Shape) -> Self {
        Self { id, shape }
    }
}

/// True iff any end-effector shape placed at `e` touches any scene obstacle.
pub fn collide_pose(ee_body: &[Shape], e: &Pose, scene: &[Obstacle]) -> bool {
    ee_body.iter().any(|s| {
        let placed = s.transformed(e);
        scene.iter().any(|o| placed.intersects(&o.shape))
    })
}

/// An SE(3) interpolation between two poses, stored as its waypoints.
#[derive(Debug, Clone, PartialEq)]
pub struct SE3Segment {
    pub start: Pose,
    pub end: Pose,
    pub waypoints: Vec<Pose>,
}

impl SE3Segment {
    /// Splits `start → end` into `pieces ≥ 1` equal parameter steps.
    pub fn uniform(start: Pose, end: Pose, pieces: usize) -> Self {
        let pieces = pieces.max(1);
        let mut waypoints = Vec::with_capacity(pieces + 1);
        waypoints.push(start);
        for i in 1..pieces {
            let t = i as f64 / pieces as f64;
            waypoints.push(pose_interpolate(&start, &end, t).expect("t in (0,1)"));
        }
        waypoints.push(end);
        Self {
            start,
            end,
            waypoints,
        }
    }

    /// Number of pieces needed so consecutive waypoints are at most `resolution` apart in DISP.
    ///
    /// Every hull point travels an arc no longer than `|Δt| + θ·radius` under the
    /// constant-rate interpolation, which bounds every chord.
    pub fn pieces_for(hull: &HullPoints, start: &Pose, end: &Pose, resolution: f64) -> usize {
        let arc = (end.translation - start.translation).norm() + start.angle_to(end) * hull.radius();
        if arc <= 0.0 || resolution <= 0.0 {
            return 1;
        }
        ((arc / resolution).ceil() as usize).max(1)
    }

    pub fn with_resolution(hull: &HullPoints, start: Pose, end: Pose, resolution: f64) -> Self {
        Self::uniform(start, end, Self::pieces_for(hull, &start, &end, resolution))
    }

    pub fn cost(&self, hull: &HullPoints) -> f64 {
        path_cost(hull, &self.waypoints).expect("segments have waypoints")
    }

    pub fn reversed(&self) -> Self {
        let mut waypoints = self.waypoints.clone();
        waypoints.reverse();
        Self {
            start: self.end,
            end: self.start,
            waypoints,
        }
    }
}

/// Number of colliding waypoints along `seg`, skipping the first waypoint so that
/// concatenated segments count each shared pose once.
pub fn segment_collision_count(ee_body: &[Shape], seg: &SE3Segment, scene: &[Obstacle]) -> usize {
    seg.waypoints
        .iter()
        .skip(1)
        .filter(|w| collide_pose(ee_body, w, scene))
        .count()
}
