//! Exact nearest-neighbour queries under DISP.
//!
//! The image of the hull centroid is the mean of the hull point images, so the distance
//! between two centroid images never exceeds DISP. A kd-tree over centroid images gives
//! a lower bound per box, and a best-first descent returns exact DISP neighbours.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::Vector3;

use crate::geometry::{HullPoints, Pose};

const LEAF_SIZE: usize = 12;
/// Absorbs rounding in the centroid bound.
const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Node {
    lo: Vector3<f64>,
    hi: Vector3<f64>,
    /// Range into `order` for leaves; child node ids otherwise.
    kind: NodeKind,
}

#[derive(Debug, Clone)]
enum NodeKind {
    Leaf { start: usize, end: usize },
    Split { left: usize, right: usize },
}

/// Neighbour candidate ordered by distance, then by id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub id: usize,
    pub distance: f64,
}

impl Eq for Neighbor {}

impl Ord for Neighbor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.id.cmp(&other.id))
    }
}

impl PartialOrd for Neighbor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Static index over a set of end-effector poses.
#[derive(Debug, Clone)]
pub struct PoseIndex {
    hull: HullPoints,
    /// Hull point images, `hull.points().len()` per pose.
    world: Vec<Vector3<f64>>,
    centroids: Vec<Vector3<f64>>,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl PoseIndex {
    pub fn new(hull: &HullPoints, poses: &[Pose]) -> Self {
        let m = hull.points().len();
        let mut world = Vec::with_capacity(poses.len() * m);
        let mut centroids = Vec::with_capacity(poses.len());
        for pose in poses {
            world.extend(hull.points().iter().map(|p| pose.transform_point(p)));
            centroids.push(pose.transform_point(&hull.centroid()));
        }
        let mut index = Self {
            hull: hull.clone(),
            world,
            centroids,
            order: (0..poses.len()).collect(),
            nodes: Vec::new(),
        };
        if !poses.is_empty() {
            index.build(0, poses.len());
        }
        index
    }

    pub fn len(&self) -> usize {
        self.centroids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centroids.is_empty()
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let (mut lo, mut hi) = (Vector3::repeat(f64::INFINITY), Vector3::repeat(f64::NEG_INFINITY));
        for &i in &self.order[start..end] {
            lo = lo.inf(&self.centroids[i]);
            hi = hi.sup(&self.centroids[i]);
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            lo,
            hi,
            kind: NodeKind::Leaf { start, end },
        });
        if end - start > LEAF_SIZE {
            let axis = (hi - lo).imax();
            let mid = start + (end - start) / 2;
            let centroids = &self.centroids;
            self.order[start..end].select_nth_unstable_by(mid - start, |a, b| {
                centroids[*a][axis]
                    .total_cmp(&centroids[*b][axis])
                    .then(a.cmp(b))
            });
            let left = self.build(start, mid);
            let right = self.build(mid, end);
            self.nodes[id].kind = NodeKind::Split { left, right };
        }
        id
    }

    fn images(&self, pose: &Pose) -> (Vec<Vector3<f64>>, Vector3<f64>) {
        let pts = self.hull.points().iter().map(|p| pose.transform_point(p)).collect();
        (pts, pose.transform_point(&self.hull.centroid()))
    }

    fn disp_to(&self, images: &[Vector3<f64>], id: usize) -> f64 {
        let m = images.len();
        images
            .iter()
            .zip(&self.world[id * m..(id + 1) * m])
            .map(|(a, b)| (a - b).norm_squared())
            .fold(0.0, f64::max)
            .sqrt()
    }

    /// DISP between an arbitrary pose and an indexed pose.
    pub fn distance(&self, pose: &Pose, id: usize) -> f64 {
        self.disp_to(&self.images(pose).0, id)
    }

    fn box_bound(node: &Node, c: &Vector3<f64>) -> f64 {
        let below = (node.lo - c).sup(&Vector3::zeros());
        let above = (c - node.hi).sup(&Vector3::zeros());
        (below + above).norm()
    }

    /// The `k` indexed poses nearest to `pose` under DISP, sorted by (distance, id),
    /// skipping ids for which `skip` returns true.
    pub fn knn(&self, pose: &Pose, k: usize, skip: impl Fn(usize) -> bool) -> Vec<Neighbor> {
        if k == 0 || self.is_empty() {
            return Vec::new();
        }
        let (images, c) = self.images(pose);
        let mut best: BinaryHeap<Neighbor> = BinaryHeap::with_capacity(k + 1);
        let mut frontier = BinaryHeap::new();
        frontier.push(std::cmp::Reverse(Neighbor {
            id: 0,
            distance: Self::box_bound(&self.nodes[0], &c),
        }));
        while let Some(std::cmp::Reverse(Neighbor { id: node, distance: bound })) = frontier.pop() {
            if bound - BOUND_SLACK > worst(&best, k) {
                break;
            }
            match self.nodes[node].kind {
                NodeKind::Leaf { start, end } => {
                    for &i in &self.order[start..end] {
                        if skip(i) || (c - self.centroids[i]).norm() - BOUND_SLACK > worst(&best, k) {
                            continue;
                        }
                        let cand = Neighbor {
                            id: i,
                            distance: self.disp_to(&images, i),
                        };
                        if best.len() < k {
                            best.push(cand);
                        } else if cand < *best.peek().expect("non-empty") {
                            best.pop();
                            best.push(cand);
                        }
                    }
                }
                NodeKind::Split { left, right } => {
                    for child in [left, right] {
                        let b = Self::box_bound(&self.nodes[child], &c);
                        if b - BOUND_SLACK <= worst(&best, k) {
                            frontier.push(std::cmp::Reverse(Neighbor { id: child, distance: b }));
                        }
                    }
                }
            }
        }
        best.into_sorted_vec()
    }

    /// Reference linear scan with the same ordering as [`PoseIndex::knn`].
    pub fn knn_linear(&self, pose: &Pose, k: usize, skip: impl Fn(usize) -> bool) -> Vec<Neighbor> {
        let (images, _) = self.images(pose);
        let mut all: Vec<Neighbor> = (0..self.len())
            .filter(|i| !skip(*i))
            .map(|i| Neighbor {
                id: i,
                distance: self.disp_to(&images, i),
            })
            .collect();
        all.sort();
        all.truncate(k);
        all
    }
}

fn worst(best: &BinaryHeap<Neighbor>, k: usize) -> f64 {
    if best.len() < k {
        f64::INFINITY
    } else {
        best.peek().expect("non-empty").distance
    }
}
