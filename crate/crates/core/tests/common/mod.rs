#![allow(dead_code)]

use jist::geometry::{segment_collision_count, HullPoints, Obstacle, Pose, SE3Segment, Shape};
use jist::kinematics::{JointConfig, KinematicChain};
use jist::roadmap::{PoseGraph, RoadmapEdge};
use nalgebra::{UnitQuaternion, Vector3};
use rand::Rng;

pub fn random_pose<R: Rng>(rng: &mut R, extent: f64) -> Pose {
    let t = Vector3::new(
        rng.gen_range(-extent..extent),
        rng.gen_range(-extent..extent),
        rng.gen_range(-extent..extent),
    );
    let axis = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let angle = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    Pose::new(t, UnitQuaternion::from_scaled_axis(axis.normalize() * angle))
}

/// Largest elementwise gap between the analytic Jacobian and central differences.
pub fn fd_jacobian_error(chain: &KinematicChain, q: &JointConfig, h: f64) -> f64 {
    let j = chain.jacobian(q).unwrap().0;
    let mut worst: f64 = 0.0;
    for i in 0..chain.dof() {
        let mut plus = q.clone();
        let mut minus = q.clone();
        plus.0[i] += h;
        minus.0[i] -= h;
        let a = chain.fk_pose(&plus).unwrap();
        let b = chain.fk_pose(&minus).unwrap();
        let lin = (a.translation - b.translation) / (2.0 * h);
        let ang = (a.rotation * b.rotation.inverse()).scaled_axis() / (2.0 * h);
        for r in 0..3 {
            worst = worst.max((j[(r, i)] - lin[r]).abs());
            worst = worst.max((j[(r + 3, i)] - ang[r]).abs());
        }
    }
    worst
}

/// A small explicit pose graph.
pub struct TestGraph {
    pub hull: HullPoints,
    pub poses: Vec<Pose>,
    pub adjacency: Vec<Vec<RoadmapEdge>>,
}

impl TestGraph {
    pub fn new(hull: HullPoints, poses: Vec<Pose>) -> Self {
        let n = poses.len();
        Self {
            hull,
            poses,
            adjacency: vec![Vec::new(); n],
        }
    }

    pub fn connect(&mut self, u: usize, v: usize, pieces: u32) {
        if u == v || self.adjacency[u].iter().any(|e| e.to == v) {
            return;
        }
        let (a, b) = (u.min(v), u.max(v));
        let cost = SE3Segment::uniform(self.poses[a], self.poses[b], pieces as usize).cost(&self.hull);
        self.adjacency[u].push(RoadmapEdge { to: v, pieces, cost });
        self.adjacency[v].push(RoadmapEdge { to: u, pieces, cost });
    }
}

impl PoseGraph for TestGraph {
    fn hull(&self) -> &HullPoints {
        &self.hull
    }
    fn vertex_count(&self) -> usize {
        self.poses.len()
    }
    fn pose(&self, v: usize) -> &Pose {
        &self.poses[v]
    }
    fn edges(&self, v: usize) -> Vec<RoadmapEdge> {
        self.adjacency[v].clone()
    }
}

pub struct SearchInstance {
    pub graph: TestGraph,
    pub start: usize,
    pub goals: Vec<usize>,
    pub scene: Vec<Obstacle>,
    pub ee_body: Vec<Shape>,
}

/// A random graph of at most 30 vertices with a random sphere field.
pub fn random_search_instance<R: Rng>(rng: &mut R) -> SearchInstance {
    let n = rng.gen_range(5..=30);
    let poses = (0..n).map(|_| random_pose(rng, 0.5)).collect();
    let mut graph = TestGraph::new(HullPoints::box_corners(0.03, 0.02, 0.05), poses);
    for u in 0..n {
        for _ in 0..rng.gen_range(1..4) {
            let v = rng.gen_range(0..n);
            let pieces = rng.gen_range(1..8);
            graph.connect(u, v, pieces);
        }
    }
    let scene = (0..rng.gen_range(0..6))
        .map(|i| {
            let c = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
            Obstacle::new(i, Shape::sphere(c, rng.gen_range(0.05..0.25)))
        })
        .collect();
    let start = rng.gen_range(0..n);
    let goals = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..n)).collect();
    SearchInstance {
        graph,
        start,
        goals,
        scene,
        ee_body: vec![Shape::sphere([0.0, 0.0, 0.0], 0.03)],
    }
}

/// Optimal `(f1, g2)` labels from the goal set under lexicographic order, by plain
/// Dijkstra with a linear scan for the minimum.
pub fn lexicographic_dijkstra(inst: &SearchInstance) -> Vec<Option<(u32, f64)>> {
    let g = &inst.graph;
    let n = g.vertex_count();
    let mut label: Vec<Option<(u32, f64)>> = vec![None; n];
    let mut done = vec![false; n];
    for &s in &inst.goals {
        label[s] = Some((0, 0.0));
    }
    loop {
        let mut pick: Option<usize> = None;
        for v in 0..n {
            if done[v] {
                continue;
            }
            let Some(l) = label[v] else { continue };
            if pick.is_none_or(|p| {
                let lp = label[p].unwrap();
                (l.0, l.1) < (lp.0, lp.1)
            }) {
                pick = Some(v);
            }
        }
        let Some(u) = pick else { break };
        done[u] = true;
        let (f1, g2) = label[u].unwrap();
        for edge in g.edges(u) {
            let seg = g.segment(u, &edge);
            let c1 = segment_collision_count(&inst.ee_body, &seg, &inst.scene) as u32;
            let cand = (f1 + c1, g2 + edge.cost);
            if label[edge.to].is_none_or(|l| cand < l) {
                label[edge.to] = Some(cand);
            }
        }
    }
    label
}
