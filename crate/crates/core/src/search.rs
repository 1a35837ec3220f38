//! Multi-start, multi-objective A* over the attached roadmap.
//!
//! The search runs from every goal vertex toward the start. Keys are ordered
//! lexicographically by `(f1, g2 + h2, vertex id)` where `f1` counts colliding edge
//! waypoints and `h2` is the DISP from a vertex to the start pose.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{disp_distance, segment_collision_count, Obstacle, Pose, Shape};
use crate::index::PoseIndex;
use crate::roadmap::{PoseGraph, QueryAttachment, QueryGraph, ReachabilityRoadmap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedEntry {
    pub vertex_id: usize,
    /// Colliding waypoints along the best path from the goals.
    pub f1: u32,
    /// Path cost from the goals (m).
    pub g2: f64,
    pub predecessor: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ClosedList {
    /// Entries in expansion order.
    pub entries: Vec<ClosedEntry>,
    pub poses: Vec<Pose>,
    slot: Vec<Option<usize>>,
    index: PoseIndex,
    /// Vertex ids from a goal to the start, when the start was reached.
    pub best_path: Option<Vec<usize>>,
    pub best_path_poses: Option<Vec<Pose>>,
    pub min_collisions: Option<u32>,
    /// Edge waypoints checked against the scene.
    pub pose_checks: usize,
}

impl ClosedList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, vertex_id: usize) -> Option<&ClosedEntry> {
        self.slot
            .get(vertex_id)
            .copied()
            .flatten()
            .map(|i| &self.entries[i])
    }

    /// Closed entry whose pose is DISP-nearest to `e` (ties by expansion order), with
    /// that distance.
    pub fn nearest(&self, e: &Pose) -> Result<(&ClosedEntry, f64)> {
        let nb = self
            .index
            .knn(e, 1, |_| false)
            .into_iter()
            .next()
            .ok_or(Error::EmptyClosedList)?;
        Ok((&self.entries[nb.id], nb.distance))
    }

    /// Index of the entry for `vertex_id` in expansion order.
    pub fn position(&self, vertex_id: usize) -> Option<usize> {
        self.slot.get(vertex_id).copied().flatten()
    }

    /// Writes `vertex_id,f1,g2,predecessor` rows in expansion order.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["vertex_id", "f1", "g2", "predecessor"])?;
        for e in &self.entries {
            w.write_record([
                e.vertex_id.to_string(),
                e.f1.to_string(),
                e.g2.to_string(),
                e.predecessor.map(|p| p.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// `g2(e_near) + DISP(e, e_near)` for the closed vertex `e_near` nearest to `e`.
pub fn heuristic_h(e: &Pose, closed: &ClosedList) -> Result<f64> {
    let (entry, d) = closed.nearest(e)?;
    Ok(entry.g2 + d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key {
    f1: u32,
    f2: f64,
    vertex: usize,
}

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.f1
            .cmp(&other.f1)
            .then(self.f2.total_cmp(&other.f2))
            .then(self.vertex.cmp(&other.vertex))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Search over an attached roadmap.
pub fn msmo_astar(
    roadmap: &ReachabilityRoadmap,
    attachment: &QueryAttachment,
    scene: &[Obstacle],
    ee_body: &[Shape],
) -> ClosedList {
    let graph = QueryGraph::new(roadmap, attachment);
    msmo_astar_graph(&graph, attachment.start_vertex_id, &attachment.goal_vertex_ids, scene, ee_body)
}

/// Search over any pose graph. The `f1` cost of an edge counts its colliding
/// waypoints, excluding the waypoint of the vertex it leaves.
pub fn msmo_astar_graph<G: PoseGraph>(
    graph: &G,
    start: usize,
    goals: &[usize],
    scene: &[Obstacle],
    ee_body: &[Shape],
) -> ClosedList {
    let n = graph.vertex_count();
    let hull = graph.hull();
    let e_start = *graph.pose(start);
    let h2 = |v: usize| disp_distance(hull, graph.pose(v), &e_start);

    let mut label: Vec<Option<(u32, f64, Option<usize>)>> = vec![None; n];
    let mut closed = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &g in goals {
        if label[g].is_none() {
            label[g] = Some((0, 0.0, None));
            heap.push(Reverse(Key { f1: 0, f2: h2(g), vertex: g }));
        }
    }

    let mut entries = Vec::new();
    let mut slot = vec![None; n];
    let mut pose_checks = 0;
    while let Some(Reverse(key)) = heap.pop() {
        let u = key.vertex;
        if closed[u] {
            continue;
        }
        let (f1, g2, pred) = label[u].expect("queued vertices are labelled");
        if key.f1 != f1 || key.f2 != g2 + h2(u) {
            continue;
        }
        closed[u] = true;
        slot[u] = Some(entries.len());
        entries.push(ClosedEntry {
            vertex_id: u,
            f1,
            g2,
            predecessor: pred,
        });
        if u == start {
            break;
        }
        for edge in graph.edges(u) {
            let v = edge.to;
            if closed[v] {
                continue;
            }
            let seg = graph.segment(u, &edge);
            pose_checks += seg.waypoints.len() - 1;
            let c1 = segment_collision_count(ee_body, &seg, scene) as u32;
            let cand = (f1 + c1, g2 + edge.cost);
            let better = match label[v] {
                None => true,
                Some((o1, o2, _)) => (cand.0, cand.1) < (o1, o2),
            };
            if better {
                label[v] = Some((cand.0, cand.1, Some(u)));
                heap.push(Reverse(Key {
                    f1: cand.0,
                    f2: cand.1 + h2(v),
                    vertex: v,
                }));
            }
        }
    }

    let poses: Vec<Pose> = entries.iter().map(|e| *graph.pose(e.vertex_id)).collect();
    let index = PoseIndex::new(hull, &poses);
    let mut out = ClosedList {
        entries,
        poses,
        slot,
        index,
        best_path: None,
        best_path_poses: None,
        min_collisions: None,
        pose_checks,
    };
    if let Some(entry) = out.get(start).copied() {
        let mut path = vec![start];
        let mut cur = entry;
        while let Some(p) = cur.predecessor {
            path.push(p);
            cur = *out.get(p).expect("predecessors are closed");
        }
        path.reverse();
        out.best_path_poses = Some(path.iter().map(|v| *graph.pose(*v)).collect());
        out.best_path = Some(path);
        out.min_collisions = Some(entry.f1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{HullPoints, Shape};
    use crate::kinematics::robots;
    use crate::roadmap::RoadmapEdge;

    /// Small explicit graph for hand-built cases.
    pub(crate) struct TestGraph {
        hull: HullPoints,
        poses: Vec<Pose>,
        adj: Vec<Vec<RoadmapEdge>>,
    }

    impl TestGraph {
        fn new(poses: Vec<Pose>, edges: &[(usize, usize, u32)]) -> Self {
            let hull = HullPoints::box_corners(0.01, 0.01, 0.01);
            let mut adj = vec![Vec::new(); poses.len()];
            for &(u, v, pieces) in edges {
                let (a, b) = (u.min(v), u.max(v));
                let cost = crate::geometry::SE3Segment::uniform(poses[a], poses[b], pieces as usize).cost(&hull);
                adj[u].push(RoadmapEdge { to: v, pieces, cost });
                adj[v].push(RoadmapEdge { to: u, pieces, cost });
            }
            Self { hull, poses, adj }
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
            self.adj[v].clone()
        }
    }

    fn line(n: usize) -> Vec<Pose> {
        (0..n).map(|i| Pose::from_translation(i as f64 * 0.1, 0.0, 0.0)).collect()
    }

    #[test]
    fn start_equal_to_goal() {
        let g = TestGraph::new(line(3), &[(0, 1, 2), (1, 2, 2)]);
        let c = msmo_astar_graph(&g, 1, &[1], &[], &[]);
        assert_eq!(c.min_collisions, Some(0));
        assert_eq!(c.best_path, Some(vec![1]));
        assert_eq!(c.get(1).unwrap().g2, 0.0);
    }

    #[test]
    fn detour_avoids_collisions() {
        // 0 - 1 - 2 straight, or 0 - 3 - 2 around; an obstacle sits on vertex 1.
        let mut poses = line(3);
        poses.push(Pose::from_translation(0.1, 0.3, 0.0));
        let g = TestGraph::new(poses, &[(0, 1, 4), (1, 2, 4), (0, 3, 4), (3, 2, 4)]);
        let body = [Shape::sphere([0.0; 3], 0.01)];
        let wall = [Obstacle::new(1, Shape::sphere([0.1, 0.0, 0.0], 0.02))];
        let c = msmo_astar_graph(&g, 2, &[0], &wall, &body);
        assert_eq!(c.best_path, Some(vec![0, 3, 2]));
        assert_eq!(c.min_collisions, Some(0));
        let free = msmo_astar_graph(&g, 2, &[0], &[], &body);
        assert_eq!(free.best_path, Some(vec![0, 1, 2]));
    }

    #[test]
    fn unreachable_start_is_absent() {
        let g = TestGraph::new(line(4), &[(0, 1, 1), (2, 3, 1)]);
        let c = msmo_astar_graph(&g, 3, &[0], &[], &[]);
        assert!(c.get(3).is_none());
        assert!(c.best_path.is_none());
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn heuristic_examples() {
        let g = TestGraph::new(line(4), &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]);
        let c = msmo_astar_graph(&g, 3, &[0], &[], &[]);
        assert_eq!(heuristic_h(&g.poses[0], &c).unwrap(), 0.0);
        assert!((heuristic_h(&g.poses[2], &c).unwrap() - c.get(2).unwrap().g2).abs() < 1e-15);
        let off = Pose::from_translation(0.1, 0.05, 0.0);
        let brute = c
            .entries
            .iter()
            .map(|e| e.g2 + disp_distance(&g.hull, &g.poses[e.vertex_id], &off))
            .collect::<Vec<_>>();
        let (nearest, _) = c
            .entries
            .iter()
            .map(|e| (e, disp_distance(&g.hull, &g.poses[e.vertex_id], &off)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let pos = c.position(nearest.vertex_id).unwrap();
        assert_eq!(heuristic_h(&off, &c).unwrap(), brute[pos]);
    }

    #[test]
    fn roadmap_search_keys_are_ordered_and_chains_monotone() {
        let chain = robots::spatial_7r();
        let r = ReachabilityRoadmap::build(&chain, 400, 2).unwrap();
        let att = r.attach_query(&r.vertices[3], &[r.vertices[100], r.vertices[200]]).unwrap();
        let scene = [Obstacle::new(1, Shape::sphere([0.4, 0.0, 0.5], 0.2))];
        let c = msmo_astar(&r, &att, &scene, &chain.ee_body);
        assert!(c.best_path.is_some());
        let graph = QueryGraph::new(&r, &att);
        let start_pose = *graph.pose(att.start_vertex_id);
        let keys: Vec<(u32, f64)> = c
            .entries
            .iter()
            .map(|e| (e.f1, e.g2 + disp_distance(&r.hull, graph.pose(e.vertex_id), &start_pose)))
            .collect();
        for w in keys.windows(2) {
            assert!(w[0].0 < w[1].0 || (w[0].0 == w[1].0 && w[0].1 <= w[1].1 + 1e-12));
        }
        for e in &c.entries {
            if let Some(p) = e.predecessor {
                assert!(e.g2 >= c.get(p).unwrap().g2);
            } else {
                assert!(att.goal_vertex_ids.contains(&e.vertex_id));
            }
        }
    }
}
