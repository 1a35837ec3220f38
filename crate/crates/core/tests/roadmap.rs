use jist::error::Error;
use jist::kinematics::robots;
use jist::roadmap::{neighbor_count, ReachabilityRoadmap};

/// Every vertex is joined to each of its brute-force nearest neighbours.
fn audit_degrees(roadmap: &ReachabilityRoadmap) -> usize {
    let k = neighbor_count(roadmap.len());
    let mut failures = 0;
    for u in 0..roadmap.len() {
        let nearest = roadmap.index().knn_linear(&roadmap.vertices[u], k, |i| i == u);
        let adjacent = |v: usize| roadmap.adjacency[u].iter().any(|e| e.to == v);
        if roadmap.adjacency[u].len() < k || !nearest.iter().all(|nb| adjacent(nb.id)) {
            failures += 1;
        }
    }
    failures
}

#[test]
fn degree_audit_small_roadmaps() {
    for (chain, n) in [(robots::planar_3r(), 100), (robots::spatial_7r(), 100), (robots::spatial_7r(), 1000)] {
        let r = ReachabilityRoadmap::build(&chain, n, 2).unwrap();
        assert_eq!(r.meta.neighbors, neighbor_count(n));
        assert_eq!(audit_degrees(&r), 0);
        assert!(r.isolated().is_empty());
    }
}

#[test]
fn file_round_trip_and_chain_check() {
    let chain = robots::spatial_7r();
    let r = ReachabilityRoadmap::build(&chain, 400, 9).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rm.bin");
    r.save(&path).unwrap();
    assert_eq!(ReachabilityRoadmap::load(&path, &chain).unwrap(), r);
    assert!(matches!(
        ReachabilityRoadmap::load(&path, &robots::planar_3r()),
        Err(Error::ChainHashMismatch { .. })
    ));
}

#[test]
fn same_seed_same_bytes() {
    let chain = robots::spatial_7r();
    let a = ReachabilityRoadmap::build(&chain, 300, 4).unwrap().to_bytes();
    let b = ReachabilityRoadmap::build(&chain, 300, 4).unwrap().to_bytes();
    let c = ReachabilityRoadmap::build(&chain, 300, 5).unwrap().to_bytes();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn attachment_leaves_the_base_graph_alone() {
    let chain = robots::spatial_7r();
    let r = ReachabilityRoadmap::build(&chain, 200, 6).unwrap();
    let before = r.clone();
    let att = r.attach_query(&r.vertices[0], &[r.vertices[10], r.vertices[20]]).unwrap();
    assert_eq!(att.start_vertex_id, 200);
    assert_eq!(att.goal_vertex_ids, vec![201, 202]);
    assert_eq!(att.temp_degree(201), neighbor_count(200));
    assert_eq!(r, before);
}
