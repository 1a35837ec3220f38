mod common;

use jist::geometry::{disp_distance, path_cost, HullPoints, Pose};
use jist::kinematics::robots;
use nalgebra::Vector3;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hulls() -> Vec<HullPoints> {
    vec![
        HullPoints::box_corners(0.05, 0.02, 0.1),
        robots::planar_3r().ee_hull,
        robots::spatial_7r().ee_hull,
    ]
}

#[test]
fn disp_metric_axioms_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for hull in hulls() {
        for _ in 0..500 {
            let a = common::random_pose(&mut rng, 1.0);
            let b = common::random_pose(&mut rng, 1.0);
            let c = common::random_pose(&mut rng, 1.0);
            let ab = disp_distance(&hull, &a, &b);
            assert_eq!(ab, disp_distance(&hull, &b, &a));
            assert!(ab >= 0.0);
            assert_eq!(disp_distance(&hull, &a, &a), 0.0);
            let ac = disp_distance(&hull, &a, &c);
            let cb = disp_distance(&hull, &c, &b);
            assert!(ab <= ac + cb + 1e-9);
            let t = Vector3::new(c.translation.x, c.translation.y, c.translation.z);
            let shifted = Pose::new(a.translation + t, a.rotation);
            assert!((disp_distance(&hull, &a, &shifted) - t.norm()).abs() <= 1e-12);
        }
    }
}

#[test]
fn path_cost_of_a_single_pose_is_zero() {
    let hull = HullPoints::box_corners(0.01, 0.01, 0.01);
    assert_eq!(path_cost(&hull, &[Pose::identity()]).unwrap(), 0.0);
}

proptest! {
    #[test]
    fn path_cost_is_at_least_endpoint_disp(seed in any::<u64>(), len in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hull = robots::spatial_7r().ee_hull;
        let poses: Vec<Pose> = (0..len).map(|_| common::random_pose(&mut rng, 0.5)).collect();
        let cost = path_cost(&hull, &poses).unwrap();
        prop_assert!(cost + 1e-9 >= disp_distance(&hull, &poses[0], &poses[len - 1]));
    }
}
