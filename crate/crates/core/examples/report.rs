//! Aggregates per-trial bucket rows into success rates and mean costs with 95% intervals.

use jist::bench::{emit_report, TrialBucketRow};

fn main() {
    let dir = std::env::temp_dir().join("jist_example_report");
    std::fs::create_dir_all(&dir).unwrap();
    let input = dir.join("trial_buckets.csv");
    let mut w = csv::Writer::from_path(&input).unwrap();
    for trial in 0..6 {
        for (k, time) in [1.0, 2.0].into_iter().enumerate() {
            let solved = trial % 3 != 0 || k == 1;
            w.serialize(TrialBucketRow {
                planner: "jist".into(),
                problem: "table".into(),
                trial,
                time,
                solved: solved as u8,
                cost: solved.then_some(1.0 - 0.1 * k as f64 + 0.02 * trial as f64),
            })
            .unwrap();
        }
    }
    w.flush().unwrap();
    for s in emit_report(&[input], &dir).unwrap() {
        println!(
            "t={} success {:.2} [{:.2?}, {:.2?}] mean cost {:.3?}",
            s.time, s.success_rate, s.success_ci_low, s.success_ci_high, s.mean_cost
        );
    }
    println!("summary.json and report.csv in {}", dir.display());
}
