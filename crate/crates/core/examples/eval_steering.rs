//! Steering success of the three methods as clutter grows.

use jist::bench::{eval_steering, spearman, SteeringEvalConfig, SteeringMethod};

fn main() {
    let config = SteeringEvalConfig {
        pairs: 200,
        ..SteeringEvalConfig::default()
    };
    let out = eval_steering(&config).unwrap();
    for s in &out.summary {
        println!(
            "{:.2} {:8} success {:.3}  time {:.2} ms  path {:.3} rad  ee {:.3} m",
            s.fraction,
            s.method.name(),
            s.success_rate,
            s.mean_time_s * 1e3,
            s.mean_path_length,
            s.mean_ee_displacement
        );
    }
    for method in SteeringMethod::ALL {
        let (xs, ys): (Vec<f64>, Vec<f64>) = out.success_curve(method).into_iter().unzip();
        println!("{}: spearman {:?}", method.name(), spearman(&xs, &ys));
    }
}
