//! At α = 1 the ellipse degenerates to a segment carrying a semicircle law.

use anisolog::{make_preset, solve_detailed, Preset, SolveOptions};

fn main() {
    let kernel = make_preset(Preset::Dislocation { alpha: 1.0 }).unwrap();
    let report = solve_detailed(&kernel.series, &SolveOptions::default()).unwrap();
    println!("{:>12} {:>14} {:>10}", "epsilon", "beta", "phi");
    for step in &report.continuation {
        println!("{:>12.6} {:>14.6e} {:>10.6}", step.epsilon, step.beta, step.phi);
    }
    if let Some(beta) = report.extrapolated_beta {
        println!("extrapolated beta(0): {beta:.3e}");
    }
    println!("prediction: {}", serde_json::to_string(&report.prediction).unwrap());
}
