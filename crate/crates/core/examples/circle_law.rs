//! Isotropic log-gas: the equilibrium is the uniform law on the unit disk.

use anisolog::potential::{el_scan, ProbeCounts};
use anisolog::{solve, AnisotropySeries, SolveOptions};

fn main() {
    let series = AnisotropySeries::empty();
    let prediction = solve(&series, &SolveOptions::default()).expect("solve");
    let el = el_scan(&series, &prediction, &ProbeCounts::default()).expect("scan");
    println!("prediction: {}", serde_json::to_string(&prediction).unwrap());
    println!("interior |∇U + x| max:  {:.3e}", el.interior_max_grad_residual);
    println!("exterior radial min:    {:.3e}", el.exterior_min_radial_residual);
}
