//! Finite particle system against the continuum prediction.
//!
//! Usage: `cargo run --release --example particle_descent -- [n] [alpha]`

use anisolog::particles::{minimize, second_moments, Confinement, DescentOptions, ParticleConfig};
use anisolog::potential::continuum_energy;
use anisolog::{make_preset, solve, Preset, SolveOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(200, |s| s.parse().expect("n"));
    let alpha: f64 = args.next().map_or(0.5, |s| s.parse().expect("alpha"));

    let kernel = make_preset(Preset::Dislocation { alpha }).unwrap();
    let conf = Confinement::Quadratic;
    let start = ParticleConfig::random(n, 42, &conf).unwrap();
    let out = minimize(&start, &kernel, &conf, &DescentOptions::default()).unwrap();
    let m = second_moments(&out.config);

    let prediction = solve(&kernel.series, &SolveOptions::default()).unwrap();
    let predicted = prediction.second_moments();
    let limit = continuum_energy(&kernel.series, &prediction).unwrap();

    println!("iterations {} converged {}", out.log.len() - 1, out.converged);
    println!("energy      {:.6}  continuum {limit:.6}", out.final_energy());
    println!("E[x1^2]     {:.5}  continuum {:.5}", m[0][0], predicted[0][0]);
    println!("E[x2^2]     {:.5}  continuum {:.5}", m[1][1], predicted[1][1]);
    println!("E[x1 x2]    {:+.2e}", m[0][1]);
}
