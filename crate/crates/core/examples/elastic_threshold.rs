//! Elastic kernels with fixed a: scanning b shows the passage from a thin ellipse to a segment.

use anisolog::{classify_psi, make_preset, solve, MinimizerPrediction, Preset, SolveOptions};

fn main() {
    let a = 0.5;
    for b in [0.8, 1.0, 1.1, 1.15, 1.2, 1.4] {
        let kernel = make_preset(Preset::Elastic { a, b }).unwrap();
        let class = classify_psi(&kernel.series, 1024);
        let shape = match solve(&kernel.series, &SolveOptions::default()) {
            Ok(MinimizerPrediction::Ellipse(s)) => format!("ellipse a1={:.4} a2={:.4}", s.a1, s.a2),
            Ok(MinimizerPrediction::Segment { direction, .. }) => format!("segment direction={direction:.6}"),
            Err(e) => format!("error: {e}"),
        };
        println!("b={b:<5} min Ψ̂={:+.2e} ({}) -> {shape}", class.min_value, class.label.as_str());
    }
}
