//! Particles confined to an elliptical well, and the flat potential of the boundary measure.

use anisolog::particles::{minimize, Confinement, DescentOptions, ParticleConfig};
use anisolog::potential::boundary_potential;
use anisolog::{make_preset, EllipseShape, Preset};

fn main() {
    let kernel = make_preset(Preset::Dislocation { alpha: 0.5 }).unwrap();
    let well = EllipseShape::new(0.4, 0.5, 1.0);
    let conf = Confinement::EllipticalWell(well);
    let start = ParticleConfig::random(120, 3, &conf).unwrap();
    let out = minimize(&start, &kernel, &conf, &DescentOptions::default()).unwrap();
    let on_rim = out
        .config
        .positions()
        .iter()
        .filter(|&&x| well.gauge(x) > 0.98)
        .count();
    println!("{on_rim} of {} particles within 1% of the wall", out.config.len());

    let disk = EllipseShape::circle(1.0);
    for r in [0.0, 0.3, 0.6, 0.9] {
        let u = boundary_potential(&kernel.series, &disk, [r * 0.6, r * 0.8], 2048).unwrap();
        println!("boundary-measure potential at |x|={r:.1}: {u:+.3e}");
    }
}
