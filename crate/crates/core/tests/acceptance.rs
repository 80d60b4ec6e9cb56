//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::{Duration, Instant};

use anisolog::ellipse::{solve_detailed, EllipseShape, MinimizerPrediction, SolveOptions};
use anisolog::particles::{
    discrete_energy, discrete_gradient, minimize, second_moments, Confinement, DescentOptions,
    ParticleConfig,
};
use anisolog::potential::{bessel_j1, boundary_potential, el_scan, tail_factor, ProbeCounts};
use anisolog::quadrature::Legendre;
use anisolog::verify::{parseval_gap, GaussianBlobPair, QuadOptions};
use anisolog::{make_preset, AnisotropySeries, KernelSpec, PsiLabel, Preset};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn dislocation(alpha: f64) -> AnisotropySeries {
    make_preset(Preset::Dislocation { alpha }).unwrap().series
}

fn ellipse_of(p: &MinimizerPrediction) -> Option<EllipseShape> {
    match p {
        MinimizerPrediction::Ellipse(s) => Some(*s),
        _ => None,
    }
}

fn circle_law() -> Outcome {
    let t = Instant::now();
    let series = AnisotropySeries::empty();
    let report = match solve_detailed(&series, &SolveOptions::default()) {
        Ok(r) => r,
        Err(e) => return check(false, format!("solve failed: {e}")),
    };
    let Some(s) = ellipse_of(&report.prediction) else {
        return check(false, format!("expected an ellipse, got {:?}", report.prediction));
    };
    let el = el_scan(&series, &report.prediction, &ProbeCounts::default()).unwrap();
    let elapsed = t.elapsed();
    let axes = (s.a1 - 1.0).abs().max((s.a2 - 1.0).abs());
    check(
        axes <= 1e-6 && el.passes(1e-8) && elapsed < Duration::from_secs(1),
        format!(
            "axis error {axes:.1e}, interior {:.1e}, exterior min {:.3e}, {elapsed:.2?}",
            el.interior_max_grad_residual, el.exterior_min_radial_residual
        ),
    )
}

fn ellipse_law() -> Outcome {
    let t = Instant::now();
    let mut worst = 0.0_f64;
    for alpha in [0.25, 0.5, 0.9] {
        let report = match solve_detailed(&dislocation(alpha), &SolveOptions::default()) {
            Ok(r) => r,
            Err(e) => return check(false, format!("alpha {alpha}: {e}")),
        };
        let Some(s) = ellipse_of(&report.prediction) else {
            return check(false, format!("alpha {alpha}: not an ellipse"));
        };
        // Ψ̂ = 1 - α cos 2θ: the short axis lies along e₁, so phi = 0.
        let err = (s.a1 - (1.0 - alpha).sqrt())
            .abs()
            .max((s.a2 - (1.0 + alpha).sqrt()).abs())
            .max(s.phi.abs());
        worst = worst.max(err);
    }
    let elapsed = t.elapsed();
    check(
        worst <= 1e-6 && elapsed < Duration::from_secs(5),
        format!("worst error {worst:.1e} over alpha in {{0.25, 0.5, 0.9}}, {elapsed:.2?}"),
    )
}

fn degenerate_collapse() -> Outcome {
    let report = match solve_detailed(&dislocation(1.0), &SolveOptions::default()) {
        Ok(r) => r,
        Err(e) => return check(false, format!("solve failed: {e}")),
    };
    let MinimizerPrediction::Segment { direction, .. } = report.prediction else {
        return check(false, format!("expected a segment, got {:?}", report.prediction));
    };
    let betas: Vec<f64> = report.continuation.iter().map(|s| s.beta).collect();
    let monotone = betas.windows(2).all(|w| w[1] < w[0]);
    let last = betas.last().copied().unwrap_or(f64::NAN);
    check(
        (direction - FRAC_PI_2).abs() <= 1e-9 && monotone && last < 1e-3,
        format!(
            "direction {direction:.12}, {} continuation steps, monotone {monotone}, final beta {last:.3e}",
            betas.len()
        ),
    )
}

fn elasticity_threshold() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (b, want_segment) in [(1.0, false), (1.2, true)] {
        let series = make_preset(Preset::Elastic { a: 0.5, b }).unwrap().series;
        match solve_detailed(&series, &SolveOptions::default()) {
            Ok(r) => {
                let label_ok = r.classification.label == PsiLabel::Degenerate;
                let shape_ok = match r.prediction {
                    MinimizerPrediction::Ellipse(s) => {
                        parts.push(format!("b={b}: ellipse a1={:.4} a2={:.4}", s.a1, s.a2));
                        !want_segment
                    }
                    MinimizerPrediction::Segment { direction, .. } => {
                        parts.push(format!("b={b}: segment {direction:.9}"));
                        want_segment && (direction - FRAC_PI_2).abs() <= 1e-9
                    }
                };
                pass &= label_ok && shape_ok;
            }
            Err(e) => {
                parts.push(format!("b={b}: {e}"));
                pass = false;
            }
        }
    }
    check(pass, parts.join("; "))
}

fn tail_integral() -> Outcome {
    let t = Instant::now();
    let rule = Legendre::new(16);
    let mut worst = 0.0_f64;
    for alpha in [0.5, 2.0] {
        let value = rule.integrate_panels(0.0, 1e4, 20_000, |r| {
            if r == 0.0 {
                0.0
            } else {
                bessel_j1(r) * (alpha * r).sin() / r
            }
        });
        worst = worst.max((value - tail_factor(alpha)).abs());
    }
    let elapsed = t.elapsed();
    check(
        worst <= 1e-3 && elapsed < Duration::from_secs(1),
        format!("max deviation {worst:.2e}, {elapsed:.2?}"),
    )
}

fn parseval_identity() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, kernel) in [
        ("coulomb", KernelSpec::coulomb()),
        ("dislocation 0.5", KernelSpec::base(dislocation(0.5))),
    ] {
        match parseval_gap(&kernel, &GaussianBlobPair::default(), &QuadOptions::default()) {
            Ok(r) => {
                pass &= r.rel_gap <= 1e-3;
                parts.push(format!("{name}: rel_gap {:.2e}", r.rel_gap));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    check(pass, parts.join("; "))
}

fn particle_agreement() -> Outcome {
    let t = Instant::now();
    let kernel = make_preset(Preset::Dislocation { alpha: 0.5 }).unwrap();
    let conf = Confinement::Quadratic;
    let start = ParticleConfig::random(400, 42, &conf).unwrap();
    let out = match minimize(&start, &kernel, &conf, &DescentOptions::default()) {
        Ok(o) => o,
        Err(e) => return check(false, format!("descent failed: {e}")),
    };
    let m = second_moments(&out.config);
    let target = [[0.125, 0.0], [0.0, 0.375]];
    let within = (m[0][0] - target[0][0]).abs() <= 0.05 * target[0][0]
        && (m[1][1] - target[1][1]).abs() <= 0.05 * target[1][1]
        && m[0][1].abs() <= 0.05 * target[0][0];
    let shape = EllipseShape::new(0.0, 0.5f64.sqrt() * 1.05, 1.5f64.sqrt() * 1.05);
    let inside = out
        .config
        .positions()
        .iter()
        .filter(|&&x| shape.contains(x))
        .count();
    let fraction = inside as f64 / 400.0;
    let elapsed = t.elapsed();
    check(
        within && fraction >= 0.99 && elapsed < Duration::from_secs(60),
        format!(
            "moments ({:.5}, {:.5}, {:.1e}), inside {:.1}%, {} iterations, {elapsed:.2?}",
            m[0][0],
            m[1][1],
            m[0][1],
            100.0 * fraction,
            out.log.len() - 1
        ),
    )
}

fn physical_confinement() -> Outcome {
    let series = dislocation(0.5);
    let disk = EllipseShape::circle(1.0);
    let mut values = Vec::new();
    for i in 1..=5 {
        let r = 0.16 * i as f64;
        for j in 0..10 {
            let t = TAU * j as f64 / 10.0 + 0.1 * i as f64;
            match boundary_potential(&series, &disk, [r * t.cos(), r * t.sin()], 2048) {
                Ok(v) => values.push(v),
                Err(e) => return check(false, format!("{e}")),
            }
        }
    }
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    check(
        max - min <= 1e-3,
        format!("{} probes, spread {:.2e}", values.len(), max - min),
    )
}

fn matrix_of(p: &MinimizerPrediction) -> [[f64; 2]; 2] {
    ellipse_of(p).expect("ellipse").matrix()
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut notes = Vec::new();
    let mut pass = true;

    // Rotating κ rotates the ellipse: M' = R M Rᵀ.
    let mut rot_err = 0.0_f64;
    let mut trace_err = 0.0_f64;
    for _ in 0..12 {
        let a2 = 0.4 * (rng.random::<f64>() - 0.5);
        let b2 = 0.4 * (rng.random::<f64>() - 0.5);
        let a4 = 0.05 * (rng.random::<f64>() - 0.5);
        let series = AnisotropySeries::new(vec![a2, a4], vec![b2, 0.0]).unwrap();
        let angle = PI * rng.random::<f64>();
        let base = anisolog::solve(&series, &SolveOptions::default()).unwrap();
        let turned = anisolog::solve(&series.rotated(angle), &SolveOptions::default()).unwrap();
        let m = matrix_of(&base);
        let (s, c) = angle.sin_cos();
        let r = [[c, -s], [s, c]];
        let mut expect = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        expect[i][j] += r[i][k] * m[k][l] * r[j][l];
                    }
                }
            }
        }
        let got = matrix_of(&turned);
        for i in 0..2 {
            for j in 0..2 {
                rot_err = rot_err.max((got[i][j] - expect[i][j]).abs());
            }
        }
        for p in [base, turned] {
            let e = ellipse_of(&p).unwrap();
            trace_err = trace_err.max((e.a1 * e.a1 + e.a2 * e.a2 - 2.0).abs());
        }
    }
    pass &= rot_err <= 1e-8 && trace_err <= 1e-9;
    notes.push(format!("rotation {rot_err:.1e}, trace {trace_err:.1e}"));

    // Gradient against central differences on random configurations.
    let kernel = make_preset(Preset::Dislocation { alpha: 0.7 }).unwrap();
    let conf = Confinement::Quadratic;
    let mut grad_err = 0.0_f64;
    for seed in 0..5 {
        let cfg = ParticleConfig::random(12, seed, &conf).unwrap();
        let g = discrete_gradient(&cfg, &kernel, &conf).unwrap();
        let h = 1e-6;
        for j in 0..cfg.len() {
            for comp in 0..2 {
                let mut p = cfg.positions().to_vec();
                p[j][comp] += h;
                let ep = discrete_energy(&ParticleConfig::new(p.clone()).unwrap(), &kernel, &conf);
                p[j][comp] -= 2.0 * h;
                let em = discrete_energy(&ParticleConfig::new(p).unwrap(), &kernel, &conf);
                let fd = (ep - em) / (2.0 * h);
                grad_err = grad_err.max((fd - g[j][comp]).abs() / g[j][comp].abs().max(1e-2));
            }
        }
    }
    pass &= grad_err <= 1e-6;
    notes.push(format!("gradient {grad_err:.1e}"));

    // Every accepted descent step lowers the energy.
    let mut monotone = true;
    for seed in 0..3 {
        let start = ParticleConfig::random(60, seed, &conf).unwrap();
        let opts = DescentOptions {
            max_iters: 400,
            ..Default::default()
        };
        let out = minimize(&start, &kernel, &conf, &opts).unwrap();
        monotone &= out.log.windows(2).all(|w| w[1].energy < w[0].energy);
    }
    pass &= monotone;
    notes.push(format!("monotone descent {monotone}"));
    check(pass, notes.join(", "))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("circle law", circle_law),
        ("ellipse law", ellipse_law),
        ("degenerate collapse", degenerate_collapse),
        ("elasticity threshold", elasticity_threshold),
        ("tail integral", tail_integral),
        ("energy identity", parseval_identity),
        ("particle/continuum agreement", particle_agreement),
        ("physical confinement", physical_confinement),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {tag} {name}: {}", i + 1, outcome.detail);
        if !outcome.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
