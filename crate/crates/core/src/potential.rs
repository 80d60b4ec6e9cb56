//! Potentials of candidate minimisers and Euler-Lagrange residuals.
//!
//! All potentials are for the base kernel `W(z) = -log|z| + κ(z/|z|)` and probability
//! measures: the normalised uniform law on an ellipse `E = R D(a) B₁`, the boundary measure
//! of `E` (parametrised as `R(a₁cos θ, a₂sin θ)` with weight `dθ/2π`) and the semicircle law
//! on a segment through the origin.
//!
//! Gradients of `W∗(χ_E/|E|)` come from the Fourier inversion formula
//! `∇(W∗χ)(x) = -(1/π) ∮ Ψ̂(y) T(α(x,y)) y / |D(a)Rᵀy| dH¹(y)`, `α = x·y / |D(a)Rᵀy|`,
//! where `T` is the closed-form value of the oscillatory integral `∫₀^∞ J₁(r) sin(αr)/r dr`.
//! Inside `E` the gradient is linear in `x`. Direct potentials use polar coordinates about
//! `x`, where the radial integral of `W` is explicit.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use crate::anisotropy::AnisotropySeries;
use crate::ellipse::{nodes_for_shape, EllipseShape, Mat2, MinimizerPrediction};
use crate::error::{Error, Result};
use crate::quadrature::Legendre;

/// Closest distance to `∂E` at which boundary potentials are evaluated.
pub const BOUNDARY_EXCLUSION: f64 = 1e-6;

const MAX_NODES: usize = 1 << 16;

/// Bessel function of the first kind of order one.
pub fn bessel_j1(r: f64) -> f64 {
    libm::j1(r)
}

/// `∫₀^∞ J₁(r) sin(αr)/r dr`: `α` on `[-1, 1]`, `sign(α)/(|α| + √(α²-1))` beyond.
pub fn tail_factor(alpha: f64) -> f64 {
    let a = alpha.abs();
    if a <= 1.0 {
        alpha
    } else {
        (1.0 / (a + (a * a - 1.0).sqrt())).copysign(alpha)
    }
}

/// `W₀∗(χ_{B_r}/|B_r|)` for the pure logarithm.
pub fn disk_coulomb_potential(x: [f64; 2], r: f64) -> f64 {
    let n2 = x[0] * x[0] + x[1] * x[1];
    if n2 <= r * r {
        0.5 - 0.5 * n2 / (r * r) - r.ln()
    } else {
        -0.5 * n2.ln()
    }
}

fn mat_inverse(m: &Mat2) -> Mat2 {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ]
}

fn quad_form(m: &Mat2, y: [f64; 2]) -> f64 {
    m[0][0] * y[0] * y[0] + 2.0 * m[0][1] * y[0] * y[1] + m[1][1] * y[1] * y[1]
}

/// Zero set of the quadratic form `yᵀPy` on the unit circle, `y = (cos t, sin t)`: returns
/// `(ψ, δ)` with `yᵀPy > 0` exactly when `|2t - ψ| < δ` modulo `2π`, or `None` when the
/// form does not change sign.
fn sign_change(p: &Mat2) -> Option<(f64, f64)> {
    let mean = 0.5 * (p[0][0] + p[1][1]);
    let half_diff = 0.5 * (p[0][0] - p[1][1]);
    let amp = half_diff.hypot(p[0][1]);
    if amp == 0.0 {
        return None;
    }
    let w = -mean / amp;
    if w.abs() >= 1.0 {
        return None;
    }
    Some((p[0][1].atan2(half_diff), w.acos()))
}

/// GL panels per arc, enough to follow the profile's highest harmonic.
fn panels_for(order: usize, arc: f64) -> usize {
    let waves = (2 * order + 4) as f64 * arc / TAU;
    (0.5 * waves).ceil() as usize + 2
}

/// `G = (1/π) ∮ Ψ̂(y) y yᵀ / (My·y) dH¹`, so that `∇(W∗χ)(x) = -Gx` inside `E`.
fn interior_matrix(series: &AnisotropySeries, shape: &EllipseShape) -> Mat2 {
    let m = shape.matrix();
    let n = nodes_for_shape(shape, series.order(), 512);
    let h = TAU / n as f64;
    let mut g = [[0.0; 2]; 2];
    for k in 0..n {
        let t = h * k as f64;
        let (s, c) = t.sin_cos();
        let w = series.psi_hat(t) / quad_form(&m, [c, s]);
        g[0][0] += w * c * c;
        g[0][1] += w * c * s;
        g[1][1] += w * s * s;
    }
    let f = h / PI;
    [[g[0][0] * f, g[0][1] * f], [g[0][1] * f, g[1][1] * f]]
}

/// `∇(W∗(χ_E/|E|))(x)`.
pub fn grad_potential(
    series: &AnisotropySeries,
    shape: &EllipseShape,
    x: [f64; 2],
) -> Result<[f64; 2]> {
    shape.check()?;
    let m = shape.matrix();
    let p = [
        [x[0] * x[0] - m[0][0], x[0] * x[1] - m[0][1]],
        [x[0] * x[1] - m[1][0], x[1] * x[1] - m[1][1]],
    ];
    // |α(x, y)| > 1 exactly where yᵀ(xxᵀ - M)y > 0.
    let Some((psi, delta)) = sign_change(&p) else {
        let g = interior_matrix(series, shape);
        return Ok([
            -(g[0][0] * x[0] + g[0][1] * x[1]),
            -(g[1][0] * x[0] + g[1][1] * x[1]),
        ]);
    };
    let rule = Legendre::new(24);
    // The integrand is even under y ↦ -y: integrate over a half circle split at the two
    // points where |α| = 1, where T has square-root behaviour.
    let t1 = 0.5 * (psi - delta);
    let t2 = 0.5 * (psi + delta);
    let mut total = [0.0; 2];
    for (a, b) in [(t1, t2), (t2, t1 + PI)] {
        for (t, w) in rule.cosine_map_nodes(a, b, panels_for(series.order(), b - a)) {
            let (s, c) = t.sin_cos();
            let norm = quad_form(&m, [c, s]).sqrt();
            let alpha = (x[0] * c + x[1] * s) / norm;
            let f = w * series.psi_hat(t) * tail_factor(alpha) / norm;
            total[0] += f * c;
            total[1] += f * s;
        }
    }
    Ok([-2.0 * total[0] / PI, -2.0 * total[1] / PI])
}

/// `∇(W∗χ)(x)·x + |x|²`: zero on `E` at a solution, non-negative outside.
pub fn radial_residual(series: &AnisotropySeries, shape: &EllipseShape, x: [f64; 2]) -> Result<f64> {
    let g = grad_potential(series, shape, x)?;
    Ok(g[0] * x[0] + g[1] * x[1] + x[0] * x[0] + x[1] * x[1])
}

/// Radial primitive of `(-log r + κ) r`.
fn radial_primitive(rho: f64, kappa: f64) -> f64 {
    if rho <= 0.0 {
        return 0.0;
    }
    let r2 = rho * rho;
    0.25 * r2 - 0.5 * r2 * rho.ln() + 0.5 * kappa * r2
}

/// `(W∗(χ_E/|E|))(x)` by direct quadrature in polar coordinates centred at `x`.
pub fn ellipse_potential(
    series: &AnisotropySeries,
    shape: &EllipseShape,
    x: [f64; 2],
    quad_nodes: usize,
) -> Result<f64> {
    shape.check()?;
    let minv = mat_inverse(&shape.matrix());
    let b = [
        minv[0][0] * x[0] + minv[0][1] * x[1],
        minv[1][0] * x[0] + minv[1][1] * x[1],
    ];
    let c = x[0] * b[0] + x[1] * b[1] - 1.0;
    let norm = 1.0 / shape.area();
    // Ray x + ρe meets E where Aρ² + 2Bρ + C ≤ 0.
    let roots = |t: f64| {
        let (s, co) = t.sin_cos();
        let a = quad_form(&minv, [co, s]);
        let bb = b[0] * co + b[1] * s;
        let disc = (bb * bb - a * c).max(0.0).sqrt();
        ((-bb - disc) / a, (-bb + disc) / a)
    };
    if c <= 0.0 {
        let strip = 0.5 * (-c).sqrt().max(1e-12);
        let n = ((40.0 / strip).ceil() as usize)
            .max(nodes_for_shape(shape, series.order(), quad_nodes))
            .min(MAX_NODES);
        let h = TAU / n as f64;
        let sum: f64 = (0..n)
            .map(|k| {
                let t = h * k as f64;
                radial_primitive(roots(t).1, series.kappa(t))
            })
            .sum();
        return Ok(norm * sum * h);
    }
    let p = [
        [b[0] * b[0] - c * minv[0][0], b[0] * b[1] - c * minv[0][1]],
        [b[1] * b[0] - c * minv[1][0], b[1] * b[1] - c * minv[1][1]],
    ];
    let Some((psi, delta)) = sign_change(&p) else {
        return Ok(0.0);
    };
    let mut centre = 0.5 * psi;
    if b[0] * centre.cos() + b[1] * centre.sin() > 0.0 {
        centre += PI;
    }
    let (lo, hi) = (centre - 0.5 * delta, centre + 0.5 * delta);
    let rule = Legendre::new(24);
    let panels = panels_for(series.order(), hi - lo).max(quad_nodes / 96);
    let integral = rule.integrate_cosine_map(lo, hi, panels, |t| {
        let (r1, r2) = roots(t);
        let k = series.kappa(t);
        radial_primitive(r2, k) - radial_primitive(r1, k)
    });
    Ok(norm * integral)
}

/// `(W∗μ_∂E)(x)` for the boundary measure of `E`.
pub fn boundary_potential(
    series: &AnisotropySeries,
    shape: &EllipseShape,
    x: [f64; 2],
    quad_nodes: usize,
) -> Result<f64> {
    shape.check()?;
    if quad_nodes < 256 {
        return Err(Error::param(
            "quad_nodes",
            format!("must be at least 256, got {quad_nodes}"),
        ));
    }
    let distance = shape.boundary_distance(x);
    if distance < BOUNDARY_EXCLUSION {
        return Err(Error::NearBoundary { distance });
    }
    let h = TAU / quad_nodes as f64;
    let sum: f64 = (0..quad_nodes)
        .map(|k| {
            let (s, c) = (h * k as f64).sin_cos();
            let y = shape.map_unit_disk([c, s]);
            let z = [x[0] - y[0], x[1] - y[1]];
            -0.5 * (z[0] * z[0] + z[1] * z[1]).ln() + series.kappa_at(z)
        })
        .sum();
    Ok(sum / quad_nodes as f64)
}

/// Potential of the semicircle law on `[-√2, √2]·e` at the point `s·e`, `e` the unit
/// vector at angle `direction`.
pub fn segment_potential(
    series: &AnisotropySeries,
    direction: f64,
    s: f64,
    quad_nodes: usize,
) -> Result<f64> {
    segment_potential_with_half_length(series, direction, SQRT_2, s, quad_nodes)
}

/// As [`segment_potential`] for the semicircle law on `[-R, R]`.
pub fn segment_potential_with_half_length(
    series: &AnisotropySeries,
    direction: f64,
    half_length: f64,
    s: f64,
    quad_nodes: usize,
) -> Result<f64> {
    if quad_nodes < 256 {
        return Err(Error::param(
            "quad_nodes",
            format!("must be at least 256, got {quad_nodes}"),
        ));
    }
    if !(half_length > 0.0) {
        return Err(Error::param("half_length", "must be positive"));
    }
    let r = half_length;
    let rule = Legendre::new((quad_nodes / 16).clamp(16, 64));
    // t = R sin u turns ρ(t) dt into (2/π) cos²u du.
    let weight = |u: f64| 2.0 / PI * u.cos().powi(2);
    let log_part = if s.abs() < r {
        let u0 = (s / r).asin();
        // |s - R sin u| = 2R |cos((u+u0)/2)| |sin((u-u0)/2)|, exact near u = u0.
        let f = |u: f64, half_gap: f64| {
            weight(u)
                * ((2.0 * r).ln()
                    + (0.5 * (u + u0)).cos().abs().ln()
                    + half_gap.sin().abs().ln())
        };
        let right = rule.integrate_graded(u0, FRAC_PI_2, |d| f(u0 + d, 0.5 * d));
        let left = rule.integrate_graded(u0, u0 + (u0 + FRAC_PI_2), |d| f(u0 - d, 0.5 * d));
        left + right
    } else {
        let u0 = FRAC_PI_2.copysign(s);
        let f = |u: f64| weight(u) * (s - r * u.sin()).abs().ln();
        // Grade towards the endpoint nearest to s, where the integrand is least smooth.
        rule.integrate_graded(0.0, PI, |d| f(u0 - d.copysign(s)))
    };
    Ok(-log_part + series.kappa(direction))
}

/// `U'(s)·s + s²` on the line of a semicircle law on `[-R, R]`, for `|s| > R`.
fn segment_radial_residual(half_length: f64, s: f64) -> f64 {
    let rule = Legendre::new(32);
    let stieltjes = rule.integrate_panels(-FRAC_PI_2, FRAC_PI_2, 4, |u| {
        2.0 / PI * u.cos().powi(2) / (s - half_length * u.sin())
    });
    s * s - s * stieltjes
}

/// Sizes of the deterministic probe grids used by [`el_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeCounts {
    pub radii: usize,
    pub angles: usize,
    pub segment_points: usize,
}

impl Default for ProbeCounts {
    fn default() -> Self {
        Self {
            radii: 32,
            angles: 64,
            segment_points: 64,
        }
    }
}

/// Euler-Lagrange residuals of a candidate minimiser under confinement `|x|²`.
///
/// For a segment, `interior_max_grad_residual` is the spread `max - min` of `U(s) + s²/2`
/// over the support probes, and the exterior residual is taken along the line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ELReport {
    pub interior_max_grad_residual: f64,
    pub exterior_min_radial_residual: f64,
    pub constant_c: f64,
}

impl ELReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.interior_max_grad_residual <= tol && self.exterior_min_radial_residual >= -tol
    }
}

/// Interior probes: polar grid on `0.95·E`, radii `0.95·i/radii`, `i = 1..=radii`.
pub fn interior_probes(shape: &EllipseShape, counts: &ProbeCounts) -> Vec<[f64; 2]> {
    polar_probes(shape, counts, |i| 0.95 * i as f64 / counts.radii as f64, 1)
}

/// Exterior probes: polar grid on the relative annulus `1.05 ≤ gauge radius ≤ 3`.
pub fn exterior_probes(shape: &EllipseShape, counts: &ProbeCounts) -> Vec<[f64; 2]> {
    let span = counts.radii.saturating_sub(1).max(1) as f64;
    polar_probes(shape, counts, |i| 1.05 + 1.95 * i as f64 / span, 0)
}

fn polar_probes(
    shape: &EllipseShape,
    counts: &ProbeCounts,
    radius: impl Fn(usize) -> f64,
    first: usize,
) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(counts.radii * counts.angles);
    for i in first..first + counts.radii {
        let r = radius(i);
        for j in 0..counts.angles {
            let (s, c) = (TAU * j as f64 / counts.angles as f64).sin_cos();
            out.push(shape.map_unit_disk([r * c, r * s]));
        }
    }
    out
}

/// Support probes of a segment: midpoints of `segment_points` cells of `(-0.95R, 0.95R)`.
pub fn segment_probes(half_length: f64, counts: &ProbeCounts) -> Vec<f64> {
    let n = counts.segment_points.max(1);
    (0..n)
        .map(|k| 0.95 * half_length * (-1.0 + 2.0 * (k as f64 + 0.5) / n as f64))
        .collect()
}

/// Scans Euler-Lagrange residuals of `prediction` for confinement `|x|²`.
pub fn el_scan(
    series: &AnisotropySeries,
    prediction: &MinimizerPrediction,
    counts: &ProbeCounts,
) -> Result<ELReport> {
    if counts.radii == 0 || counts.angles == 0 || counts.segment_points == 0 {
        return Err(Error::param("probe counts", "must all be positive"));
    }
    match *prediction {
        MinimizerPrediction::Ellipse(shape) => {
            shape.check()?;
            let g = interior_matrix(series, &shape);
            let inside = interior_probes(&shape, counts);
            let mut interior_max = 0.0_f64;
            let mut level = 0.0;
            for x in &inside {
                let grad = [
                    -(g[0][0] * x[0] + g[0][1] * x[1]),
                    -(g[1][0] * x[0] + g[1][1] * x[1]),
                ];
                interior_max = interior_max.max((grad[0] + x[0]).hypot(grad[1] + x[1]));
                let v = ellipse_potential(series, &shape, *x, 512)?;
                level += v + 0.5 * (x[0] * x[0] + x[1] * x[1]);
            }
            let mut exterior_min = f64::INFINITY;
            for x in exterior_probes(&shape, counts) {
                exterior_min = exterior_min.min(radial_residual(series, &shape, x)?);
            }
            Ok(ELReport {
                interior_max_grad_residual: interior_max,
                exterior_min_radial_residual: exterior_min,
                constant_c: level / inside.len() as f64,
            })
        }
        MinimizerPrediction::Segment {
            direction,
            half_length,
        } => {
            let mut values = Vec::with_capacity(counts.segment_points);
            for s in segment_probes(half_length, counts) {
                let u = segment_potential_with_half_length(series, direction, half_length, s, 512)?;
                values.push(u + 0.5 * s * s);
            }
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let mut exterior_min = f64::INFINITY;
            let span = counts.radii.saturating_sub(1).max(1) as f64;
            for i in 0..counts.radii {
                let s = half_length * (1.05 + 1.95 * i as f64 / span);
                for sign in [1.0, -1.0] {
                    exterior_min = exterior_min.min(segment_radial_residual(half_length, sign * s));
                }
            }
            Ok(ELReport {
                interior_max_grad_residual: max - min,
                exterior_min_radial_residual: exterior_min,
                constant_c: values.iter().sum::<f64>() / values.len() as f64,
            })
        }
    }
}

/// Continuum energy `∬ W dμ dμ + ∫ |x|² dμ` of the predicted law.
pub fn continuum_energy(series: &AnisotropySeries, prediction: &MinimizerPrediction) -> Result<f64> {
    match *prediction {
        MinimizerPrediction::Ellipse(shape) => {
            shape.check()?;
            // W∗χ is smooth inside E; Gauss-Legendre in the gauge radius and the trapezoid
            // rule in angle integrate it against the uniform law.
            let rule = Legendre::new(12);
            let angles = 64;
            let mut total = 0.0;
            for (r, w) in rule.nodes_on(0.0, 1.0) {
                for j in 0..angles {
                    let (s, c) = (TAU * j as f64 / angles as f64).sin_cos();
                    let x = shape.map_unit_disk([r * c, r * s]);
                    let v = ellipse_potential(series, &shape, x, 512)?;
                    // Uniform law in gauge coordinates: density 2r dr dθ/2π.
                    total += w * 2.0 * r / angles as f64 * (v + x[0] * x[0] + x[1] * x[1]);
                }
            }
            Ok(total)
        }
        MinimizerPrediction::Segment {
            direction,
            half_length,
        } => {
            // Log-energy of the semicircle law on [-R, R] is 1/4 - log(R/2).
            let r = half_length;
            Ok(0.25 - (0.5 * r).ln() + series.kappa(direction) + 0.25 * r * r)
        }
    }
}
