//! Ellipse-law solver for quadratic confinement.
//!
//! The minimiser of `∬ W(x-y) dμ dμ + ∫ |x|² dμ` is the uniform law on an ellipse whose
//! matrix `M = R diag(a₁², a₂²) Rᵀ` solves
//! `(1/π) ∮ Ψ̂(y) yⱼyₖ / (My·y) dH¹ = δⱼₖ`. Solutions are the critical points of the convex
//! function `f(M) = -(1/π) ∮ Ψ̂ log(My·y) + tr M`, restricted to `tr M = 2`. On that slice we
//! write `M = I + [[p, q], [q, -p]]`, so `My·y = 1 + p cos 2t + q sin 2t` and the problem is a
//! smooth convex minimisation over the open unit disk in `(p, q)`.
//!
//! When `Ψ̂` only vanishes somewhere, the kernel is regularised to `Ψ̂ + ε` and the solution
//! is tracked as `ε → 0`; a collapsing minor axis signals the semicircle law on a line.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::anisotropy::{classify_psi, AnisotropySeries, PsiClassification, PsiLabel};
use crate::error::{Error, Result};

pub type Mat2 = [[f64; 2]; 2];

pub const DEFAULT_QUAD_NODES: usize = 512;

/// Closest admissible distance of `(p, q)` to the unit circle: keeps `β ∈ [1e-6, 2 - 1e-6]`.
const WALL: f64 = 1.0 - 1e-6;
const MAX_NODES: usize = 1 << 18;

/// Rotated ellipse `{ R(phi) D(a) y : |y| ≤ 1 }` with `D(a) = diag(a1, a2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseShape {
    pub phi: f64,
    pub a1: f64,
    pub a2: f64,
}

/// Maps an angle into `(-π/2, π/2]`.
fn wrap_half_turn(angle: f64) -> f64 {
    let w = angle.rem_euclid(PI);
    if (w - FRAC_PI_2).abs() <= 1e-12 {
        FRAC_PI_2
    } else if w > FRAC_PI_2 {
        w - PI
    } else {
        w
    }
}

impl EllipseShape {
    pub fn new(phi: f64, a1: f64, a2: f64) -> Self {
        Self {
            phi: wrap_half_turn(phi),
            a1,
            a2,
        }
    }

    pub fn circle(radius: f64) -> Self {
        Self::new(0.0, radius, radius)
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.a1 > 0.0 && self.a2 > 0.0 && self.a1.is_finite() && self.a2.is_finite())
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.is_degenerate() {
            Err(Error::DegenerateShape {
                a1: self.a1,
                a2: self.a2,
            })
        } else {
            Ok(())
        }
    }

    pub fn area(&self) -> f64 {
        PI * self.a1 * self.a2
    }

    /// `M = R diag(a1², a2²) Rᵀ`.
    pub fn matrix(&self) -> Mat2 {
        let (s, c) = self.phi.sin_cos();
        let (l1, l2) = (self.a1 * self.a1, self.a2 * self.a2);
        [
            [l1 * c * c + l2 * s * s, (l1 - l2) * c * s],
            [(l1 - l2) * c * s, l1 * s * s + l2 * c * c],
        ]
    }

    /// Coordinates of `x` in the ellipse's principal frame, `Rᵀx`.
    pub fn to_local(&self, x: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.phi.sin_cos();
        [c * x[0] + s * x[1], -s * x[0] + c * x[1]]
    }

    pub fn from_local(&self, u: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.phi.sin_cos();
        [c * u[0] - s * u[1], s * u[0] + c * u[1]]
    }

    /// Image of a point of the unit disk: `R D(a) y`.
    pub fn map_unit_disk(&self, y: [f64; 2]) -> [f64; 2] {
        self.from_local([self.a1 * y[0], self.a2 * y[1]])
    }

    /// `xᵀ M⁻¹ x`; at most one exactly on the closed ellipse.
    pub fn gauge(&self, x: [f64; 2]) -> f64 {
        let u = self.to_local(x);
        (u[0] / self.a1).powi(2) + (u[1] / self.a2).powi(2)
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        self.gauge(x) <= 1.0
    }

    /// Euclidean closest point of the closed ellipse to `x` (identity inside).
    pub fn closest_point(&self, x: [f64; 2]) -> [f64; 2] {
        if self.contains(x) {
            return x;
        }
        let u = self.to_local(x);
        let (a2, b2) = (self.a1 * self.a1, self.a2 * self.a2);
        // Lagrange condition: y = (a² u₁/(a²+t), b² u₂/(b²+t)) on the boundary, t > 0.
        // F(t) = (a u₁/(a²+t))² + (b u₂/(b²+t))² - 1 is convex and decreasing, so Newton from
        // t = 0 increases monotonically to the root.
        let mut t = 0.0_f64;
        for _ in 0..100 {
            let p = self.a1 * u[0] / (a2 + t);
            let q = self.a2 * u[1] / (b2 + t);
            let f = p * p + q * q - 1.0;
            let df = -2.0 * (p * p / (a2 + t) + q * q / (b2 + t));
            let step = f / df;
            t -= step;
            if step.abs() <= 1e-16 * (1.0 + t) {
                break;
            }
        }
        let mut y = [a2 * u[0] / (a2 + t), b2 * u[1] / (b2 + t)];
        let g = (y[0] / self.a1).powi(2) + (y[1] / self.a2).powi(2);
        if g > 1.0 {
            let s = g.sqrt();
            y = [y[0] / s, y[1] / s];
        }
        self.from_local(y)
    }

    /// Euclidean distance from `x` to the boundary curve.
    pub fn boundary_distance(&self, x: [f64; 2]) -> f64 {
        if !self.contains(x) {
            let y = self.closest_point(x);
            return (x[0] - y[0]).hypot(x[1] - y[1]);
        }
        // Inside: minimise over the boundary parametrisation on a grid, then refine.
        let u = self.to_local(x);
        let dist = |t: f64| (self.a1 * t.cos() - u[0]).hypot(self.a2 * t.sin() - u[1]);
        let n = 256;
        let h = std::f64::consts::TAU / n as f64;
        let (mut best_t, mut best) = (0.0, f64::INFINITY);
        for k in 0..n {
            let t = h * k as f64;
            let d = dist(t);
            if d < best {
                best = d;
                best_t = t;
            }
        }
        let (mut lo, mut hi) = (best_t - h, best_t + h);
        for _ in 0..100 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if dist(m1) < dist(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        dist(0.5 * (lo + hi)).min(best)
    }
}

/// Predicted minimiser of the confined energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MinimizerPrediction {
    /// Uniform law on the ellipse.
    Ellipse(EllipseShape),
    /// Semicircle law `(2/(πR²))√(R² - t²)` on `[-R, R]` along `direction`.
    Segment {
        direction: f64,
        #[serde(default = "default_half_length", skip_serializing_if = "is_default_half_length")]
        half_length: f64,
    },
}

fn default_half_length() -> f64 {
    SQRT_2
}

fn is_default_half_length(h: &f64) -> bool {
    *h == SQRT_2
}

impl MinimizerPrediction {
    pub fn segment(direction: f64) -> Self {
        let mut direction = direction.rem_euclid(PI);
        if PI - direction <= 1e-12 {
            direction = 0.0;
        }
        MinimizerPrediction::Segment {
            direction,
            half_length: SQRT_2,
        }
    }

    /// Prediction for the kernel `L·W`, obtained from the one for `W` by the dilation `√L`.
    pub fn dilated(&self, factor: f64) -> Self {
        match *self {
            MinimizerPrediction::Ellipse(s) => {
                MinimizerPrediction::Ellipse(EllipseShape::new(s.phi, s.a1 * factor, s.a2 * factor))
            }
            MinimizerPrediction::Segment {
                direction,
                half_length,
            } => MinimizerPrediction::Segment {
                direction,
                half_length: half_length * factor,
            },
        }
    }

    /// Second-moment matrix `∫ x xᵀ dμ` of the predicted law.
    pub fn second_moments(&self) -> Mat2 {
        match *self {
            MinimizerPrediction::Ellipse(s) => {
                let m = s.matrix();
                [[m[0][0] / 4.0, m[0][1] / 4.0], [m[1][0] / 4.0, m[1][1] / 4.0]]
            }
            MinimizerPrediction::Segment {
                direction,
                half_length,
            } => {
                let var = half_length * half_length / 4.0;
                let (s, c) = direction.sin_cos();
                [[var * c * c, var * c * s], [var * c * s, var * s * s]]
            }
        }
    }
}

fn check_quad_nodes(n: usize) -> Result<()> {
    if n < 64 || !n.is_multiple_of(2) {
        return Err(Error::param(
            "quad_nodes",
            format!("must be even and at least 64, got {n}"),
        ));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 2.0) {
        return Err(Error::param("beta", format!("must lie in (0, 2), got {beta}")));
    }
    Ok(())
}

/// `γ(β, Q) = -(1/π) ∮ Ψ̂(Qy) log(β y₁² + (2-β) y₂²) dH¹`, `Q` the rotation by `phi`.
pub fn gamma_objective(
    series: &AnisotropySeries,
    beta: f64,
    phi: f64,
    quad_nodes: usize,
) -> Result<f64> {
    check_beta(beta)?;
    check_quad_nodes(quad_nodes)?;
    let h = 2.0 * PI / quad_nodes as f64;
    let sum: f64 = (0..quad_nodes)
        .map(|k| {
            let t = h * k as f64;
            let (s, c) = t.sin_cos();
            series.psi_hat(t + phi) * (beta * c * c + (2.0 - beta) * s * s).ln()
        })
        .sum();
    Ok(-sum * h / PI)
}

/// `∂γ/∂β = (1/π) ∮ Ψ̂(Qy) (2y₂² - 1) / (β y₁² + (2-β) y₂²) dH¹`.
pub fn gamma_beta_derivative(
    series: &AnisotropySeries,
    beta: f64,
    phi: f64,
    quad_nodes: usize,
) -> Result<f64> {
    check_beta(beta)?;
    check_quad_nodes(quad_nodes)?;
    let h = 2.0 * PI / quad_nodes as f64;
    let sum: f64 = (0..quad_nodes)
        .map(|k| {
            let t = h * k as f64;
            let (s, c) = t.sin_cos();
            series.psi_hat(t + phi) * (2.0 * s * s - 1.0) / (beta * c * c + (2.0 - beta) * s * s)
        })
        .sum();
    Ok(sum * h / PI)
}

/// `(1/π) ∮ Ψ̂(y) yⱼyₖ / (My·y) dH¹ - δⱼₖ` for the matrix of `shape`.
pub fn system_residual(
    series: &AnisotropySeries,
    shape: &EllipseShape,
    quad_nodes: usize,
) -> Result<Mat2> {
    shape.check()?;
    check_quad_nodes(quad_nodes)?;
    let psi = series.psi_hat_on_circle(quad_nodes);
    Ok(residual_from_samples(&psi, &shape.matrix()))
}

fn residual_from_samples(psi: &[f64], m: &Mat2) -> Mat2 {
    let n = psi.len();
    let h = 2.0 * PI / n as f64;
    let mut acc = [[0.0; 2]; 2];
    for (k, &w) in psi.iter().enumerate() {
        let (s, c) = (h * k as f64).sin_cos();
        let q = m[0][0] * c * c + 2.0 * m[0][1] * c * s + m[1][1] * s * s;
        let f = w / q;
        acc[0][0] += f * c * c;
        acc[0][1] += f * c * s;
        acc[1][1] += f * s * s;
    }
    let scale = h / PI;
    [
        [acc[0][0] * scale - 1.0, acc[0][1] * scale],
        [acc[0][1] * scale, acc[1][1] * scale - 1.0],
    ]
}

pub fn sup_norm(m: &Mat2) -> f64 {
    m.iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// `Ψ̂` (normalised to unit mean) sampled on the circle, with the harmonics `cos 2t`,
/// `sin 2t` that enter `My·y` on the trace-two slice.
#[derive(Debug, Clone)]
struct Profile {
    psi: Vec<f64>,
    cos2: Vec<f64>,
    sin2: Vec<f64>,
}

impl Profile {
    /// Samples of `(Ψ̂ + ε)/(1 + ε)`.
    fn new(series: &AnisotropySeries, epsilon: f64, nodes: usize) -> Self {
        let h = 2.0 * PI / nodes as f64;
        let mut psi = Vec::with_capacity(nodes);
        let mut cos2 = Vec::with_capacity(nodes);
        let mut sin2 = Vec::with_capacity(nodes);
        for k in 0..nodes {
            let t = h * k as f64;
            psi.push((series.psi_hat(t) + epsilon) / (1.0 + epsilon));
            let (s, c) = (2.0 * t).sin_cos();
            cos2.push(c);
            sin2.push(s);
        }
        Self { psi, cos2, sin2 }
    }

    fn nodes(&self) -> usize {
        self.psi.len()
    }

    fn value(&self, p: f64, q: f64) -> f64 {
        if p.hypot(q) >= 1.0 {
            return f64::INFINITY;
        }
        let w = 2.0 / self.nodes() as f64;
        let sum: f64 = self
            .psi
            .iter()
            .zip(self.cos2.iter().zip(&self.sin2))
            .map(|(&f, (&c, &s))| f * (1.0 + p * c + q * s).ln())
            .sum();
        -w * sum
    }

    /// Value, gradient and Hessian in `(p, q)`.
    fn derivatives(&self, p: f64, q: f64) -> (f64, [f64; 2], Mat2) {
        let w = 2.0 / self.nodes() as f64;
        let (mut f, mut g, mut h) = (0.0, [0.0; 2], [[0.0; 2]; 2]);
        for (&psi, (&c, &s)) in self.psi.iter().zip(self.cos2.iter().zip(&self.sin2)) {
            let l = 1.0 + p * c + q * s;
            let inv = psi / l;
            f += psi * l.ln();
            g[0] += inv * c;
            g[1] += inv * s;
            let inv2 = inv / l;
            h[0][0] += inv2 * c * c;
            h[0][1] += inv2 * c * s;
            h[1][1] += inv2 * s * s;
        }
        h[1][0] = h[0][1];
        (
            -w * f,
            [-w * g[0], -w * g[1]],
            [[w * h[0][0], w * h[0][1]], [w * h[1][0], w * h[1][1]]],
        )
    }
}

#[derive(Debug, Clone, Copy)]
struct NewtonOutcome {
    p: f64,
    q: f64,
    value: f64,
    grad_norm: f64,
    converged: bool,
}

fn damped_newton(profile: &Profile, start: [f64; 2]) -> NewtonOutcome {
    let [mut p, mut q] = start;
    let mut grad_norm = f64::INFINITY;
    let mut value = profile.value(p, q);
    let mut decrement = f64::INFINITY;
    let outcome = |p, q, value, grad_norm, converged| NewtonOutcome {
        p,
        q,
        value,
        grad_norm,
        converged,
    };
    for _ in 0..200 {
        let (f, g, h) = profile.derivatives(p, q);
        value = f;
        grad_norm = g[0].abs().max(g[1].abs());
        if grad_norm <= 1e-14 {
            return outcome(p, q, value, grad_norm, true);
        }
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let newton = det > 0.0 && h[0][0] > 0.0;
        let mut dir = if newton {
            [
                -(h[1][1] * g[0] - h[0][1] * g[1]) / det,
                -(-h[1][0] * g[0] + h[0][0] * g[1]) / det,
            ]
        } else {
            [-g[0], -g[1]]
        };
        let mut slope = g[0] * dir[0] + g[1] * dir[1];
        if slope >= 0.0 {
            dir = [-g[0], -g[1]];
            slope = -(g[0] * g[0] + g[1] * g[1]);
        }
        // Largest step keeping (p, q) inside the admissible disk.
        let mut step = 1.0_f64;
        let norm_at = |s: f64| (p + s * dir[0]).hypot(q + s * dir[1]);
        while norm_at(step) > WALL && step > 1e-20 {
            step *= 0.5;
        }
        if newton {
            decrement = -slope;
            if decrement <= 1e-28 {
                return outcome(p, q, value, grad_norm, true);
            }
        }
        // Close to the minimum the decrease drops below the resolution of `f`; there the
        // full Newton step is taken without a line search.
        let pure = newton && decrement < 1e-12 && step == 1.0;
        if !pure {
            let mut accepted = false;
            while step > 1e-20 {
                let trial = profile.value(p + step * dir[0], q + step * dir[1]);
                if trial <= f + 1e-4 * step * slope {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                return outcome(p, q, value, grad_norm, decrement <= 1e-20);
            }
        }
        p += step * dir[0];
        q += step * dir[1];
    }
    outcome(p, q, value, grad_norm, decrement <= 1e-20)
}

/// Node count resolving the near-pole of `1/(My·y)` at eccentricity `u = |(p, q)|`.
fn nodes_for(u: f64, base: usize) -> usize {
    if u <= 0.0 {
        return base;
    }
    let strip = 0.5 * (1.0 / u.min(WALL)).acosh();
    let needed = (40.0 / strip).ceil() as usize;
    let needed = needed.div_ceil(8) * 8;
    needed.clamp(base, MAX_NODES.max(base))
}

/// Trapezoid node count for circle integrals against `1/(My·y)` and a profile of the
/// given order, never below `base`.
pub(crate) fn nodes_for_shape(shape: &EllipseShape, order: usize, base: usize) -> usize {
    let (l1, l2) = (shape.a1 * shape.a1, shape.a2 * shape.a2);
    let u = (l2 - l1).abs() / (l1 + l2);
    nodes_for(u, base.max((4 * order + 16).div_ceil(8) * 8))
}

/// Newton solve with the node count adapted to the solution's eccentricity.
fn solve_regularised(
    series: &AnisotropySeries,
    epsilon: f64,
    base_nodes: usize,
    start: [f64; 2],
) -> (NewtonOutcome, Profile) {
    let mut nodes = nodes_for(start[0].hypot(start[1]), base_nodes);
    loop {
        let profile = Profile::new(series, epsilon, nodes);
        let out = damped_newton(&profile, start);
        let wanted = nodes_for(out.p.hypot(out.q), base_nodes);
        if wanted <= nodes || nodes >= MAX_NODES {
            return (out, profile);
        }
        nodes = wanted;
    }
}

/// Canonical shape for `M = I + [[p, q], [q, -p]]`: `a1 ≤ a2`, `phi` the direction of the
/// minor axis, and `phi = 0` for circles.
fn shape_from_pq(p: f64, q: f64) -> EllipseShape {
    let u = p.hypot(q);
    let a1 = (1.0 - u).max(0.0).sqrt();
    let a2 = (1.0 + u).sqrt();
    if a2 - a1 <= 1e-9 {
        return EllipseShape::new(0.0, a1, a2);
    }
    let major = 0.5 * q.atan2(p);
    EllipseShape::new(major + FRAC_PI_2, a1, a2)
}

/// One step of the `ε`-continuation: `β` is the squared minor semi-axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationStep {
    pub epsilon: f64,
    pub beta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub quad_nodes: usize,
    /// Sup-norm bound on the system residual of a returned ellipse.
    pub residual_tol: f64,
    /// `β(ε)` below this value means collapse onto a segment.
    pub segment_threshold: f64,
    /// Regularisation levels tried first, in decreasing order.
    pub continuation: Vec<f64>,
    /// Extra halvings of `ε` allowed when the trace still heads towards collapse.
    pub max_extra_halvings: usize,
    pub classify_grid: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            quad_nodes: DEFAULT_QUAD_NODES,
            residual_tol: 1e-8,
            segment_threshold: 1e-3,
            continuation: vec![0.1, 0.05, 0.025, 0.0125, 0.00625],
            max_extra_halvings: 16,
            classify_grid: 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub prediction: MinimizerPrediction,
    pub classification: PsiClassification,
    /// Sup-norm of the system residual (zero for segments, which solve no 2×2 system).
    pub residual: f64,
    pub continuation: Vec<ContinuationStep>,
    /// `β(0)` extrapolated from the last continuation steps, when continuation ran.
    pub extrapolated_beta: Option<f64>,
}

/// Predicts the minimiser for the base kernel `-log|x| + κ` with confinement `|x|²`.
pub fn solve(series: &AnisotropySeries, opts: &SolveOptions) -> Result<MinimizerPrediction> {
    solve_detailed(series, opts).map(|r| r.prediction)
}

pub fn solve_detailed(series: &AnisotropySeries, opts: &SolveOptions) -> Result<SolveReport> {
    check_quad_nodes(opts.quad_nodes)?;
    let classification = classify_psi(series, opts.classify_grid);
    let base_nodes = opts
        .quad_nodes
        .max((4 * series.order() + 16).div_ceil(2) * 2);
    match classification.label {
        PsiLabel::Indefinite => Err(Error::OutsideConvexity(classification)),
        PsiLabel::StrictlyPositive => {
            let (out, profile) = solve_strict(series, base_nodes)?;
            let shape = shape_from_pq(out.p, out.q);
            let residual = sup_norm(&residual_from_samples(&profile.psi, &shape.matrix()));
            if !out.converged || residual > opts.residual_tol {
                return Err(Error::NonConvergence {
                    best_residual: residual,
                });
            }
            Ok(SolveReport {
                prediction: MinimizerPrediction::Ellipse(shape),
                classification,
                residual,
                continuation: Vec::new(),
                extrapolated_beta: None,
            })
        }
        PsiLabel::Degenerate => solve_degenerate(series, opts, base_nodes, classification),
    }
}

fn solve_strict(series: &AnisotropySeries, nodes: usize) -> Result<(NewtonOutcome, Profile)> {
    let (out, profile) = solve_regularised(series, 0.0, nodes, [0.0, 0.0]);
    if out.converged {
        return Ok((out, profile));
    }
    // Fallback multistart around the circle of eccentricity 1/2.
    let mut best: Option<(NewtonOutcome, Profile)> = None;
    for k in 0..16 {
        let phi = k as f64 * PI / 16.0;
        let start = [0.5 * (2.0 * phi).cos(), 0.5 * (2.0 * phi).sin()];
        let (o, prof) = solve_regularised(series, 0.0, nodes, start);
        if o.converged && best.as_ref().is_none_or(|(b, _)| o.value < b.value) {
            best = Some((o, prof));
        }
    }
    best.ok_or(Error::NonConvergence {
        best_residual: out.grad_norm,
    })
}

/// Polynomial (Neville) extrapolation of `points` to `x = 0`.
fn extrapolate_to_zero(points: &[(f64, f64)]) -> f64 {
    let mut ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let n = ys.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (points[i].0, points[i + level].0);
            ys[i] = (xj * ys[i] - xi * ys[i + 1]) / (xj - xi);
        }
    }
    ys[0]
}

fn solve_degenerate(
    series: &AnisotropySeries,
    opts: &SolveOptions,
    base_nodes: usize,
    classification: PsiClassification,
) -> Result<SolveReport> {
    let mut trace: Vec<ContinuationStep> = Vec::new();
    let mut history: Vec<(f64, [f64; 2])> = Vec::new();
    let mut start = [0.0, 0.0];
    let mut best_residual = f64::INFINITY;

    let monotone = |trace: &[ContinuationStep]| trace.windows(2).all(|w| w[1].beta < w[0].beta);

    let collapse = |trace: &[ContinuationStep], last: [f64; 2]| -> SolveReport {
        let major = 0.5 * last[1].atan2(last[0]);
        SolveReport {
            prediction: MinimizerPrediction::segment(major),
            classification,
            residual: 0.0,
            continuation: trace.to_vec(),
            extrapolated_beta: None,
        }
    };

    let mut step_eps = |eps: f64,
                        start: &mut [f64; 2],
                        trace: &mut Vec<ContinuationStep>,
                        history: &mut Vec<(f64, [f64; 2])>|
     -> Result<()> {
        let (out, profile) = solve_regularised(series, eps, base_nodes, *start);
        let shape = shape_from_pq(out.p, out.q);
        let residual = sup_norm(&residual_from_samples(&profile.psi, &shape.matrix()));
        best_residual = best_residual.min(residual);
        if !out.converged {
            return Err(Error::NonConvergence { best_residual });
        }
        *start = [out.p, out.q];
        trace.push(ContinuationStep {
            epsilon: eps,
            beta: shape.a1 * shape.a1,
            phi: shape.phi,
        });
        history.push((eps, [out.p, out.q]));
        Ok(())
    };

    for &eps in &opts.continuation {
        step_eps(eps, &mut start, &mut trace, &mut history)?;
        if trace.last().is_some_and(|s| s.beta < opts.segment_threshold) && monotone(&trace) {
            return Ok(collapse(&trace, start));
        }
    }

    let tail = |trace: &[ContinuationStep]| -> f64 {
        let k = trace.len().saturating_sub(3);
        let pts: Vec<(f64, f64)> = trace[k..].iter().map(|s| (s.epsilon, s.beta)).collect();
        extrapolate_to_zero(&pts)
    };
    let mut extrapolated = tail(&trace);

    if extrapolated < opts.segment_threshold && monotone(&trace) {
        let mut eps = trace.last().map_or(0.1, |s| s.epsilon);
        for _ in 0..opts.max_extra_halvings {
            eps *= 0.5;
            step_eps(eps, &mut start, &mut trace, &mut history)?;
            if !monotone(&trace) {
                break;
            }
            if trace.last().is_some_and(|s| s.beta < opts.segment_threshold) {
                return Ok(collapse(&trace, start));
            }
        }
        extrapolated = tail(&trace);
    }

    // Full-dimensional limit: polish directly on the unregularised profile.
    let (out, profile) = solve_regularised(series, 0.0, base_nodes, start);
    if out.converged && 1.0 - out.p.hypot(out.q) > 10.0 * (1.0 - WALL) {
        let shape = shape_from_pq(out.p, out.q);
        let residual = sup_norm(&residual_from_samples(&profile.psi, &shape.matrix()));
        if residual <= opts.residual_tol {
            return Ok(SolveReport {
                prediction: MinimizerPrediction::Ellipse(shape),
                classification,
                residual,
                continuation: trace,
                extrapolated_beta: Some(extrapolated),
            });
        }
        best_residual = best_residual.min(residual);
    }

    // Fall back to the extrapolated ellipse.
    let k = history.len().saturating_sub(3);
    let pts = &history[k..];
    let p0 = extrapolate_to_zero(&pts.iter().map(|(e, v)| (*e, v[0])).collect::<Vec<_>>());
    let q0 = extrapolate_to_zero(&pts.iter().map(|(e, v)| (*e, v[1])).collect::<Vec<_>>());
    let scale = if p0.hypot(q0) > WALL {
        WALL / p0.hypot(q0)
    } else {
        1.0
    };
    let shape = shape_from_pq(p0 * scale, q0 * scale);
    if shape.a1 * shape.a1 < opts.segment_threshold {
        return Err(Error::NonConvergence { best_residual });
    }
    let residual = sup_norm(&residual_from_samples(&profile.psi, &shape.matrix()));
    Ok(SolveReport {
        prediction: MinimizerPrediction::Ellipse(shape),
        classification,
        residual,
        continuation: trace,
        extrapolated_beta: Some(extrapolated),
    })
}
