//! Discrete n-particle energies and their minimisation.
//!
//! `E(x¹..xⁿ) = (1/n²) Σⱼ Σ_{k≠j} W(xʲ - xᵏ) + (1/n) Σⱼ V(xʲ)`.

use std::f64::consts::{SQRT_2, TAU};
use std::io::{self, Write};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::anisotropy::KernelSpec;
use crate::ellipse::{EllipseShape, Mat2};
use crate::error::{Error, Result};

type Points = Vec<[f64; 2]>;

/// Smallest pairwise distance a descent step may create.
pub const COLLISION_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleConfig {
    positions: Vec<[f64; 2]>,
}

impl ParticleConfig {
    pub fn new(positions: Vec<[f64; 2]>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::param("positions", "need at least one particle"));
        }
        if positions.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::param("positions", "coordinates must be finite"));
        }
        Ok(Self { positions })
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Uniform random start: the disk of radius √2, or the well itself for an elliptical well.
    pub fn random(n: usize, seed: u64, confinement: &Confinement) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = match confinement {
            Confinement::EllipticalWell(shape) => *shape,
            _ => EllipseShape::circle(SQRT_2),
        };
        let positions = (0..n)
            .map(|_| {
                let r = rng.random::<f64>().sqrt();
                let (s, c) = (TAU * rng.random::<f64>()).sin_cos();
                shape.map_unit_disk([r * c, r * s])
            })
            .collect();
        Self::new(positions)
    }
}

/// Confining potential `V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Confinement {
    /// `V(x) = |x|²`.
    Quadratic,
    /// `V(x) = |x|^p`.
    Power { p: f64 },
    /// `V = 0` on the ellipse and `+∞` outside, enforced by projection.
    EllipticalWell(EllipseShape),
}

impl Confinement {
    pub fn validate(&self) -> Result<()> {
        match self {
            Confinement::Quadratic => Ok(()),
            Confinement::Power { p } => {
                if p.is_finite() && *p > 0.0 {
                    Ok(())
                } else {
                    Err(Error::param("p", format!("power exponent must be positive, got {p}")))
                }
            }
            Confinement::EllipticalWell(shape) => shape.check(),
        }
    }

    pub fn value(&self, x: [f64; 2]) -> f64 {
        let r2 = x[0] * x[0] + x[1] * x[1];
        match self {
            Confinement::Quadratic => r2,
            Confinement::Power { p } => r2.powf(0.5 * p),
            Confinement::EllipticalWell(_) => 0.0,
        }
    }

    pub fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        match self {
            Confinement::Quadratic => [2.0 * x[0], 2.0 * x[1]],
            Confinement::Power { p } => {
                let r2 = x[0] * x[0] + x[1] * x[1];
                if r2 == 0.0 {
                    return [0.0, 0.0];
                }
                let f = p * r2.powf(0.5 * p - 1.0);
                [f * x[0], f * x[1]]
            }
            Confinement::EllipticalWell(_) => [0.0, 0.0],
        }
    }

    fn project(&self, x: [f64; 2]) -> [f64; 2] {
        match self {
            Confinement::EllipticalWell(shape) => shape.closest_point(x),
            _ => x,
        }
    }
}

/// `∇W(z) = -L z/|z|² + κ'(θ) z^⊥/|z|²`.
fn kernel_gradient(kernel: &KernelSpec, z: [f64; 2]) -> [f64; 2] {
    let r2 = z[0] * z[0] + z[1] * z[1];
    let (_, dk) = kernel.series.kappa_with_derivative_at(z);
    [
        (-kernel.log_strength * z[0] - dk * z[1]) / r2,
        (-kernel.log_strength * z[1] + dk * z[0]) / r2,
    ]
}

fn energy_with_guard(
    positions: &[[f64; 2]],
    kernel: &KernelSpec,
    confinement: &Confinement,
    guard: f64,
) -> f64 {
    let n = positions.len() as f64;
    let guard2 = guard * guard;
    let mut pair = 0.0;
    for (j, xj) in positions.iter().enumerate() {
        for xk in &positions[j + 1..] {
            let z = [xj[0] - xk[0], xj[1] - xk[1]];
            if z[0] * z[0] + z[1] * z[1] <= guard2 {
                return f64::INFINITY;
            }
            pair += kernel.eval(z);
        }
    }
    let conf: f64 = positions.iter().map(|&x| confinement.value(x)).sum();
    2.0 * pair / (n * n) + conf / n
}

/// Discrete energy; coincident particles give `+∞`.
pub fn discrete_energy(cfg: &ParticleConfig, kernel: &KernelSpec, confinement: &Confinement) -> f64 {
    energy_with_guard(&cfg.positions, kernel, confinement, 0.0)
}

fn gradient_of(
    positions: &[[f64; 2]],
    kernel: &KernelSpec,
    confinement: &Confinement,
) -> Result<Vec<[f64; 2]>> {
    let n = positions.len();
    let pair_scale = 2.0 / (n * n) as f64;
    let mut grad: Vec<[f64; 2]> = positions
        .iter()
        .map(|&x| {
            let g = confinement.gradient(x);
            [g[0] / n as f64, g[1] / n as f64]
        })
        .collect();
    for j in 0..n {
        for k in j + 1..n {
            let z = [
                positions[j][0] - positions[k][0],
                positions[j][1] - positions[k][1],
            ];
            if z == [0.0, 0.0] {
                return Err(Error::CoincidentParticles {
                    first: j,
                    second: k,
                });
            }
            let g = kernel_gradient(kernel, z);
            grad[j][0] += pair_scale * g[0];
            grad[j][1] += pair_scale * g[1];
            grad[k][0] -= pair_scale * g[0];
            grad[k][1] -= pair_scale * g[1];
        }
    }
    Ok(grad)
}

/// Exact gradient of [`discrete_energy`] with respect to each position.
pub fn discrete_gradient(
    cfg: &ParticleConfig,
    kernel: &KernelSpec,
    confinement: &Confinement,
) -> Result<Vec<[f64; 2]>> {
    gradient_of(&cfg.positions, kernel, confinement)
}

/// `(1/n) Σ xⱼ xⱼᵀ`.
pub fn second_moments(cfg: &ParticleConfig) -> Mat2 {
    let n = cfg.len() as f64;
    let mut m = [[0.0; 2]; 2];
    for x in &cfg.positions {
        m[0][0] += x[0] * x[0];
        m[0][1] += x[0] * x[1];
        m[1][1] += x[1] * x[1];
    }
    m[1][0] = m[0][1];
    m.map(|row| row.map(|v| v / n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentOptions {
    pub max_iters: usize,
    /// First trial step; later trials use the Barzilai-Borwein length.
    pub step0: f64,
    pub armijo_c: f64,
    pub shrink: f64,
    /// Bound on the sup-norm of the `n`-scaled (projected) gradient.
    pub tol: f64,
    pub seed: u64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            step0: 1e-2,
            armijo_c: 1e-4,
            shrink: 0.5,
            tol: 1e-6,
            seed: 42,
        }
    }
}

impl DescentOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::param("max_iters", "must be positive"));
        }
        if !(self.step0 > 0.0 && self.step0.is_finite()) {
            return Err(Error::param("step0", "must be positive"));
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return Err(Error::param("armijo_c", "must lie in (0, 1)"));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::param("shrink", "must lie in (0, 1)"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::param("tol", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub energy: f64,
    pub grad_norm: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentOutcome {
    pub config: ParticleConfig,
    pub log: Vec<IterationRecord>,
    pub converged: bool,
    /// The line search could not find an admissible step above `1e-14`.
    pub stalled: bool,
}

impl DescentOutcome {
    pub fn final_energy(&self) -> f64 {
        self.log.last().map_or(f64::NAN, |r| r.energy)
    }
}

/// Sup-norm of `x - P(x - n∇E)`, the stationarity measure of the projected descent.
fn stationarity(positions: &[[f64; 2]], grad: &[[f64; 2]], confinement: &Confinement) -> f64 {
    let n = positions.len() as f64;
    positions
        .iter()
        .zip(grad)
        .map(|(x, g)| {
            let y = confinement.project([x[0] - n * g[0], x[1] - n * g[1]]);
            (x[0] - y[0]).abs().max((x[1] - y[1]).abs())
        })
        .fold(0.0, f64::max)
}

/// Projected gradient descent with Barzilai-Borwein trial steps and Armijo backtracking.
pub fn minimize(
    cfg0: &ParticleConfig,
    kernel: &KernelSpec,
    confinement: &Confinement,
    opts: &DescentOptions,
) -> Result<DescentOutcome> {
    opts.validate()?;
    confinement.validate()?;
    if let Confinement::EllipticalWell(shape) = confinement {
        if let Some(x) = cfg0.positions.iter().find(|&&x| shape.gauge(x) > 1.0 + 1e-12) {
            return Err(Error::param(
                "positions",
                format!("start ({}, {}) lies outside the well", x[0], x[1]),
            ));
        }
    }
    let n = cfg0.len() as f64;
    let mut x = cfg0.positions.clone();
    let mut energy = energy_with_guard(&x, kernel, confinement, 0.0);
    let mut grad = gradient_of(&x, kernel, confinement)?;
    let mut residual = stationarity(&x, &grad, confinement);
    let mut log = vec![IterationRecord {
        iter: 0,
        energy,
        grad_norm: residual,
        step: 0.0,
    }];
    // Last accepted positions and gradient, for the Barzilai-Borwein step.
    let mut previous: Option<(Points, Points)> = None;
    let mut trial = vec![[0.0; 2]; x.len()];
    let mut converged = residual <= opts.tol;
    let mut stalled = false;

    for iter in 1..=opts.max_iters {
        if converged {
            break;
        }
        let mut step = opts.step0;
        if let Some((xp, gp)) = &previous {
            let (mut ss, mut sy) = (0.0, 0.0);
            for j in 0..x.len() {
                for c in 0..2 {
                    let s = x[j][c] - xp[j][c];
                    let y = n * (grad[j][c] - gp[j][c]);
                    ss += s * s;
                    sy += s * y;
                }
            }
            if sy > 0.0 && ss > 0.0 {
                step = (ss / sy).clamp(1e-10, 1e3);
            }
        }
        let accepted = loop {
            if step < 1e-14 {
                break None;
            }
            let mut slope = 0.0;
            for j in 0..x.len() {
                let y = confinement.project([
                    x[j][0] - step * n * grad[j][0],
                    x[j][1] - step * n * grad[j][1],
                ]);
                slope += grad[j][0] * (y[0] - x[j][0]) + grad[j][1] * (y[1] - x[j][1]);
                trial[j] = y;
            }
            let e = energy_with_guard(&trial, kernel, confinement, COLLISION_GUARD);
            if e.is_finite() && e <= energy + opts.armijo_c * slope && e < energy {
                break Some(e);
            }
            step *= opts.shrink;
        };
        let Some(e) = accepted else {
            stalled = true;
            break;
        };
        let new_grad = gradient_of(&trial, kernel, confinement)?;
        let old_x = std::mem::replace(&mut x, trial.clone());
        let old_g = std::mem::replace(&mut grad, new_grad);
        previous = Some((old_x, old_g));
        energy = e;
        residual = stationarity(&x, &grad, confinement);
        log.push(IterationRecord {
            iter,
            energy,
            grad_norm: residual,
            step,
        });
        converged = residual <= opts.tol;
    }
    Ok(DescentOutcome {
        config: ParticleConfig { positions: x },
        log,
        converged,
        stalled,
    })
}

/// Positions as CSV with header `x,y`.
pub fn write_positions_csv(cfg: &ParticleConfig, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "x,y")?;
    for p in &cfg.positions {
        writeln!(out, "{:.15e},{:.15e}", p[0], p[1])?;
    }
    Ok(())
}

/// Iteration log as CSV with header `iter,energy,grad_norm,step`.
pub fn write_log_csv(log: &[IterationRecord], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "iter,energy,grad_norm,step")?;
    for r in log {
        writeln!(out, "{},{:.15e},{:.15e},{:.15e}", r.iter, r.energy, r.grad_norm, r.step)?;
    }
    Ok(())
}
