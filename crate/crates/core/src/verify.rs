//! Fourier-side checks of the interaction energy on smooth signed measures.
//!
//! For a signed measure `ν` of zero mass, `∬ W(x-y) dν dν = 2π ∫ Ψ̂(ξ/|ξ|) |ν̂(ξ)|² / |ξ|² dξ`
//! with `f̂(ξ) = (1/2π) ∫ f(x) e^{-iξ·x} dx`. Both sides are evaluated independently for
//! differences of Gaussian blobs, whose autocorrelations and transforms are explicit.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::anisotropy::KernelSpec;
use crate::error::{Error, Result};
use crate::particles::ParticleConfig;
use crate::quadrature::Legendre;

/// `ν = g_σ(· - p) - g_σ(· - q)` with `g_σ` the isotropic Gaussian of variance `σ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBlobPair {
    pub p: [f64; 2],
    pub q: [f64; 2],
    pub sigma: f64,
}

impl Default for GaussianBlobPair {
    fn default() -> Self {
        Self {
            p: [1.0, 0.0],
            q: [-1.0, 0.0],
            sigma: 0.5,
        }
    }
}

impl GaussianBlobPair {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::param("sigma", format!("must be positive, got {}", self.sigma)));
        }
        if self.p.iter().chain(&self.q).any(|v| !v.is_finite()) {
            return Err(Error::param("blobs", "centres must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadOptions {
    /// Gauss-Legendre degree per radial panel.
    pub radial_degree: usize,
    /// Minimum number of trapezoid angles.
    pub angles: usize,
    /// Radial panels per blob width.
    pub panels_per_sigma: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            radial_degree: 16,
            angles: 512,
            panels_per_sigma: 2,
        }
    }
}

impl QuadOptions {
    /// Twice the resolution in every direction.
    pub fn refined(&self) -> Self {
        Self {
            radial_degree: 2 * self.radial_degree,
            angles: 2 * self.angles,
            panels_per_sigma: 2 * self.panels_per_sigma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParsevalReport {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_gap: f64,
}

/// `K(m) = ∫ W(z) G_s(z - m) dz` for the isotropic Gaussian `G_s` of variance `s²`,
/// in polar coordinates about the singularity of `W`.
fn smoothed_kernel(kernel: &KernelSpec, m: [f64; 2], s: f64, opts: &QuadOptions) -> f64 {
    let dist = m[0].hypot(m[1]);
    let r_max = dist + 12.0 * s;
    // Enough angles to resolve exp(r|m| cos(θ - φ)/s²) on the whole radial range.
    let peak = (dist * r_max).sqrt() / s;
    let angles = opts.angles.max((16.0 * (1.0 + peak)).ceil() as usize).min(1 << 14);
    let thetas: Vec<(f64, f64, f64)> = (0..angles)
        .map(|k| {
            let t = TAU * k as f64 / angles as f64;
            let (sn, cs) = t.sin_cos();
            (cs, sn, kernel.series.kappa(t))
        })
        .collect();
    let inv2s2 = 0.5 / (s * s);
    let norm = 1.0 / (TAU * s * s);
    let h = TAU / angles as f64;
    let ring = |r: f64| -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        let log_r = r.ln();
        let sum: f64 = thetas
            .iter()
            .map(|&(cs, sn, kappa)| {
                let dx = r * cs - m[0];
                let dy = r * sn - m[1];
                (-kernel.log_strength * log_r + kappa) * (-(dx * dx + dy * dy) * inv2s2).exp()
            })
            .sum();
        r * sum * h * norm
    };
    let rule = Legendre::new(opts.radial_degree);
    let inner = s.min(r_max);
    let mut total = rule.integrate_graded(0.0, inner, ring);
    let panels = ((r_max - inner) / s * opts.panels_per_sigma as f64).ceil() as usize;
    total += rule.integrate_panels(inner, r_max, panels.max(1), ring);
    total
}

/// Both sides of the energy identity for a pair of Gaussian blobs.
pub fn parseval_gap(
    kernel: &KernelSpec,
    blobs: &GaussianBlobPair,
    opts: &QuadOptions,
) -> Result<ParsevalReport> {
    blobs.validate()?;
    let d = [blobs.p[0] - blobs.q[0], blobs.p[1] - blobs.q[1]];
    if d == [0.0, 0.0] {
        return Ok(ParsevalReport {
            lhs: 0.0,
            rhs: 0.0,
            rel_gap: 0.0,
        });
    }
    let sigma = blobs.sigma;
    // The autocorrelation of ν is 2G(z) - G(z - d) - G(z + d) with G of variance 2σ².
    let s = std::f64::consts::SQRT_2 * sigma;
    let k0 = smoothed_kernel(kernel, [0.0, 0.0], s, opts);
    let kd = smoothed_kernel(kernel, d, s, opts);
    let lhs = 2.0 * (k0 - kd);
    let rhs = fourier_side(kernel, d, sigma, opts);
    let rel_gap = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
    Ok(ParsevalReport { lhs, rhs, rel_gap })
}

/// `(1/π) ∮ Ψ̂(θ) ∫₀^{12/σ} e^{-σ²ρ²} (1 - cos(ρ e_θ·d)) / ρ dρ dθ`.
fn fourier_side(kernel: &KernelSpec, d: [f64; 2], sigma: f64, opts: &QuadOptions) -> f64 {
    let rho_max = 12.0 / sigma;
    let dist = d[0].hypot(d[1]);
    let rule = Legendre::new(opts.radial_degree);
    // One panel per half oscillation of cos(ρ|d|), at least 8 per blob scale.
    let panels = ((rho_max * dist / PI).ceil() as usize).max(8) * opts.panels_per_sigma;
    let angles = opts.angles;
    let h = TAU / angles as f64;
    let sum: f64 = (0..angles)
        .map(|k| {
            let t = h * k as f64;
            let (sn, cs) = t.sin_cos();
            let b = cs * d[0] + sn * d[1];
            let radial = rule.integrate_panels(0.0, rho_max, panels, |rho| {
                if rho == 0.0 {
                    return 0.0;
                }
                let half = 0.5 * rho * b;
                (-sigma * sigma * rho * rho).exp() * 2.0 * half.sin().powi(2) / rho
            });
            kernel.psi_hat(t) * radial
        })
        .sum();
    sum * h / PI
}

/// Interaction energies `∬ W dμ_t dμ_t` along `μ_t = (1-t)μ_A + tμ_B`, `t ∈ {0, ¼, ½, ¾, 1}`,
/// where `μ_A`, `μ_B` are the empirical measures of the configurations smoothed by `g_σ`.
pub fn convexity_probe(
    kernel: &KernelSpec,
    a: &ParticleConfig,
    b: &ParticleConfig,
    sigma: f64,
    opts: &QuadOptions,
) -> Result<[f64; 5]> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::param("sigma", format!("must be positive, got {sigma}")));
    }
    let centres: Vec<[f64; 2]> = a.positions().iter().chain(b.positions()).copied().collect();
    let na = a.len();
    let s = std::f64::consts::SQRT_2 * sigma;
    let m = centres.len();
    // Pairwise smoothed interactions; K(m) = K(-m) since W is even.
    let mut table = vec![0.0; m * m];
    let k0 = smoothed_kernel(kernel, [0.0, 0.0], s, opts);
    for j in 0..m {
        table[j * m + j] = k0;
        for k in j + 1..m {
            let diff = [centres[j][0] - centres[k][0], centres[j][1] - centres[k][1]];
            let v = if diff == [0.0, 0.0] {
                k0
            } else {
                smoothed_kernel(kernel, diff, s, opts)
            };
            table[j * m + k] = v;
            table[k * m + j] = v;
        }
    }
    let mut out = [0.0; 5];
    for (i, slot) in out.iter_mut().enumerate() {
        let t = i as f64 / 4.0;
        let w: Vec<f64> = (0..m)
            .map(|j| {
                if j < na {
                    (1.0 - t) / na as f64
                } else {
                    t / b.len() as f64
                }
            })
            .collect();
        let mut e = 0.0;
        for j in 0..m {
            for k in 0..m {
                e += w[j] * w[k] * table[j * m + k];
            }
        }
        *slot = e;
    }
    Ok(out)
}
