//! Even anisotropies `κ` on the circle and the angular profile `Ψ̂` of the kernel's
//! Fourier transform.
//!
//! `κ(θ) = Σₙ a₂ₙ cos 2nθ + b₂ₙ sin 2nθ` (no constant term), and the Fourier transform of
//! `W = -log|x| + κ` away from the origin is `Ψ̂(ξ/|ξ|)/|ξ|²` with
//! `Ψ̂(θ) = 1 + Σₙ (-1)ⁿ 2n (a₂ₙ cos 2nθ + b₂ₙ sin 2nθ)`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Positivity threshold used by [`classify_psi`].
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Sampling resolution used to expand the elastic preset.
pub const ELASTIC_SAMPLES: usize = 512;

/// Truncated even Fourier series of an anisotropy.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AnisotropySeries {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl AnisotropySeries {
    /// Builds a series from `a₂ₙ` and `b₂ₙ` (index 0 holds `n = 1`). The shorter
    /// sequence is padded with zeros.
    pub fn new(mut cos: Vec<f64>, mut sin: Vec<f64>) -> Result<Self> {
        if let Some(bad) = cos.iter().chain(sin.iter()).find(|c| !c.is_finite()) {
            return Err(Error::param("coefficients", format!("non-finite value {bad}")));
        }
        let n = cos.len().max(sin.len());
        cos.resize(n, 0.0);
        sin.resize(n, 0.0);
        Ok(Self { cos, sin })
    }

    /// The zero anisotropy (pure Coulomb interaction).
    pub fn empty() -> Self {
        Self::default()
    }

    /// Series with a single cosine harmonic `a₂ₙ = value`.
    pub fn cos_harmonic(n: usize, value: f64) -> Self {
        assert!(n >= 1, "harmonic index starts at 1");
        let mut cos = vec![0.0; n];
        cos[n - 1] = value;
        Self {
            sin: vec![0.0; n],
            cos,
        }
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.cos.len()
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    pub fn is_empty(&self) -> bool {
        self.cos.iter().chain(&self.sin).all(|&c| c == 0.0)
    }

    /// `true` when every `b₂ₙ` vanishes, i.e. the kernel is symmetric in both axes.
    pub fn is_axis_symmetric(&self) -> bool {
        self.sin.iter().all(|&b| b == 0.0)
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            cos: self.cos.iter().map(|c| c * factor).collect(),
            sin: self.sin.iter().map(|c| c * factor).collect(),
        }
    }

    /// Drops trailing harmonics whose contribution `2n·max(|a₂ₙ|, |b₂ₙ|)` to `Ψ̂` is at
    /// most `tol`.
    pub fn truncated(&self, tol: f64) -> Self {
        let keep = self
            .harmonics()
            .filter(|(n, (a, b))| 2.0 * *n as f64 * a.abs().max(b.abs()) > tol)
            .map(|(n, _)| n)
            .last()
            .unwrap_or(0);
        Self {
            cos: self.cos[..keep].to_vec(),
            sin: self.sin[..keep].to_vec(),
        }
    }

    /// The anisotropy `θ ↦ κ(θ - angle)`.
    pub fn rotated(&self, angle: f64) -> Self {
        let mut cos = Vec::with_capacity(self.order());
        let mut sin = Vec::with_capacity(self.order());
        for (n, (&a, &b)) in self.harmonics() {
            let (s, c) = (2.0 * n as f64 * angle).sin_cos();
            cos.push(a * c - b * s);
            sin.push(a * s + b * c);
        }
        Self { cos, sin }
    }

    fn harmonics(&self) -> impl Iterator<Item = (usize, (&f64, &f64))> {
        (1..).zip(self.cos.iter().zip(self.sin.iter()))
    }

    /// `Σₙ wₙ (a₂ₙ cos 2nθ + b₂ₙ sin 2nθ)` using the rotation recurrence for the harmonics.
    fn weighted_sum(&self, theta: f64, weight: impl Fn(usize) -> f64) -> f64 {
        let (s1, c1) = (2.0 * theta).sin_cos();
        let (mut c, mut s) = (c1, s1);
        let mut acc = 0.0;
        for (n, (&a, &b)) in self.harmonics() {
            acc += weight(n) * (a * c + b * s);
            let next_c = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = next_c;
        }
        acc
    }

    /// Same as [`Self::weighted_sum`] with the harmonic rotated by a quarter period, which
    /// gives derivatives: `Σ wₙ (-a₂ₙ sin 2nθ + b₂ₙ cos 2nθ)`.
    fn weighted_quadrature_sum(&self, theta: f64, weight: impl Fn(usize) -> f64) -> f64 {
        let (s1, c1) = (2.0 * theta).sin_cos();
        let (mut c, mut s) = (c1, s1);
        let mut acc = 0.0;
        for (n, (&a, &b)) in self.harmonics() {
            acc += weight(n) * (-a * s + b * c);
            let next_c = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = next_c;
        }
        acc
    }

    pub fn kappa(&self, theta: f64) -> f64 {
        self.weighted_sum(theta, |_| 1.0)
    }

    pub fn kappa_derivative(&self, theta: f64) -> f64 {
        self.weighted_quadrature_sum(theta, |n| 2.0 * n as f64)
    }

    /// `κ` evaluated at the direction of a non-zero vector, without trigonometric calls.
    pub fn kappa_at(&self, z: [f64; 2]) -> f64 {
        self.kappa_with_derivative_at(z).0
    }

    /// `(κ, dκ/dθ)` at the direction of a non-zero vector.
    pub fn kappa_with_derivative_at(&self, z: [f64; 2]) -> (f64, f64) {
        let r2 = z[0] * z[0] + z[1] * z[1];
        let c1 = (z[0] * z[0] - z[1] * z[1]) / r2;
        let s1 = 2.0 * z[0] * z[1] / r2;
        let (mut c, mut s) = (c1, s1);
        let (mut value, mut deriv) = (0.0, 0.0);
        for (n, (&a, &b)) in self.harmonics() {
            value += a * c + b * s;
            deriv += 2.0 * n as f64 * (-a * s + b * c);
            let next_c = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = next_c;
        }
        (value, deriv)
    }

    /// `Ψ̂(θ)`.
    pub fn psi_hat(&self, theta: f64) -> f64 {
        1.0 + self.weighted_sum(theta, stein_factor)
    }

    pub fn psi_hat_derivative(&self, theta: f64) -> f64 {
        self.weighted_quadrature_sum(theta, |n| stein_factor(n) * 2.0 * n as f64)
    }

    pub fn psi_hat_second_derivative(&self, theta: f64) -> f64 {
        -self.weighted_sum(theta, |n| stein_factor(n) * 4.0 * (n * n) as f64)
    }

    /// `Ψ̂` sampled at `n` equispaced angles `2πk/n`.
    pub fn psi_hat_on_circle(&self, n: usize) -> Vec<f64> {
        crate::quadrature::circle_nodes(n)
            .into_iter()
            .map(|t| self.psi_hat(t))
            .collect()
    }

    /// `κ` sampled at `n` equispaced angles `2πk/n`.
    pub fn kappa_on_circle(&self, n: usize) -> Vec<f64> {
        crate::quadrature::circle_nodes(n)
            .into_iter()
            .map(|t| self.kappa(t))
            .collect()
    }
}

/// Fourier multiplier of the `2n`-th harmonic: `(-1)ⁿ 2n`.
pub fn stein_factor(n: usize) -> f64 {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * 2.0 * n as f64
}

pub fn eval_kappa(series: &AnisotropySeries, theta: f64) -> f64 {
    series.kappa(theta)
}

pub fn eval_kappa_angular_derivative(series: &AnisotropySeries, theta: f64) -> f64 {
    series.kappa_derivative(theta)
}

pub fn eval_psi_hat(series: &AnisotropySeries, theta: f64) -> f64 {
    series.psi_hat(theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsiLabel {
    StrictlyPositive,
    Degenerate,
    Indefinite,
}

impl PsiLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PsiLabel::StrictlyPositive => "strictly-positive",
            PsiLabel::Degenerate => "degenerate",
            PsiLabel::Indefinite => "indefinite",
        }
    }

    pub fn from_min(min_value: f64) -> Self {
        if min_value > POSITIVITY_TOL {
            PsiLabel::StrictlyPositive
        } else if min_value >= -POSITIVITY_TOL {
            PsiLabel::Degenerate
        } else {
            PsiLabel::Indefinite
        }
    }

    /// Whether the energy is convex, i.e. `Ψ̂ ≥ 0`.
    pub fn is_convex(self) -> bool {
        !matches!(self, PsiLabel::Indefinite)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiClassification {
    pub min_value: f64,
    /// Minimising direction in `[0, π)`.
    pub argmin_angle: f64,
    pub label: PsiLabel,
}

/// Minimum of `Ψ̂` over the circle and the resulting positivity label.
///
/// The minimum is located on a uniform grid over `[0, π)` (`Ψ̂` is π-periodic), refined by a
/// three-point parabola through the best grid point and its neighbours, then polished with a
/// few Newton steps on `Ψ̂'`. `grid_size` is raised to `4N + 16` when smaller.
pub fn classify_psi(series: &AnisotropySeries, grid_size: usize) -> PsiClassification {
    let m = grid_size.max(4 * series.order() + 16);
    let h = PI / m as f64;
    let values: Vec<f64> = (0..m).map(|k| series.psi_hat(h * k as f64)).collect();
    let (k_min, &f0) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    let fm = values[(k_min + m - 1) % m];
    let fp = values[(k_min + 1) % m];
    let curvature = fp - 2.0 * f0 + fm;
    let mut theta = h * k_min as f64;
    let mut best = f0;
    if curvature > 0.0 {
        let shift = 0.5 * (fm - fp) / curvature;
        let candidate = theta + shift * h;
        let value = series.psi_hat(candidate);
        if value <= best {
            theta = candidate;
            best = value;
        }
    }
    for _ in 0..8 {
        let d1 = series.psi_hat_derivative(theta);
        let d2 = series.psi_hat_second_derivative(theta);
        if d2 <= 0.0 {
            break;
        }
        let candidate = theta - d1 / d2;
        if (candidate - theta).abs() > h {
            break;
        }
        let value = series.psi_hat(candidate);
        if value > best {
            break;
        }
        let done = (candidate - theta).abs() < 1e-15;
        theta = candidate;
        best = value;
        if done {
            break;
        }
    }
    PsiClassification {
        min_value: best,
        argmin_angle: theta.rem_euclid(PI),
        label: PsiLabel::from_min(best),
    }
}

/// Fourier analysis of an even anisotropy sampled at `m` equispaced angles on `[0, 2π)`.
///
/// Keeps `N = m/4` harmonics and drops the mean. The harmonic at the Nyquist index `m/2`
/// uses the halved weight so that trigonometric polynomials of degree `< m/2` are
/// reproduced exactly at the sample points.
pub fn series_from_samples(values: &[f64]) -> Result<AnisotropySeries> {
    let m = values.len();
    if !m.is_multiple_of(2) {
        return Err(Error::Samples(format!("sample count must be even, got {m}")));
    }
    if m < 8 {
        return Err(Error::Samples(format!("need at least 8 samples, got {m}")));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Samples(format!("non-finite sample {bad}")));
    }
    let half = m / 2;
    for k in 0..half {
        let gap = (values[k] - values[k + half]).abs();
        if gap > 1e-10 {
            return Err(Error::Samples(format!(
                "samples are not even on the circle: value at index {k} differs from index {} by {gap:.3e}",
                k + half
            )));
        }
    }
    let table: Vec<(f64, f64)> = (0..m)
        .map(|j| (TAU * j as f64 / m as f64).sin_cos())
        .collect();
    let order = m / 4;
    let mut cos = Vec::with_capacity(order);
    let mut sin = Vec::with_capacity(order);
    for n in 1..=order {
        let freq = 2 * n;
        let (mut a, mut b) = (0.0, 0.0);
        for (k, v) in values.iter().enumerate() {
            let (s, c) = table[(freq * k) % m];
            a += v * c;
            b += v * s;
        }
        let weight = if freq == half { 1.0 } else { 2.0 } / m as f64;
        cos.push(a * weight);
        sin.push(if freq == half { 0.0 } else { b * weight });
    }
    Ok(AnisotropySeries { cos, sin })
}

/// Interaction kernel `W(x) = -L log|x| + κ(x)` with log strength `L ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub log_strength: f64,
    pub series: AnisotropySeries,
}

impl KernelSpec {
    pub fn new(log_strength: f64, series: AnisotropySeries) -> Result<Self> {
        if !log_strength.is_finite() || log_strength < 1.0 {
            return Err(Error::param(
                "log_strength",
                format!("must be finite and at least 1, got {log_strength}"),
            ));
        }
        Ok(Self {
            log_strength,
            series,
        })
    }

    /// Base kernel `-log|x| + κ(x)`.
    pub fn base(series: AnisotropySeries) -> Self {
        Self {
            log_strength: 1.0,
            series,
        }
    }

    pub fn coulomb() -> Self {
        Self::base(AnisotropySeries::empty())
    }

    /// `W(z)` for `z ≠ 0`.
    pub fn eval(&self, z: [f64; 2]) -> f64 {
        let r2 = z[0] * z[0] + z[1] * z[1];
        -0.5 * self.log_strength * r2.ln() + self.series.kappa_at(z)
    }

    /// Angular profile of this kernel: `L + κ̂`.
    pub fn psi_hat(&self, theta: f64) -> f64 {
        self.log_strength - 1.0 + self.series.psi_hat(theta)
    }

    /// Anisotropy of the kernel `W / L`, whose profile has unit mean.
    pub fn normalized_series(&self) -> AnisotropySeries {
        self.series.scaled(1.0 / self.log_strength)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum Preset {
    Coulomb,
    /// `κ(x) = α x₁²/|x|²` (mean removed).
    Dislocation { alpha: f64 },
    /// Cubic-crystal edge dislocations with material constants `b > a > 0`.
    Elastic { a: f64, b: f64 },
}

/// The elastic anisotropy at direction `θ`.
pub fn elastic_kappa(a: f64, b: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (s * s, c * c);
    let sum = a + b;
    let diff = b - a;
    -0.25 * sum / a * (c2 + sum * sum * s2).ln() + 0.25 * diff / a * (c2 + diff * diff * s2).ln()
}

pub fn make_preset(preset: Preset) -> Result<KernelSpec> {
    let series = match preset {
        Preset::Coulomb => AnisotropySeries::empty(),
        Preset::Dislocation { alpha } => {
            if !alpha.is_finite() {
                return Err(Error::param("alpha", "must be finite"));
            }
            AnisotropySeries::cos_harmonic(1, 0.5 * alpha)
        }
        Preset::Elastic { a, b } => {
            if !(a.is_finite() && b.is_finite() && a > 0.0 && b > a) {
                return Err(Error::param(
                    "elastic",
                    format!("material constants need b > a > 0, got a = {a}, b = {b}"),
                ));
            }
            let samples: Vec<f64> = crate::quadrature::circle_nodes(ELASTIC_SAMPLES)
                .into_iter()
                .map(|t| elastic_kappa(a, b, t))
                .collect();
            series_from_samples(&samples)?.truncated(1e-16)
        }
    };
    Ok(KernelSpec::base(series))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dislocation(alpha: f64) -> AnisotropySeries {
        make_preset(Preset::Dislocation { alpha }).unwrap().series
    }

    #[test]
    fn kappa_examples() {
        let s = AnisotropySeries::cos_harmonic(1, 0.25);
        assert_abs_diff_eq!(eval_kappa(&s, 0.0), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(eval_kappa(&s, PI), eval_kappa(&s, 0.0), epsilon = 1e-15);
        assert_eq!(eval_kappa(&AnisotropySeries::empty(), 1.234), 0.0);
    }

    #[test]
    fn kappa_derivative_examples() {
        let s = AnisotropySeries::cos_harmonic(1, 0.25);
        assert_abs_diff_eq!(eval_kappa_angular_derivative(&s, 0.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            eval_kappa_angular_derivative(&s, PI / 4.0),
            -0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn kappa_at_vector_matches_angle_form() {
        let s = AnisotropySeries::new(vec![0.3, -0.1, 0.05], vec![0.2, 0.0, -0.07]).unwrap();
        for &t in &[0.1f64, 1.3, 2.9, 4.4, -0.7] {
            let (v, d) = s.kappa_with_derivative_at([2.5 * t.cos(), 2.5 * t.sin()]);
            assert_abs_diff_eq!(v, s.kappa(t), epsilon = 1e-14);
            assert_abs_diff_eq!(d, s.kappa_derivative(t), epsilon = 1e-13);
        }
    }

    #[test]
    fn psi_hat_examples() {
        assert_abs_diff_eq!(eval_psi_hat(&dislocation(0.5), 0.0), 0.5, epsilon = 1e-15);
        assert_eq!(eval_psi_hat(&AnisotropySeries::empty(), 0.7), 1.0);
        let s = AnisotropySeries::cos_harmonic(2, 1.0);
        assert_abs_diff_eq!(eval_psi_hat(&s, 0.0), 5.0, epsilon = 1e-14);
    }

    #[test]
    fn psi_hat_derivatives_match_finite_differences() {
        let s = AnisotropySeries::new(vec![0.1, 0.02, -0.01], vec![0.05, 0.03, 0.0]).unwrap();
        let h = 1e-5;
        for &t in &[0.2, 1.1, 2.5] {
            let fd1 = (s.psi_hat(t + h) - s.psi_hat(t - h)) / (2.0 * h);
            let fd2 = (s.psi_hat_derivative(t + h) - s.psi_hat_derivative(t - h)) / (2.0 * h);
            assert_abs_diff_eq!(s.psi_hat_derivative(t), fd1, epsilon = 1e-8);
            assert_abs_diff_eq!(s.psi_hat_second_derivative(t), fd2, epsilon = 1e-7);
        }
    }

    #[test]
    fn classification_examples() {
        let c = classify_psi(&dislocation(0.5), 256);
        assert_eq!(c.label, PsiLabel::StrictlyPositive);
        assert_abs_diff_eq!(c.min_value, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(c.argmin_angle, 0.0, epsilon = 1e-8);

        let c = classify_psi(&dislocation(1.0), 256);
        assert_eq!(c.label, PsiLabel::Degenerate);
        assert_abs_diff_eq!(c.min_value, 0.0, epsilon = 1e-12);

        let c = classify_psi(&AnisotropySeries::cos_harmonic(2, 1.0), 256);
        assert_eq!(c.label, PsiLabel::Indefinite);
        assert_abs_diff_eq!(c.min_value, -3.0, epsilon = 1e-12);
    }

    #[test]
    fn classification_refines_off_grid_minimum() {
        // Ψ̂ = 1 - 0.5 cos(2(θ - 0.3)), minimum 0.5 at θ = 0.3, not a grid point.
        let s = dislocation(0.5).rotated(0.3);
        let c = classify_psi(&s, 64);
        assert_abs_diff_eq!(c.argmin_angle, 0.3, epsilon = 1e-10);
        assert_abs_diff_eq!(c.min_value, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn samples_of_pure_harmonic() {
        let v: Vec<f64> = crate::quadrature::circle_nodes(16)
            .iter()
            .map(|t| (2.0 * t).cos())
            .collect();
        let s = series_from_samples(&v).unwrap();
        assert_eq!(s.order(), 4);
        assert_abs_diff_eq!(s.cos_coeffs()[0], 1.0, epsilon = 1e-14);
        for k in 1..4 {
            assert_abs_diff_eq!(s.cos_coeffs()[k], 0.0, epsilon = 1e-14);
        }
        for b in s.sin_coeffs() {
            assert_abs_diff_eq!(*b, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn constant_samples_give_empty_series() {
        let s = series_from_samples(&[2.5; 12]).unwrap();
        assert!(s.cos_coeffs().iter().all(|c| c.abs() < 1e-15));
        assert!(s.sin_coeffs().iter().all(|c| c.abs() < 1e-15));
    }

    #[test]
    fn nyquist_harmonic_is_reconstructed() {
        // cos 8θ sampled at m = 16 sits at the Nyquist index.
        let nodes = crate::quadrature::circle_nodes(16);
        let v: Vec<f64> = nodes.iter().map(|t| 0.7 * (8.0 * t).cos() + 0.2).collect();
        let s = series_from_samples(&v).unwrap();
        for (t, x) in nodes.iter().zip(&v) {
            assert_abs_diff_eq!(s.kappa(*t), x - 0.2, epsilon = 1e-13);
        }
    }

    #[test]
    fn sample_errors_name_the_precondition() {
        let err = series_from_samples(&[0.0; 9]).unwrap_err();
        assert!(err.to_string().contains("even"));
        let err = series_from_samples(&[0.0; 6]).unwrap_err();
        assert!(err.to_string().contains("at least 8"));
        let mut v = vec![0.0; 8];
        v[1] = 1.0;
        let err = series_from_samples(&v).unwrap_err();
        assert!(err.to_string().contains("not even"));
    }

    #[test]
    fn elastic_resolution_doubling() {
        let sample = |m: usize| {
            let v: Vec<f64> = crate::quadrature::circle_nodes(m)
                .iter()
                .map(|&t| elastic_kappa(0.5, 1.0, t))
                .collect();
            series_from_samples(&v).unwrap()
        };
        let (coarse, fine) = (sample(256), sample(512));
        for k in 0..fine.order() {
            let c = coarse.cos_coeffs().get(k).copied().unwrap_or(0.0);
            assert_abs_diff_eq!(c, fine.cos_coeffs()[k], epsilon = 1e-10);
            let s = coarse.sin_coeffs().get(k).copied().unwrap_or(0.0);
            assert_abs_diff_eq!(s, fine.sin_coeffs()[k], epsilon = 1e-10);
        }
    }

    #[test]
    fn presets() {
        let d = make_preset(Preset::Dislocation { alpha: 1.0 }).unwrap();
        assert_eq!(d.series.cos_coeffs(), &[0.5]);
        let c = make_preset(Preset::Coulomb).unwrap();
        for t in [0.0, 0.4, 2.0] {
            assert_eq!(c.series.psi_hat(t), 1.0);
        }
        assert!(make_preset(Preset::Elastic { a: 1.0, b: 1.0 }).is_err());
        assert!(make_preset(Preset::Elastic { a: 0.0, b: 1.0 }).is_err());
    }

    #[test]
    fn elastic_profile_vanishes_along_first_axis() {
        // Ψ̂(0) = 0 for every b > a > 0, so the elastic kernel is always degenerate.
        for (a, b) in [(0.5, 1.0), (0.5, 1.2), (0.2, 0.9), (1.0, 3.0)] {
            let k = make_preset(Preset::Elastic { a, b }).unwrap();
            let c = classify_psi(&k.series, 1024);
            assert_eq!(c.label, PsiLabel::Degenerate, "a = {a}, b = {b}");
            assert_abs_diff_eq!(c.argmin_angle.min(PI - c.argmin_angle), 0.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn kernel_spec_validation() {
        assert!(KernelSpec::new(0.5, AnisotropySeries::empty()).is_err());
        assert!(KernelSpec::new(f64::NAN, AnisotropySeries::empty()).is_err());
        let k = KernelSpec::new(2.0, AnisotropySeries::cos_harmonic(1, 0.5)).unwrap();
        assert_abs_diff_eq!(k.psi_hat(0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.eval([2.0, 0.0]), -2.0 * 2f64.ln() + 0.5, epsilon = 1e-14);
    }
}
