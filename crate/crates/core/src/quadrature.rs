//! Quadrature building blocks shared by the solver, potential and verification code.
//!
//! Periodic integrands on the circle use the equispaced trapezoid rule. Integrands with
//! endpoint singularities use Gauss-Legendre panels on a geometrically graded mesh or
//! under a cosine substitution that removes square-root endpoint behaviour.

use std::f64::consts::{PI, TAU};
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Equispaced angles `2πk/n`, `k = 0..n`.
pub fn circle_nodes(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

/// Trapezoid rule for a `2π`-periodic integrand: `∫₀^{2π} f(θ) dθ`.
pub fn periodic_trapezoid(n: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let h = TAU / n as f64;
    (0..n).map(|k| f(h * k as f64)).sum::<f64>() * h
}

/// A fixed-degree Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct Legendre {
    pairs: Vec<(f64, f64)>,
}

impl Legendre {
    pub fn new(degree: usize) -> Self {
        let degree = NonZeroUsize::new(degree.max(1)).expect("degree clamped to at least one");
        let rule = GaussLegendre::new(degree);
        Self {
            pairs: rule.as_node_weight_pairs().to_vec(),
        }
    }

    pub fn degree(&self) -> usize {
        self.pairs.len()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn nodes_on(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.pairs
            .iter()
            .map(|&(x, w)| (mid + half * x, half * w))
            .collect()
    }

    /// `∫_a^b f`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self
            .pairs
            .iter()
            .map(|&(x, w)| w * f(mid + half * x))
            .sum::<f64>()
    }

    /// `∫_a^b f` over `panels` equal sub-intervals.
    pub fn integrate_panels(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: impl FnMut(f64) -> f64,
    ) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|i| {
                let lo = a + h * i as f64;
                self.integrate(lo, lo + h, &mut f)
            })
            .sum()
    }

    /// `∫_a^b f` on a mesh graded geometrically towards `a`, for integrands with an
    /// integrable (e.g. logarithmic) singularity at `a`. The callback receives the
    /// offset `t - a`, which stays accurate close to the singular end.
    pub fn integrate_graded(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        const RATIO: f64 = 0.25;
        const LEVELS: usize = 27;
        let len = b - a;
        if len == 0.0 {
            return 0.0;
        }
        let mut total = 0.0;
        let mut hi = len;
        for _ in 0..LEVELS {
            let lo = hi * RATIO;
            total += self.integrate(lo, hi, &mut f);
            hi = lo;
        }
        total + self.integrate(0.0, hi, &mut f)
    }

    /// Nodes and weights of [`Legendre::integrate_cosine_map`].
    pub fn cosine_map_nodes(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let len = b - a;
        let panels = panels.max(1);
        let h = 1.0 / panels as f64;
        let mut out = Vec::with_capacity(panels * self.degree());
        for i in 0..panels {
            for (v, w) in self.nodes_on(h * i as f64, h * (i + 1) as f64) {
                let t = a + 0.5 * len * (1.0 - (PI * v).cos());
                out.push((t, w * 0.5 * len * PI * (PI * v).sin()));
            }
        }
        out
    }

    /// `∫_a^b f` under the substitution `t = a + (b-a)(1 - cos πv)/2`, which turns
    /// square-root endpoint behaviour at both ends into analytic behaviour in `v`.
    pub fn integrate_cosine_map(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: impl FnMut(f64) -> f64,
    ) -> f64 {
        let len = b - a;
        self.integrate_panels(0.0, 1.0, panels, |v| {
            let t = a + 0.5 * len * (1.0 - (PI * v).cos());
            f(t) * 0.5 * len * PI * (PI * v).sin()
        })
    }
}
