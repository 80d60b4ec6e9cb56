//! The integral ∫₀^∞ J₁(r) sin(αr)/r dr, closed form against brute-force quadrature.

use anisolog::potential::{bessel_j1, tail_factor};
use anisolog::quadrature::Legendre;

fn main() {
    let rule = Legendre::new(16);
    for alpha in [0.25, 0.5, 0.99, 1.5, 2.0, 4.0] {
        let brute = rule.integrate_panels(0.0, 1e4, 20_000, |r| {
            if r == 0.0 { 0.0 } else { bessel_j1(r) * (alpha * r).sin() / r }
        });
        println!("alpha={alpha:<5} closed={:.9}  quadrature={brute:.9}", tail_factor(alpha));
    }
}
