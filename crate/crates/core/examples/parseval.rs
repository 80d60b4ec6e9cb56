//! Energy of a Gaussian dipole computed in physical and in Fourier space.

use anisolog::verify::{parseval_gap, GaussianBlobPair, QuadOptions};
use anisolog::{make_preset, KernelSpec, Preset};

fn main() {
    let kernels = [
        ("coulomb", KernelSpec::coulomb()),
        ("dislocation 0.5", make_preset(Preset::Dislocation { alpha: 0.5 }).unwrap()),
        ("dislocation 1.0", make_preset(Preset::Dislocation { alpha: 1.0 }).unwrap()),
        ("elastic 0.5/1.0", make_preset(Preset::Elastic { a: 0.5, b: 1.0 }).unwrap()),
    ];
    let blobs = [
        GaussianBlobPair::default(),
        GaussianBlobPair { p: [0.3, 0.8], q: [-0.2, -0.4], sigma: 0.4 },
    ];
    for (name, kernel) in &kernels {
        for b in &blobs {
            let r = parseval_gap(kernel, b, &QuadOptions::default()).unwrap();
            println!("{name:<16} sigma={:.1}  lhs={:.10}  rhs={:.10}  gap={:.1e}", b.sigma, r.lhs, r.rhs, r.rel_gap);
        }
    }
}
