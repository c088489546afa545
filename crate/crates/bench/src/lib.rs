//! Fixed inputs shared by the benchmarks.

use qidlab_core::{DensitySpec, MixedDistribution};

pub fn bernoulli() -> MixedDistribution {
    MixedDistribution::discrete(&[(0.0, 0.75), (1.0, 0.25)]).unwrap()
}

/// Small atom under a wide Gaussian: the band and grid are set by the
/// `1e-3` plateau, and the winding is 2.
pub fn small_atom() -> MixedDistribution {
    MixedDistribution::mixed(0.001, &[(0.0, 1.0)], DensitySpec::gaussian(1.0, 1.0)).unwrap()
}

/// Five lattice atoms and a Laplace part, the slow case for extraction.
pub fn laplace_mixture() -> MixedDistribution {
    MixedDistribution::mixed(
        0.8,
        &[(-3.0, 0.1), (-1.0, 0.15), (0.0, 0.5), (2.0, 0.15), (5.0, 0.1)],
        DensitySpec::laplace(0.5, 0.8),
    )
    .unwrap()
}

/// Incommensurable atoms, handled by the scan and Kronecker routes.
pub fn irrational() -> MixedDistribution {
    MixedDistribution::discrete(&[(0.0, 0.6), (1.0, 0.25), (2f64.sqrt(), 0.15)]).unwrap()
}

pub fn all() -> Vec<(&'static str, MixedDistribution)> {
    vec![
        ("bernoulli", bernoulli()),
        ("small_atom", small_atom()),
        ("laplace_mixture", laplace_mixture()),
        ("irrational", irrational()),
    ]
}
