//! Mixed distributions, their densities, and weight functions.

pub mod density;
pub mod distribution;
pub mod specfile;
pub mod weight;

pub use density::{DensitySpec, MixtureComponent, SampledDensity, Side, TailBound};
pub use distribution::{
    detect_lattice, rational_approx, validate_distribution, Atom, MixedDistribution,
    ValidationReport,
};
pub use specfile::{parse_number, parse_spec, write_spec};
pub use weight::{
    grs_check, grs_check_with, submultiplicative_check, weighted_l1_norm, weighted_l1_norm_to, GrsReport, GrsVerdict,
    WeightFunction, WeightKind,
};
