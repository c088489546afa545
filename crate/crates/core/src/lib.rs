//! Quasi-infinite divisibility of mixed discrete + absolutely continuous
//! distributions on the real line.

// Negated comparisons are used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charfn;
pub mod distlog;
pub mod error;
pub mod model;
pub mod moments;
pub mod oracle;
pub mod quad;
pub mod settings;
pub mod triplet;

pub use charfn::{eval_cf, eval_cf_parts, qid_check, CharFunctionGrid, QidVerdict, Verdict};
pub use error::{Error, Result};
pub use model::{Atom, DensitySpec, MixedDistribution, WeightFunction};
pub use settings::Settings;
pub use distlog::{cayley_integral, cayley_log, cayley_term, psi_transform, distinguished_log, wiener_inverse_ap, winding_index, DistinguishedLog};
pub use triplet::{
    beta_near_zero_moment, extract_triplet, invert_cf, levy_khintchine_eval, nu_measures, reconstruct_cf, QuasiLevyTriplet,
};
pub use moments::{h_moment_dist, h_moment_nu, moment_equivalence_report, MomentReport, Variant};
pub use oracle::{
    convolution_factor_check, convolve, fft_lattice_triplet, generate_corpus, lattice_embed, series_log_coeffs, Corpus,
    CorpusSpec, LatticeDistribution, LatticeTriplet, Manifest,
};
