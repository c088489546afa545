//! Independent ground truth for the extraction pipeline: a one-period FFT
//! logarithm on the lattice circle, the power series of `log(1 + u)` for a
//! dominant atom, the convolution corollary, and a seeded test corpus.

mod convolution;
mod corpus;
mod series;

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::model::MixedDistribution;

pub use convolution::{convolution_factor_check, convolve, FactorReport};
pub use corpus::{generate_corpus, generate_member, Corpus, CorpusMember, CorpusSpec, Manifest, MemberRecord};
pub use series::{dominance_ratio, rational, series_log_coeffs, SeriesLog, series_log_coeffs_exact, series_order_for, SeriesScalar};

/// Atoms of a distribution on `(1/n) Z`: masses at integer indices.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeDistribution {
    pub n: u64,
    pub indices: Vec<i64>,
    pub masses: Vec<f64>,
}

impl LatticeDistribution {
    pub fn step(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// `P(e^{i theta}) = sum a_k e^{i n_k theta}`.
    pub fn circle(&self, theta: f64) -> Complex64 {
        self.indices
            .iter()
            .zip(&self.masses)
            .map(|(k, a)| Complex64::from_polar(*a, *k as f64 * theta))
            .sum()
    }
}

pub fn lattice_embed(d: &MixedDistribution, n: u64) -> Result<LatticeDistribution> {
    if n == 0 {
        return Err(Error::Input("lattice denominator must be positive".into()));
    }
    let mut indices = Vec::with_capacity(d.atoms.len());
    let mut masses = Vec::with_capacity(d.atoms.len());
    for a in &d.atoms {
        let t = a.location * n as f64;
        let k = t.round();
        if (a.location - k / n as f64).abs() > 1e-9 {
            return Err(Error::OffLattice {
                location: a.location,
                n,
            });
        }
        indices.push(k as i64);
        masses.push(a.mass);
    }
    Ok(LatticeDistribution { n, indices, masses })
}

/// Quasi-Lévy data of a lattice distribution: `log P(e^{i theta}) =
/// i w theta + sum_k c_k (e^{i k theta} - 1)`, and in the variable `z`
/// (`theta = z / n`) atoms at `k / n` and drift `w / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeTriplet {
    pub step: f64,
    /// `(k, c_k)`, `k != 0`, increasing.
    pub coefficients: Vec<(i64, f64)>,
    pub winding: i64,
    pub drift: f64,
    pub circle_min: f64,
    /// Largest imaginary part dropped from the coefficients.
    pub imag_residue: f64,
}

impl LatticeTriplet {
    pub fn coefficient(&self, k: i64) -> f64 {
        self.coefficients
            .binary_search_by_key(&k, |c| c.0)
            .map_or(0.0, |i| self.coefficients[i].1)
    }
}

pub const CIRCLE_POINTS: usize = 1 << 16;

/// Phase unwrapping and one FFT of `log(P e^{-i w theta})` on `2^16` points.
pub fn fft_lattice_triplet(ld: &LatticeDistribution) -> Result<LatticeTriplet> {
    let m = CIRCLE_POINTS;
    let values: Vec<Complex64> = (0..m).map(|j| ld.circle(2.0 * PI * j as f64 / m as f64)).collect();
    let (jmin, circle_min) = values
        .iter()
        .enumerate()
        .map(|(j, v)| (j, v.norm()))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    if circle_min < 1e-9 {
        return Err(Error::NotQid(format!(
            "P vanishes near theta = {:.10} (|P| = {circle_min:.3e})",
            2.0 * PI * jmin as f64 / m as f64
        )));
    }
    let mut phase = Vec::with_capacity(m + 1);
    let mut acc = values[0].arg();
    phase.push(acc);
    for j in 1..=m {
        let next = values[j % m];
        acc += (next / values[j - 1]).arg();
        phase.push(acc);
    }
    let turn = (phase[m] - phase[0]) / (2.0 * PI);
    let winding = turn.round() as i64;
    if (turn - winding as f64).abs() > 1e-6 {
        return Err(Error::Input(format!("circle phase did not close (turn {turn})")));
    }
    let mut buf: Vec<Complex64> = (0..m)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / m as f64;
            Complex64::new(values[j].norm().ln(), phase[j] - winding as f64 * theta)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    let half = (m / 2) as i64;
    let mut coefficients = Vec::new();
    let mut imag_residue: f64 = 0.0;
    for k in -half + 1..half {
        if k == 0 {
            continue;
        }
        let c = buf[k.rem_euclid(m as i64) as usize] * scale;
        if c.norm() > 1e-16 {
            imag_residue = imag_residue.max(c.im.abs());
            coefficients.push((k, c.re));
        }
    }
    let step = ld.step();
    Ok(LatticeTriplet {
        step,
        coefficients,
        winding,
        drift: winding as f64 * step,
        circle_min,
        imag_residue,
    })
}
