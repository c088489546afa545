//! Densities of the absolutely continuous part: a small closed-form catalog,
//! sampled grids with a declared tail bound, and the mixtures/convolutions
//! that arise when convolving mixed distributions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;

/// Orientation of the one-sided exponential density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Supported on `[0, inf)`.
    Right,
    /// Supported on `(-inf, 0]`.
    Left,
}

/// Declared decay of a sampled density beyond its grid: `f(x) <= coeff * decay(|x|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailBound {
    Exponential { coeff: f64, rate: f64 },
    Polynomial { coeff: f64, exponent: f64 },
}

impl TailBound {
    pub fn at(&self, x: f64) -> f64 {
        let ax = x.abs();
        match *self {
            TailBound::Exponential { coeff, rate } => coeff * (-rate * ax).exp(),
            TailBound::Polynomial { coeff, exponent } => coeff * (1.0 + ax).powf(-exponent),
        }
    }
}

/// Piecewise-linear density on a strictly increasing grid, zero outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledDensity {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    pub tail: TailBound,
}

impl SampledDensity {
    pub fn new(x: Vec<f64>, values: Vec<f64>, tail: TailBound) -> Result<Self> {
        let s = Self { x, values, tail };
        let issues = s.issues();
        if issues.is_empty() {
            Ok(s)
        } else {
            Err(Error::InvalidDistribution(issues))
        }
    }

    fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.x.len() < 2 || self.x.len() != self.values.len() {
            out.push("sampled density needs >= 2 points and matching value count".into());
            return out;
        }
        if self.x.windows(2).any(|w| !(w[1] > w[0])) {
            out.push("sampled density grid must be strictly increasing".into());
        }
        if self.values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            out.push("sampled density values must be finite and >= 0".into());
        }
        out
    }

    pub fn max_step(&self) -> f64 {
        self.x
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn pdf(&self, t: f64) -> f64 {
        let x = &self.x;
        if t < x[0] || t > x[x.len() - 1] {
            return 0.0;
        }
        let k = match x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(k) => return self.values[k],
            Err(k) => k,
        };
        let (x0, x1) = (x[k - 1], x[k]);
        let (f0, f1) = (self.values[k - 1], self.values[k]);
        f0 + (f1 - f0) * (t - x0) / (x1 - x0)
    }

    pub fn mass(&self) -> f64 {
        self.x
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1]))
            .sum()
    }

    /// Exact Fourier transform of the piecewise-linear interpolant.
    pub fn cf(&self, z: f64) -> Result<Complex64> {
        let h = self.max_step();
        if z.abs() * h > PI {
            return Err(Error::Refinement {
                z,
                required_step: PI / z.abs(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, f) in self.x.windows(2).zip(self.values.windows(2)) {
            let h = x[1] - x[0];
            let c = 0.5 * (x[0] + x[1]);
            let m = 0.5 * (f[0] + f[1]);
            let d = 0.5 * (f[1] - f[0]);
            let u = 0.5 * z * h;
            let (sinc, odd) = if u.abs() < 1e-3 {
                let u2 = u * u;
                (1.0 - u2 / 6.0 + u2 * u2 / 120.0, u / 3.0 - u * u2 / 30.0)
            } else {
                (u.sin() / u, (u.sin() - u * u.cos()) / (u * u))
            };
            acc += Complex64::from_polar(h, z * c) * Complex64::new(m * sinc, d * odd);
        }
        Ok(acc)
    }

    /// Integration-by-parts bound: `|cf(z)| <= (|f_0| + |f_n| + TV(f)) / |z|`.
    pub fn decay_bound(&self, z: f64) -> f64 {
        let tv: f64 = self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        let ends = self.values[0].abs() + self.values[self.values.len() - 1].abs();
        ((ends + tv) / z.abs()).min(1.0)
    }
}

/// One weighted, shifted component of a density mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub shift: f64,
    pub density: DensitySpec,
}

/// Density of the absolutely continuous part `mu_ac`.
#[derive(Debug, Clone, PartialEq)]
pub enum DensitySpec {
    Gaussian { mean: f64, variance: f64 },
    Laplace { location: f64, scale: f64 },
    Uniform { lo: f64, hi: f64 },
    Exponential { rate: f64, side: Side },
    Sampled(SampledDensity),
    Mixture(Vec<MixtureComponent>),
    /// Convolution of two densities; the transform is the product of the
    /// factors' transforms, the pdf is computed by quadrature.
    Convolution(Box<DensitySpec>, Box<DensitySpec>),
}

impl DensitySpec {
    pub fn gaussian(mean: f64, variance: f64) -> Self {
        DensitySpec::Gaussian { mean, variance }
    }

    pub fn laplace(location: f64, scale: f64) -> Self {
        DensitySpec::Laplace { location, scale }
    }

    pub fn uniform(lo: f64, hi: f64) -> Self {
        DensitySpec::Uniform { lo, hi }
    }

    pub fn exponential(rate: f64, side: Side) -> Self {
        DensitySpec::Exponential { rate, side }
    }

    /// Violated parameter constraints; empty when valid.
    pub fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            DensitySpec::Gaussian { mean, variance } => {
                if !mean.is_finite() || !(*variance > 0.0) || !variance.is_finite() {
                    out.push(format!("gaussian needs finite mean and variance > 0 (got {mean}, {variance})"));
                }
            }
            DensitySpec::Laplace { location, scale } => {
                if !location.is_finite() || !(*scale > 0.0) || !scale.is_finite() {
                    out.push(format!("laplace needs finite location and scale > 0 (got {location}, {scale})"));
                }
            }
            DensitySpec::Uniform { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() || !(hi > lo) {
                    out.push(format!("uniform needs lo < hi (got {lo}, {hi})"));
                }
            }
            DensitySpec::Exponential { rate, .. } => {
                if !(*rate > 0.0) || !rate.is_finite() {
                    out.push(format!("exponential needs rate > 0 (got {rate})"));
                }
            }
            DensitySpec::Sampled(s) => {
                out.extend(s.issues());
                if out.is_empty() && (s.mass() - 1.0).abs() > 1e-6 {
                    out.push(format!("sampled density integrates to {} (expected 1)", s.mass()));
                }
            }
            DensitySpec::Mixture(parts) => {
                if parts.is_empty() {
                    out.push("mixture has no components".into());
                }
                let total: f64 = parts.iter().map(|c| c.weight).sum();
                if (total - 1.0).abs() > 1e-12 || parts.iter().any(|c| !(c.weight > 0.0)) {
                    out.push(format!("mixture weights must be positive and sum to 1 (got {total})"));
                }
                for c in parts {
                    out.extend(c.density.issues());
                }
            }
            DensitySpec::Convolution(a, b) => {
                out.extend(a.issues());
                out.extend(b.issues());
            }
        }
        out
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            DensitySpec::Gaussian { mean, variance } => {
                let d = x - mean;
                (-0.5 * d * d / variance).exp() / (2.0 * PI * variance).sqrt()
            }
            DensitySpec::Laplace { location, scale } => {
                (-(x - location).abs() / scale).exp() / (2.0 * scale)
            }
            DensitySpec::Uniform { lo, hi } => {
                if x >= *lo && x <= *hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            DensitySpec::Exponential { rate, side } => {
                let t = match side {
                    Side::Right => x,
                    Side::Left => -x,
                };
                if t >= 0.0 {
                    rate * (-rate * t).exp()
                } else {
                    0.0
                }
            }
            DensitySpec::Sampled(s) => s.pdf(x),
            DensitySpec::Mixture(parts) => parts
                .iter()
                .map(|c| c.weight * c.density.pdf(x - c.shift))
                .sum(),
            DensitySpec::Convolution(a, b) => {
                let (lo, hi) = b.support();
                let width = (a.scale().min(b.scale()) / 8.0).max(1e-4);
                quad::gl_composite(|t| a.pdf(x - t) * b.pdf(t), lo, hi, width)
            }
        }
    }

    /// Fourier transform `int f(x) e^{izx} dx`.
    pub fn cf(&self, z: f64) -> Result<Complex64> {
        Ok(match self {
            DensitySpec::Gaussian { mean, variance } => {
                Complex64::from_polar((-0.5 * variance * z * z).exp(), mean * z)
            }
            DensitySpec::Laplace { location, scale } => {
                Complex64::from_polar(1.0 / (1.0 + scale * scale * z * z), location * z)
            }
            DensitySpec::Uniform { lo, hi } => {
                let u = 0.5 * z * (hi - lo);
                let sinc = if u.abs() < 1e-8 { 1.0 - u * u / 6.0 } else { u.sin() / u };
                Complex64::from_polar(1.0, 0.5 * z * (lo + hi)) * sinc
            }
            DensitySpec::Exponential { rate, side } => {
                let s = match side {
                    Side::Right => 1.0,
                    Side::Left => -1.0,
                };
                Complex64::new(*rate, 0.0) / Complex64::new(*rate, -s * z)
            }
            DensitySpec::Sampled(s) => s.cf(z)?,
            DensitySpec::Mixture(parts) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in parts {
                    acc += Complex64::from_polar(c.weight, c.shift * z) * c.density.cf(z)?;
                }
                acc
            }
            DensitySpec::Convolution(a, b) => a.cf(z)? * b.cf(z)?,
        })
    }

    /// Upper bound on `|cf(w)|` valid for every `|w| >= |z|`.
    pub fn tail_bound(&self, z: f64) -> f64 {
        let z = z.abs();
        match self {
            DensitySpec::Gaussian { variance, .. } => (-0.5 * variance * z * z).exp(),
            DensitySpec::Laplace { scale, .. } => 1.0 / (1.0 + scale * scale * z * z),
            DensitySpec::Uniform { lo, hi } => (2.0 / (z * (hi - lo))).min(1.0),
            DensitySpec::Exponential { rate, .. } => rate / (rate * rate + z * z).sqrt(),
            DensitySpec::Sampled(s) => s.decay_bound(z),
            DensitySpec::Mixture(parts) => parts
                .iter()
                .map(|c| c.weight * c.density.tail_bound(z))
                .sum::<f64>()
                .min(1.0),
            DensitySpec::Convolution(a, b) => a.tail_bound(z) * b.tail_bound(z),
        }
    }

    /// Smallest `M` with `tail_bound(M) <= level`, found by doubling and bisection.
    pub fn decay_cutoff(&self, level: f64) -> f64 {
        if level >= 1.0 {
            return 0.0;
        }
        let mut hi = 1.0;
        while self.tail_bound(hi) > level {
            hi *= 2.0;
            if hi > 1e12 {
                return f64::INFINITY;
            }
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.tail_bound(mid) > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// Interval carrying all but a negligible fraction of the mass.
    pub fn support(&self) -> (f64, f64) {
        match self {
            DensitySpec::Gaussian { mean, variance } => {
                let s = 40.0 * variance.sqrt();
                (mean - s, mean + s)
            }
            DensitySpec::Laplace { location, scale } => (location - 45.0 * scale, location + 45.0 * scale),
            DensitySpec::Uniform { lo, hi } => (*lo, *hi),
            DensitySpec::Exponential { rate, side } => match side {
                Side::Right => (0.0, 45.0 / rate),
                Side::Left => (-45.0 / rate, 0.0),
            },
            DensitySpec::Sampled(s) => (s.x[0], s.x[s.x.len() - 1]),
            DensitySpec::Mixture(parts) => parts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, c| {
                let (lo, hi) = c.density.support();
                (acc.0.min(lo + c.shift), acc.1.max(hi + c.shift))
            }),
            DensitySpec::Convolution(a, b) => {
                let (a0, a1) = a.support();
                let (b0, b1) = b.support();
                (a0 + b0, a1 + b1)
            }
        }
    }

    /// Largest `|z|` at which `cf` is available; infinite for closed forms.
    pub fn max_frequency(&self) -> f64 {
        match self {
            DensitySpec::Sampled(s) => PI / s.max_step(),
            DensitySpec::Mixture(parts) => parts
                .iter()
                .map(|c| c.density.max_frequency())
                .fold(f64::INFINITY, f64::min),
            DensitySpec::Convolution(a, b) => a.max_frequency().min(b.max_frequency()),
            _ => f64::INFINITY,
        }
    }

    /// Characteristic length of the density (spread of its bulk).
    pub fn scale(&self) -> f64 {
        match self {
            DensitySpec::Gaussian { variance, .. } => variance.sqrt(),
            DensitySpec::Laplace { scale, .. } => *scale,
            DensitySpec::Uniform { lo, hi } => hi - lo,
            DensitySpec::Exponential { rate, .. } => 1.0 / rate,
            DensitySpec::Sampled(s) => s.x[s.x.len() - 1] - s.x[0],
            DensitySpec::Mixture(parts) => parts
                .iter()
                .map(|c| c.density.scale())
                .fold(f64::INFINITY, f64::min),
            DensitySpec::Convolution(a, b) => a.scale().max(b.scale()),
        }
    }

    /// Bound on `E|X|` plus a few spreads; controls how fast the transform varies in `z`.
    pub fn extent(&self) -> f64 {
        let (lo, hi) = self.support();
        match self {
            DensitySpec::Gaussian { mean, variance } => mean.abs() + 6.0 * variance.sqrt(),
            DensitySpec::Laplace { location, scale } => location.abs() + 6.0 * scale,
            DensitySpec::Exponential { rate, .. } => 6.0 / rate,
            _ => lo.abs().max(hi.abs()),
        }
    }
}
