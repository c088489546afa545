//! Distinguished logarithms, winding indices, Bohr means and inversion in the
//! almost periodic Wiener algebra.

mod inverse;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::charfn::{CharFunctionGrid, GridSource};
use crate::error::{Error, Result};
use crate::quad;

pub use inverse::{wiener_inverse_ap, ApInverse, InverseMethod};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest grid the auto-refining variants will build.
pub const MAX_GRID_POINTS: usize = 1 << 20;

/// Continuous logarithm of a zero-free sampled function.
#[derive(Debug, Clone, PartialEq)]
pub struct DistinguishedLog {
    pub z: Vec<f64>,
    pub g: Vec<Complex64>,
    /// Phase increment between consecutive grid points (`increments[k]` is from `k` to `k + 1`).
    pub increments: Vec<f64>,
}

impl DistinguishedLog {
    /// Linear interpolation of `g`, clamped to the grid.
    pub fn eval(&self, t: f64) -> Complex64 {
        let z = &self.z;
        if t <= z[0] {
            return self.g[0];
        }
        if t >= z[z.len() - 1] {
            return self.g[z.len() - 1];
        }
        let k = z.partition_point(|v| *v <= t) - 1;
        let w = (t - z[k]) / (z[k + 1] - z[k]);
        self.g[k] * (1.0 - w) + self.g[k + 1] * w
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("z,re,im\n");
        for (z, g) in self.z.iter().zip(&self.g) {
            let _ = writeln!(s, "{z},{},{}", g.re, g.im);
        }
        s
    }
}

/// Branch tracking outward from the grid point nearest 0. Every phase step
/// must stay below `pi/2`; a coarser grid is rejected with the step it would need.
pub fn distinguished_log(f: &CharFunctionGrid, tol_zero: f64) -> Result<DistinguishedLog> {
    let n = f.z.len();
    if let Some(k) = (0..n).find(|&k| !(f.values[k].norm() >= tol_zero)) {
        return Err(Error::BranchTracking {
            z: f.z[k],
            tol: tol_zero,
        });
    }
    let start = (0..n)
        .min_by(|&a, &b| f.z[a].abs().total_cmp(&f.z[b].abs()))
        .ok_or_else(|| Error::Input("empty grid".into()))?;
    let mut g = vec![Complex64::new(0.0, 0.0); n];
    let mut increments = vec![0.0; n.saturating_sub(1)];
    g[start] = f.values[start].ln();
    let step = |k: usize| -> Result<Complex64> {
        let d = (f.values[k + 1] / f.values[k]).ln();
        if d.im.abs() >= FRAC_PI_2 {
            let h = f.z[k + 1] - f.z[k];
            return Err(Error::Refinement {
                z: f.z[k],
                required_step: h * FRAC_PI_2 / d.im.abs() * 0.5,
            });
        }
        Ok(d)
    };
    for k in start..n.saturating_sub(1) {
        let d = step(k)?;
        increments[k] = d.im;
        g[k + 1] = g[k] + d;
    }
    for k in (0..start).rev() {
        let d = step(k)?;
        increments[k] = d.im;
        g[k] = g[k + 1] - d;
    }
    Ok(DistinguishedLog {
        z: f.z.clone(),
        g,
        increments,
    })
}

/// Symmetric uniform sampling of `f` on `[-half_width, half_width]`, doubled
/// until branch tracking succeeds.
pub fn distinguished_log_refined<F>(f: F, half_width: f64, half_points: usize, tol_zero: f64) -> Result<DistinguishedLog>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let mut half = half_points.max(8);
    loop {
        let grid = CharFunctionGrid::symmetric(&f, half_width, half, GridSource::Synthetic);
        match distinguished_log(&grid, tol_zero) {
            Err(Error::Refinement { .. }) if 2 * half < MAX_GRID_POINTS / 2 => half *= 2,
            Err(Error::Refinement { .. }) => {
                return Err(Error::GridLimit {
                    max_points: MAX_GRID_POINTS,
                })
            }
            other => return other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winding {
    pub index: i64,
    /// `max |F(+-Z) - q| / |q|` with `q` the mean of the two end values.
    pub plateau_residual: f64,
}

/// Index of a function of the form `q + L^1-transform` from its phase
/// change across the grid.
pub fn winding_index(f: &CharFunctionGrid, tol_zero: f64) -> Result<Winding> {
    let n = f.values.len();
    let (a, b) = (f.values[0], f.values[n - 1]);
    let q = 0.5 * (a + b);
    let residual = (a - q).norm().max((b - q).norm()) / q.norm();
    if !(residual < 0.1) {
        return Err(Error::PlateauNotReached { residual });
    }
    let log = distinguished_log(f, tol_zero)?;
    let turn = (log.g[n - 1].im - log.g[0].im) / (2.0 * PI);
    Ok(Winding {
        index: turn.round() as i64,
        plateau_residual: residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanMotion {
    pub kappa: f64,
    /// `sup |Im(g - g(0)) - kappa z|` over the grid.
    pub residual: f64,
}

/// Imaginary slope `kappa` of `g(z) ~ i kappa z`, Richardson-extrapolated
/// from the horizons `T/2` and `T`.
pub fn mean_motion(log: &DistinguishedLog, horizon: f64) -> Result<MeanMotion> {
    let zl = log.z[0];
    let zr = log.z[log.z.len() - 1];
    if horizon <= 0.0 || -horizon < zl - 1e-9 * horizon || horizon > zr + 1e-9 * horizon {
        return Err(Error::WindowMismatch {
            lo: -horizon,
            hi: horizon,
            grid_lo: zl,
            grid_hi: zr,
        });
    }
    let slope = |t: f64| (log.eval(t).im - log.eval(-t).im) / (2.0 * t);
    let kappa = 2.0 * slope(horizon) - slope(0.5 * horizon);
    let g0 = log.eval(0.0).im;
    let (mut inner, mut outer) = (0.0f64, 0.0f64);
    for (z, g) in log.z.iter().zip(&log.g) {
        if z.abs() > horizon {
            continue;
        }
        let r = (g.im - g0 - kappa * z).abs();
        if z.abs() <= 0.5 * horizon {
            inner = inner.max(r);
        } else {
            outer = outer.max(r);
        }
    }
    if outer > 2.0 * inner + 1.0 {
        return Err(Error::Horizon { residual: outer });
    }
    Ok(MeanMotion {
        kappa,
        residual: inner.max(outer),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BohrCoefficients {
    pub coeffs: Vec<(f64, Complex64)>,
    /// Leakage bound from the Hann kernel at the smallest frequency gap.
    pub crosstalk: f64,
}

/// Hann-windowed Bohr means `c_y ~ (1/2T) int h(z) e^{-izy} dz` on `[-T, T]`.
pub fn bohr_coefficients(z: &[f64], h: &[Complex64], frequencies: &[f64], horizon: f64) -> Result<BohrCoefficients> {
    if z.len() != h.len() || z.len() < 2 {
        return Err(Error::Input("bohr_coefficients needs matching samples".into()));
    }
    let mut f = frequencies.to_vec();
    f.sort_by(f64::total_cmp);
    let gap = f.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let resolution = 2.0 * PI / horizon;
    if gap < resolution {
        return Err(Error::Resolution { gap, resolution });
    }
    let tw = quad::trapezoid_weights(z);
    let mut weights = Vec::with_capacity(z.len());
    for (k, t) in z.iter().enumerate() {
        let w = if t.abs() <= horizon {
            (0.5 * PI * t / horizon).cos().powi(2)
        } else {
            0.0
        };
        weights.push(w * tw[k]);
    }
    let norm: f64 = weights.iter().sum();
    let sup = h.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let coeffs = frequencies
        .iter()
        .map(|&y| {
            let mut acc = Complex64::new(0.0, 0.0);
            for ((t, v), w) in z.iter().zip(h).zip(&weights) {
                if *w != 0.0 {
                    acc += v * Complex64::from_polar(*w, -y * t);
                }
            }
            (y, acc / norm)
        })
        .collect();
    let crosstalk = if gap.is_finite() {
        let gt = gap * horizon;
        sup * PI * PI / (gt * (gt * gt - PI * PI)).abs()
    } else {
        0.0
    };
    Ok(BohrCoefficients { coeffs, crosstalk })
}

/// Logarithm of a zero-free almost periodic function in the form
/// `log F(z) = log F(0) + i kappa z + sum c_y (e^{izy} - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct APRepresentation {
    pub kappa: f64,
    pub log_at_zero: Complex64,
    pub terms: Vec<(f64, Complex64)>,
    /// Mass of the dropped coefficients plus the aliasing tail of the last grid.
    pub residual: f64,
}

impl APRepresentation {
    pub fn eval_log(&self, z: f64) -> Complex64 {
        let mut acc = self.log_at_zero + I * (self.kappa * z);
        for (y, c) in &self.terms {
            acc += c * (Complex64::from_polar(1.0, y * z) - 1.0);
        }
        acc
    }
}

/// Lattice fast path for `F_d(z) = sum w_k e^{i n_k q z}`.
///
/// The distinguished log is tracked over four aligned periods, `kappa` comes
/// from `mean_motion` and is snapped to `q * winding`, and the Bohr means of the
/// periodic remainder are exact period averages, folded onto `M` bins and
/// read off with one FFT. `M` doubles until the coefficients near `M/4` vanish.
pub fn lattice_log(step: f64, indices: &[i64], weights: &[f64], tol_zero: f64) -> Result<APRepresentation> {
    let lo = *indices.iter().min().ok_or_else(|| Error::Input("no atoms".into()))?;
    let hi = *indices.iter().max().unwrap();
    let span = (hi - lo) as usize;
    let mut m = (4 * (span + 1)).next_power_of_two().max(64);
    let mut planner = FftPlanner::<f64>::new();
    loop {
        let table: Vec<Complex64> = (0..m)
            .map(|b| Complex64::from_polar(1.0, 2.0 * PI * b as f64 / m as f64))
            .collect();
        let mm = m as i64;
        let value = |j: i64| -> Complex64 {
            indices
                .iter()
                .zip(weights)
                .map(|(n, w)| table[(n * j).rem_euclid(mm) as usize] * *w)
                .sum()
        };
        let periods = 2i64;
        let js: Vec<i64> = (-periods * mm..=periods * mm).collect();
        let z: Vec<f64> = js.iter().map(|&j| 2.0 * PI * j as f64 / (mm as f64 * step)).collect();
        let values: Vec<Complex64> = js.iter().map(|&j| value(j)).collect();
        let grid = CharFunctionGrid::from_points(z, values, GridSource::Synthetic)?;
        let log = match distinguished_log(&grid, tol_zero) {
            Err(Error::Refinement { .. }) if m < MAX_GRID_POINTS / 8 => {
                m *= 2;
                continue;
            }
            Err(Error::Refinement { .. }) => {
                return Err(Error::GridLimit {
                    max_points: MAX_GRID_POINTS,
                })
            }
            other => other?,
        };
        let horizon = periods as f64 * 2.0 * PI / step;
        let mm_est = mean_motion(&log, horizon)?;
        let winding = (mm_est.kappa / step).round();
        if (mm_est.kappa / step - winding).abs() > 1e-6 {
            return Err(Error::Horizon {
                residual: (mm_est.kappa / step - winding).abs(),
            });
        }
        let kappa = winding * step;
        let origin = (periods * mm) as usize;
        let g0 = log.g[origin];

        let mut bins = vec![Complex64::new(0.0, 0.0); m];
        for (k, j) in js.iter().enumerate().take(js.len() - 1) {
            let u = log.g[k] - g0 - I * (kappa * grid.z[k]);
            bins[j.rem_euclid(mm) as usize] += u;
        }
        let scale = 1.0 / (2 * periods * mm) as f64;
        planner.plan_fft_forward(m).process(&mut bins);
        let coeff = |k: i64| bins[k.rem_euclid(mm) as usize] * scale;

        let tail: f64 = (m as i64 / 4..m as i64 / 2).map(|k| coeff(k).norm().max(coeff(-k).norm())).fold(0.0, f64::max);
        if tail > 1e-14 && m < MAX_GRID_POINTS / 8 {
            m *= 2;
            continue;
        }

        let half = m as i64 / 2;
        let mut ks: Vec<i64> = (1..half).collect();
        let mut cut = half - 1;
        let mut rest = 0.0;
        while cut > 0 {
            let next = rest + coeff(cut).norm() + coeff(-cut).norm();
            if next >= 1e-12 {
                break;
            }
            rest = next;
            cut -= 1;
        }
        ks.truncate(cut as usize);
        let mut terms = Vec::with_capacity(2 * ks.len());
        for &k in ks.iter().rev() {
            terms.push((-(k as f64) * step, coeff(-k)));
        }
        for &k in &ks {
            terms.push((k as f64 * step, coeff(k)));
        }
        return Ok(APRepresentation {
            kappa,
            log_at_zero: g0,
            terms,
            residual: rest + tail,
        });
    }
}

/// `((i - z) / (i + z))^m`.
pub fn cayley_term(z: f64, m: i64) -> Complex64 {
    let c = (I - z) / (I + z);
    c.powi(m as i32)
}

/// Distinguished branch `Lambda(z) = 2i arctan z` with `e^{Lambda} = (i - z)/(i + z)`.
pub fn cayley_log(z: f64) -> Complex64 {
    I * (2.0 * z.atan())
}

/// `m int (e^{-|x|}/|x|) sgn(x) (e^{izx} - 1) dx` by quadrature of the
/// equivalent sine form `2 i m int_0^inf e^{-x} sin(zx)/x dx`.
pub fn cayley_integral(z: f64, m: i64) -> Complex64 {
    if z == 0.0 || m == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let width = (0.5 / z.abs()).min(0.25);
    let s = quad::gl_composite(|x| (-x).exp() * (z * x).sin() / x, 0.0, 45.0, width);
    I * (2.0 * m as f64 * s)
}

/// `int e^{izx} psi(x) dx` for `psi(x) = 2 e^x` on `x < 0`, by quadrature;
/// `1 - psi_transform(z) = (z + i)/(z - i)`.
pub fn psi_transform(z: f64) -> Complex64 {
    let width = (0.5 / z.abs().max(1e-300)).min(0.25);
    let re = quad::gl_composite(|x| 2.0 * (-x).exp() * (z * x).cos(), 0.0, 45.0, width);
    let im = quad::gl_composite(|x| -2.0 * (-x).exp() * (z * x).sin(), 0.0, 45.0, width);
    Complex64::new(re, im)
}
