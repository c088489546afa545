use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::{smooth_cayley_log, spectral_kernel, QuasiLevyTriplet};
use crate::charfn::{check_resolution, eval_cf_parts, qid_check, CharFunctionGrid, GridSource, QidVerdict, Verdict};
use crate::distlog::{distinguished_log, lattice_log, wiener_inverse_ap, winding_index, MAX_GRID_POINTS};
use crate::error::{Error, Result, StageExt};
use crate::model::MixedDistribution;
use crate::settings::Settings;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExtractionDiagnostics {
    pub lattice_step: f64,
    /// Dropped mass plus aliasing tail of the discrete log coefficients.
    pub discrete_residual: f64,
    /// `max |L - m Lambda + int h|` over the outer half of the band.
    pub plateau_residual: f64,
    /// Largest imaginary part dropped from `gamma0`, `c_y` or `h`.
    pub imag_residue: f64,
    /// `max |h|` beyond three quarters of the `x` half-width, relative to `max |h|`.
    pub tail_ratio: f64,
    /// Fitted exponential decay rate of `|h|` (slower side).
    pub decay_rate: Option<f64>,
    /// Samples of `|h|` below this were trimmed from the grid.
    pub noise_floor: f64,
    /// Frequency band `[-Z, Z]` of the transform; evaluation is exact on the
    /// grid for `|z| < Z/2`.
    pub band: f64,
    pub grid_points: usize,
    pub warnings: Vec<String>,
}

fn certified(d: &MixedDistribution, settings: &Settings) -> Result<QidVerdict> {
    let v = qid_check(d, settings).stage("qid check")?;
    if v.verdict != Verdict::Qid {
        return Err(Error::Uncertified(Box::new(v))).stage("qid check");
    }
    Ok(v)
}

/// Frequency band for the ratio transform: past the point where the
/// density part is below `1e-12 inf|F_d|`, clamped to `[64, 4096]` and to
/// what a sampled density can resolve.
fn choose_band(d: &MixedDistribution, eps_d: f64, warnings: &mut Vec<String>) -> f64 {
    let f = d.density.as_ref().expect("density present");
    let level = 1e-12 * eps_d / (1.0 - d.p);
    let cut = f.decay_cutoff(level);
    let mut band = (2.0 * cut).clamp(64.0, 4096.0);
    let limit = 0.999 * f.max_frequency();
    if band > limit {
        warnings.push(format!("band capped at {limit:.4} by the density sampling step"));
        band = limit;
    }
    band
}

fn initial_half_width(d: &MixedDistribution, step: f64) -> f64 {
    let span = d.atoms.iter().map(|a| a.location).fold(f64::NEG_INFINITY, f64::max)
        - d.atoms.iter().map(|a| a.location).fold(f64::INFINITY, f64::min);
    let extent = d.density.as_ref().map_or(0.0, |f| f.extent());
    (span.max(step) + 2.0 * extent + 30.0).max(60.0)
}

/// Raised-cosine taper: 1 on `|z| <= Z/2`, falling to 0 at `|z| = Z`.
fn taper(z: f64, band: f64) -> f64 {
    let a = z.abs();
    if a <= 0.5 * band {
        1.0
    } else if a >= band {
        0.0
    } else {
        0.5 * (1.0 + (PI * (a - 0.5 * band) / (0.5 * band)).cos())
    }
}

struct Layout {
    n: usize,
    dz: f64,
    dx: f64,
}

fn layout(half_width: f64, band: f64) -> Option<Layout> {
    let dz = PI / half_width;
    let n = ((2.0 * band / dz).ceil() as usize).next_power_of_two().max(1024);
    (n <= MAX_GRID_POINTS).then(|| Layout {
        n,
        dz,
        dx: 2.0 * PI / (n as f64 * dz),
    })
}

/// `(dz / 2pi) sum_k s_k e^{-i z_k x_j}` for `z_k = k dz`, `k` in `[-n/2, n/2)`.
/// Input and output are in natural order.
fn inverse_transform(planner: &mut FftPlanner<f64>, s: &[Complex64], dz: f64) -> Vec<Complex64> {
    let n = s.len();
    let h = n / 2;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (k, v) in s.iter().enumerate() {
        buf[(k + n - h) % n] = *v;
    }
    planner.plan_fft_forward(n).process(&mut buf);
    let scale = dz / (2.0 * PI);
    (0..n).map(|j| buf[(j + n - h) % n] * scale).collect()
}

/// `max |v|` over `|x_j| > 0.75 X`, relative to `max |v|`.
fn tail_ratio(v: &[Complex64]) -> f64 {
    let n = v.len();
    let peak = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let q = n / 8;
    v[..q].iter().chain(&v[n - q..]).map(|c| c.norm()).fold(0.0, f64::max) / peak
}

/// Trim samples below `floor` from both ends; returns the first kept index.
fn trim(v: &[f64], floor: f64) -> (usize, Vec<f64>) {
    match (v.iter().position(|x| x.abs() >= floor), v.iter().rposition(|x| x.abs() >= floor)) {
        (Some(a), Some(b)) => (a, v[a..=b].to_vec()),
        _ => (0, Vec::new()),
    }
}

/// Exponential decay rate of `|v|` on each side of its peak, from a
/// regression of `log |v|` against `x` on samples above `1e3 floor`.
fn decay_rate(v: &[f64], x0: f64, dx: f64, floor: f64) -> Option<f64> {
    let peak = (0..v.len()).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()))?;
    let stride = ((1.0 / dx).round() as usize).max(1);
    let side = |range: Vec<usize>| -> Option<f64> {
        let pts: Vec<(f64, f64)> = range
            .into_iter()
            .step_by(stride)
            .filter(|&j| v[j].abs() > 1e3 * floor)
            .map(|j| ((x0 + j as f64 * dx - x0 - peak as f64 * dx).abs(), v[j].abs().ln()))
            .collect();
        (pts.len() >= 8).then(|| -crate::quad::regression_slope(&pts[pts.len() / 2..]))
    };
    let right = side((peak..v.len()).collect());
    let left = side((0..=peak).rev().collect());
    match (left, right) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

struct DensityPart {
    x0: f64,
    dx: f64,
    h: Vec<f64>,
    m: i64,
}

/// Smallest band the width fallback may shrink to.
const MIN_FALLBACK_BAND: f64 = 256.0;

/// Everything one grid attempt produces; the caller keeps the best one.
struct Attempt {
    part: DensityPart,
    plateau: f64,
    imag: f64,
    tail: f64,
    band_edge: f64,
    grid_points: usize,
    floor: f64,
    decay_rate: Option<f64>,
}

enum Outcome {
    Done(Attempt),
    Refine,
}

/// `h` and `m` from `R = 1 + F_ac / F_d`: `L = log(R / R(0))`, `m` the index
/// of `R`, `int h = -lim (L - m Lambda_g)`, and the grid part of `h` the tapered
/// inverse transform of `L - m Lambda_g + int h`, where `Lambda_g` is the
/// transform of `sgn(x) e^{-x^2/2} / |x|`.
///
/// When `h` still has a tail at the largest grid, the band is halved to
/// double the half-width: evaluation for `|z|` well inside the band does not
/// depend on the band, while the tail aliases into everything.
fn density_part(d: &MixedDistribution, eps_d: f64, settings: &Settings, diag: &mut ExtractionDiagnostics) -> Result<DensityPart> {
    let mut band = choose_band(d, eps_d, &mut diag.warnings);
    check_resolution(d, band).stage("ratio log")?;
    let mut half_width = initial_half_width(d, diag.lattice_step.max(1e-300));
    let mut planner = FftPlanner::new();
    let mut fallback: Option<Attempt> = None;
    let best = loop {
        let lay = match layout(half_width, band) {
            Some(lay) => lay,
            None => match fallback {
                Some(f) => break f,
                None => {
                    return Err(Error::GridLimit {
                        max_points: MAX_GRID_POINTS,
                    })
                    .stage("ratio log")
                }
            },
        };
        let attempt = match grid_attempt(d, settings, &lay, band, &mut planner) {
            Ok(Outcome::Refine) => {
                half_width *= 2.0;
                continue;
            }
            Ok(Outcome::Done(a)) => a,
            // A narrower band that no longer settles: keep the wider one.
            Err(_) if fallback.is_some() => break fallback.unwrap(),
            Err(e) => return Err(e),
        };
        if attempt.tail <= 1e-10 {
            break attempt;
        }
        if layout(2.0 * half_width, band).is_some() {
            half_width *= 2.0;
            continue;
        }
        if let Some(f) = &fallback {
            if f.tail <= attempt.tail {
                break fallback.unwrap();
            }
        }
        let stop = 0.5 * band < MIN_FALLBACK_BAND.min(band);
        fallback = Some(attempt);
        if stop {
            break fallback.unwrap();
        }
        band *= 0.5;
        half_width *= 2.0;
    };
    if best.tail > 1e-10 {
        diag.warnings.push(format!("h tail ratio {:.3e} at the largest grid", best.tail));
    }
    if best.plateau > 1e-8 {
        diag.warnings.push(format!("plateau residual {:.3e} at band {:.1}", best.plateau, best.band_edge));
    }
    if best.imag > 1e-8 {
        diag.warnings.push(format!("imaginary residue {:.3e} in h", best.imag));
    }
    if let Some(rate) = best.decay_rate {
        if rate < 0.01 {
            diag.warnings.push(format!("h decays slowly (rate {rate:.3e})"));
        }
    }
    diag.imag_residue = diag.imag_residue.max(best.imag);
    diag.plateau_residual = best.plateau;
    diag.tail_ratio = best.tail;
    diag.band = best.band_edge;
    diag.grid_points = best.grid_points;
    diag.noise_floor = best.floor;
    diag.decay_rate = best.decay_rate;
    Ok(best.part)
}

fn grid_attempt(
    d: &MixedDistribution,
    settings: &Settings,
    lay: &Layout,
    band: f64,
    planner: &mut FftPlanner<f64>,
) -> Result<Outcome> {
    let n = lay.n as i64;
    let z: Vec<f64> = (-n / 2..=n / 2).map(|k| k as f64 * lay.dz).collect();
    let r0 = 1.0 / d.p;
    let values: Vec<Complex64> = z
        .par_iter()
        .map(|&t| {
            let (fd, fac) = eval_cf_parts(d, t).unwrap_or((Complex64::new(1.0, 0.0), Complex64::new(f64::NAN, 0.0)));
            (1.0 + fac / fd) / r0
        })
        .collect();
    let grid = CharFunctionGrid::from_points(z.clone(), values, GridSource::Synthetic).stage("ratio log")?;
    let log = match distinguished_log(&grid, settings.tol_zero) {
        Err(Error::Refinement { .. }) => return Ok(Outcome::Refine),
        other => other.stage("ratio log")?,
    };
    let m = winding_index(&grid, settings.tol_zero).stage("winding index")?.index;

    // The smooth kernel's transform settles like erf, so the plateau is
    // reached as fast as F_ac decays; the difference to Lambda is the jump profile.
    let u: Vec<Complex64> = z.iter().zip(&log.g).map(|(t, g)| g - smooth_cayley_log(*t) * m as f64).collect();
    let band_edge = z[z.len() - 1];
    debug_assert!(band_edge >= band * (1.0 - 1e-12));
    let outer: Vec<usize> = (0..z.len()).filter(|&k| z[k].abs() >= 0.5 * band_edge).collect();
    let integral = -outer.iter().map(|&k| u[k].re).sum::<f64>() / outer.len() as f64;
    let plateau = outer.iter().map(|&k| (u[k] + integral).norm()).fold(0.0, f64::max);
    if plateau > 1e-3 {
        return Err(Error::PlateauNotReached { residual: plateau }).stage("density transform");
    }

    let s: Vec<Complex64> = (0..lay.n).map(|k| (u[k] + integral) * taper(z[k], band_edge)).collect();
    let hc = inverse_transform(planner, &s, lay.dz);
    let tail = tail_ratio(&hc);
    let peak = hc.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
    let imag = hc.iter().map(|c| c.im.abs()).fold(0.0, f64::max) / peak.max(1.0);
    if imag > 1e-6 {
        return Err(Error::Realness {
            what: "density",
            residue: imag,
        })
        .stage("density transform");
    }

    let re: Vec<f64> = hc.iter().map(|c| c.re).collect();
    // The dropped imaginary parts show the FFT round-off level.
    let floor = (1e-15 * peak).max(10.0 * imag * peak.max(1.0));
    let (first, h) = trim(&re, floor);
    let x0 = (first as f64 - (lay.n / 2) as f64) * lay.dx;
    let decay_rate = decay_rate(&h, x0, lay.dx, floor);
    Ok(Outcome::Done(Attempt {
        part: DensityPart { x0, dx: lay.dx, h, m },
        plateau,
        imag,
        tail,
        band_edge,
        grid_points: lay.n,
        floor,
        decay_rate,
    }))
}

/// Lattice step and integer indices of the atoms, or an unsupported-support error.
fn lattice_indices(d: &MixedDistribution, settings: &Settings) -> Result<(f64, Vec<i64>)> {
    let q = d.lattice_step(settings.lattice).ok_or(Error::UnsupportedSupport)?;
    let mut idx = Vec::with_capacity(d.atoms.len());
    for a in &d.atoms {
        let k = (a.location / q).round();
        if (a.location - k * q).abs() > 1e-9 * a.location.abs().max(1.0) {
            return Err(Error::UnsupportedSupport);
        }
        idx.push(k as i64);
    }
    Ok((q, idx))
}

/// Quasi-Lévy triplet of a QID distribution with lattice-supported atoms.
pub fn extract_triplet(d: &MixedDistribution, settings: &Settings) -> Result<QuasiLevyTriplet> {
    let (q, idx) = lattice_indices(d, settings).stage("lattice")?;
    let verdict = certified(d, settings)?;
    let mut diag = ExtractionDiagnostics {
        lattice_step: q,
        ..Default::default()
    };

    let masses = d.masses();
    let rep = lattice_log(q, &idx, &masses, settings.tol_zero).stage("discrete log")?;
    let imag = rep
        .terms
        .iter()
        .map(|(_, c)| c.im.abs())
        .fold(rep.log_at_zero.im.abs(), f64::max);
    if imag > 1e-6 {
        return Err(Error::Realness {
            what: "atoms",
            residue: imag,
        })
        .stage("discrete log");
    }
    if imag > 1e-8 {
        diag.warnings.push(format!("imaginary residue {imag:.3e} in c_y"));
    }
    diag.imag_residue = imag;
    diag.discrete_residual = rep.residual;
    // Coefficients at the FFT round-off level carry no information.
    let floor = imag.max(1e-16);
    let atoms: Vec<(f64, f64)> = rep
        .terms
        .iter()
        .filter(|(_, c)| c.re.abs() > floor)
        .map(|(y, c)| (*y, c.re))
        .collect();

    let has_density = d.p < 1.0 && d.density.is_some();
    let part = if has_density {
        density_part(d, verdict.eps_d.unwrap_or(verdict.eps_f), settings, &mut diag)?
    } else {
        DensityPart {
            x0: 0.0,
            dx: 0.0,
            h: Vec::new(),
            m: 0,
        }
    };

    Ok(QuasiLevyTriplet {
        a: 0.0,
        gamma0: rep.kappa,
        atoms,
        x0: part.x0,
        dx: part.dx,
        h: part.h,
        jump: part.m as f64,
        m: part.m,
        diagnostics: diag,
    })
}

/// `1 / F = sum b_y e^{izy} + int g(x) e^{izx} dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseRepresentation {
    pub atoms: Vec<(f64, Complex64)>,
    pub x0: f64,
    pub dx: f64,
    pub g: Vec<f64>,
    /// `max |G F - 1|` on the verification grid.
    pub residual: f64,
    pub verification_window: f64,
}

impl InverseRepresentation {
    pub fn eval(&self, z: f64) -> Complex64 {
        let mut acc: Complex64 = self.atoms.iter().map(|(y, b)| b * Complex64::from_polar(1.0, y * z)).sum();
        if !self.g.is_empty() {
            acc += spectral_kernel(&self.g, self.x0, self.dx, z);
        }
        acc
    }
}

const VERIFY_WINDOW: f64 = 30.0;
const VERIFY_POINTS: usize = 601;

/// `G = 1/F` split into its almost periodic part `1/F_d` and the transform
/// of an integrable `g`, verified by `G F = 1` on `[-30, 30]`.
pub fn invert_cf(d: &MixedDistribution, settings: &Settings) -> Result<InverseRepresentation> {
    let verdict = certified(d, settings)?;
    let weights: Vec<f64> = d.masses().iter().map(|a| a * d.p).collect();
    let mut s = settings.clone();
    s.lattice = settings.lattice.or(d.lattice_hint);
    let inv = wiener_inverse_ap(&d.locations(), &weights, &s).stage("discrete inverse")?;
    let mut rep = InverseRepresentation {
        atoms: inv.terms,
        x0: 0.0,
        dx: 0.0,
        g: Vec::new(),
        residual: 0.0,
        verification_window: VERIFY_WINDOW,
    };

    if d.p < 1.0 && d.density.is_some() {
        let mut warnings = Vec::new();
        let band = choose_band(d, verdict.eps_d.unwrap_or(verdict.eps_f), &mut warnings);
        check_resolution(d, band).stage("density inverse")?;
        let mut half_width = initial_half_width(d, d.lattice_step(settings.lattice).unwrap_or(1.0));
        let mut planner = FftPlanner::new();
        loop {
            let lay = layout(half_width, band)
                .ok_or(Error::GridLimit {
                    max_points: MAX_GRID_POINTS,
                })
                .stage("density inverse")?;
            let n = lay.n as i64;
            let band_edge = (n / 2) as f64 * lay.dz;
            let s: Vec<Complex64> = (-n / 2..n / 2)
                .into_par_iter()
                .map(|k| {
                    let z = k as f64 * lay.dz;
                    let (fd, fac) = eval_cf_parts(d, z).unwrap_or((Complex64::new(1.0, 0.0), Complex64::new(f64::NAN, 0.0)));
                    (1.0 / (fd + fac) - 1.0 / fd) * taper(z, band_edge)
                })
                .collect();
            let gc = inverse_transform(&mut planner, &s, lay.dz);
            if tail_ratio(&gc) > 1e-10 && layout(2.0 * half_width, band).is_some() {
                half_width *= 2.0;
                continue;
            }
            let peak = gc.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
            let imag = gc.iter().map(|c| c.im.abs()).fold(0.0, f64::max) / peak.max(1.0);
            if imag > 1e-6 {
                return Err(Error::Realness {
                    what: "inverse density",
                    residue: imag,
                })
                .stage("density inverse");
            }
            let re: Vec<f64> = gc.iter().map(|c| c.re).collect();
            let (first, g) = trim(&re, 1e-15 * peak);
            rep.x0 = (first as f64 - (lay.n / 2) as f64) * lay.dx;
            rep.dx = lay.dx;
            rep.g = g;
            break;
        }
    }

    let residual = (0..VERIFY_POINTS)
        .into_par_iter()
        .map(|k| {
            let z = -VERIFY_WINDOW + 2.0 * VERIFY_WINDOW * k as f64 / (VERIFY_POINTS - 1) as f64;
            let f = eval_cf_parts(d, z).map(|(a, b)| a + b).unwrap_or(Complex64::new(f64::NAN, 0.0));
            (rep.eval(z) * f - 1.0).norm()
        })
        .reduce(|| 0.0, |a: f64, b: f64| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) });
    let at_zero = (rep.eval(0.0) - 1.0).norm();
    rep.residual = residual.max(at_zero);
    if !(rep.residual <= 1e-8) {
        return Err(Error::Inversion { residual: rep.residual }).stage("verification");
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfn::eval_cf;
    use crate::model::DensitySpec;
    use crate::triplet::{beta_near_zero_moment, levy_khintchine_eval, nu_measures, reconstruct_cf};

    fn sup_error(d: &MixedDistribution, t: &QuasiLevyTriplet) -> f64 {
        (0..=400)
            .map(|k| {
                let z = -20.0 + 0.1 * k as f64 + 0.0123;
                (reconstruct_cf(t, z) - eval_cf(d, z).unwrap()).norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn point_mass_gives_zero_triplet() {
        let t = extract_triplet(&MixedDistribution::point_mass(0.0), &Settings::default()).unwrap();
        assert_eq!(t.gamma0, 0.0);
        assert!(t.atoms.iter().all(|(_, c)| c.abs() < 1e-15));
        assert!(t.h.is_empty());
        assert_eq!(t.m, 0);

        let shifted = extract_triplet(&MixedDistribution::point_mass(2.0), &Settings::default()).unwrap();
        assert!((shifted.gamma0 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bernoulli_triplet() {
        let d = MixedDistribution::discrete(&[(0.0, 0.75), (1.0, 0.25)]).unwrap();
        let t = extract_triplet(&d, &Settings::default()).unwrap();
        assert_eq!(t.m, 0);
        assert!(t.gamma0.abs() < 1e-12);
        let c = |y: f64| t.atoms.iter().find(|a| (a.0 - y).abs() < 1e-9).map_or(0.0, |a| a.1);
        assert!((c(1.0) - 1.0 / 3.0).abs() < 1e-12);
        assert!((c(2.0) + 1.0 / 18.0).abs() < 1e-12);
        assert!((c(3.0) - 1.0 / 81.0).abs() < 1e-12);
        assert!(c(-1.0).abs() < 1e-14);
        assert!(sup_error(&d, &t) < 1e-10);
        for z in [1.0, PI, 10.0] {
            assert!((levy_khintchine_eval(&t, z) - reconstruct_cf(&t, z)).norm() < 1e-8);
        }
    }

    #[test]
    fn non_lattice_support_is_refused() {
        let d = MixedDistribution::discrete(&[(0.0, 0.6), (1.0, 0.3), (2f64.sqrt(), 0.1)]).unwrap();
        let e = extract_triplet(&d, &Settings::default()).unwrap_err();
        assert!(matches!(e, Error::Stage { source, .. } if matches!(*source, Error::UnsupportedSupport)));
    }

    #[test]
    fn not_qid_is_refused_with_stage() {
        let d = MixedDistribution::discrete(&[(0.0, 0.5), (1.0, 0.5)]).unwrap();
        match extract_triplet(&d, &Settings::default()).unwrap_err() {
            Error::Stage { stage, .. } => assert_eq!(stage, "qid check"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn gaussian_mixture_example() {
        let d = MixedDistribution::mixed(0.001, &[(0.0, 1.0)], DensitySpec::gaussian(1.0, 1.0)).unwrap();
        let t = extract_triplet(&d, &Settings::default()).unwrap();
        assert_ne!(t.m, 0);
        assert!(!t.h.is_empty());
        assert!(sup_error(&d, &t) < 1e-6, "{}", sup_error(&d, &t));
        for z in [0.7, 3.7, 12.0] {
            assert!((levy_khintchine_eval(&t, z) - reconstruct_cf(&t, z)).norm() < 1e-8);
        }
        // Index of R(z) = 1 + 999 e^{iz - z^2/2} by direct phase tracking.
        let r = |z: f64| 1.0 + 999.0 * Complex64::new(-0.5 * z * z, z).exp();
        let mut turn = 0.0;
        let mut prev = r(-12.0);
        for k in 1..=240_000 {
            let cur = r(-12.0 + k as f64 * 1e-4);
            turn += (cur / prev).arg();
            prev = cur;
        }
        assert_eq!(t.m, (turn / (2.0 * PI)).round() as i64);

        let a = nu_measures(&t, 0.1).unwrap();
        let b = nu_measures(&t, 0.01).unwrap();
        let c = nu_measures(&t, 0.001).unwrap();
        assert!(b.plus - a.plus > 1.0 && c.plus - b.plus > 1.0);
        assert!(b.minus - a.minus > 1.0 && c.minus - b.minus > 1.0);
        assert!(beta_near_zero_moment(&t, 0.5).unwrap().is_finite());
    }

    #[test]
    fn inverses() {
        let s = Settings::default();
        let one = invert_cf(&MixedDistribution::point_mass(0.0), &s).unwrap();
        assert!(one.g.is_empty());
        assert!((one.eval(1.7) - 1.0).norm() < 1e-14);

        let d = MixedDistribution::discrete(&[(0.0, 0.75), (1.0, 0.25)]).unwrap();
        let inv = invert_cf(&d, &s).unwrap();
        assert!(inv.g.is_empty());
        for (y, b) in &inv.atoms {
            let k = y.round() as i32;
            let want = if k < 0 { 0.0 } else { 4.0 / 3.0 * (-1.0f64 / 3.0).powi(k) };
            assert!((b - want).norm() < 1e-12);
        }

        let d = MixedDistribution::mixed(0.001, &[(0.0, 1.0)], DensitySpec::gaussian(1.0, 1.0)).unwrap();
        let inv = invert_cf(&d, &s).unwrap();
        assert!(inv.residual < 1e-8);
        assert!((inv.eval(0.0) - 1.0).norm() < 1e-8);
    }
}
