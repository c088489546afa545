//! Characteristic functions of mixed distributions and the decision
//! procedure for a positive infimum of their modulus.

pub mod scan;

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{detect_lattice, validate_distribution, Atom, MixedDistribution};
use crate::settings::Settings;
pub use scan::Minimum;

/// `p * sum a_y e^{izy}`.
pub fn discrete_cf(atoms: &[Atom], p: f64, z: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for a in atoms {
        acc += Complex64::from_polar(a.mass, z * a.location);
    }
    acc * p
}

/// `(F_d(z), F_ac(z))` with the mixing weights folded in.
pub fn eval_cf_parts(d: &MixedDistribution, z: f64) -> Result<(Complex64, Complex64)> {
    let fd = discrete_cf(&d.atoms, d.p, z);
    let fac = match &d.density {
        Some(f) if d.p < 1.0 => f.cf(z)? * (1.0 - d.p),
        _ => Complex64::new(0.0, 0.0),
    };
    Ok((fd, fac))
}

pub fn eval_cf(d: &MixedDistribution, z: f64) -> Result<Complex64> {
    let (fd, fac) = eval_cf_parts(d, z)?;
    Ok(fd + fac)
}

/// Fails with a refinement error when a sampled density cannot be
/// transformed at `|z| = zmax`.
pub fn check_resolution(d: &MixedDistribution, zmax: f64) -> Result<()> {
    if let Some(f) = &d.density {
        let limit = f.max_frequency();
        if zmax > limit {
            return Err(Error::Refinement {
                z: zmax,
                required_step: PI / zmax,
            });
        }
    }
    Ok(())
}

/// Infallible evaluator for `|z| <= zmax`, after `check_resolution`.
pub(crate) fn evaluator(d: &MixedDistribution, zmax: f64) -> Result<impl Fn(f64) -> Complex64 + Sync + '_> {
    check_resolution(d, zmax)?;
    Ok(move |z: f64| eval_cf(d, z).unwrap_or(Complex64::new(f64::NAN, f64::NAN)))
}

/// Moduli `|F(z0 + j h)|` for a block of consecutive grid points.  The atom
/// phasors advance by one rotation per point and are reseeded every 256
/// points, so each point costs one density transform plus a product per atom.
pub(crate) fn modulus_block(d: &MixedDistribution) -> impl Fn(f64, f64, &mut [f64]) + Sync + '_ {
    const RESEED: usize = 256;
    move |z0: f64, h: f64, out: &mut [f64]| {
        let rot: Vec<Complex64> = d.atoms.iter().map(|a| Complex64::from_polar(1.0, h * a.location)).collect();
        let mut cur: Vec<Complex64> = Vec::with_capacity(d.atoms.len());
        for (j, v) in out.iter_mut().enumerate() {
            let z = z0 + j as f64 * h;
            if j % RESEED == 0 {
                cur.clear();
                cur.extend(d.atoms.iter().map(|a| Complex64::from_polar(a.mass, z * a.location)));
            }
            let mut fd = Complex64::new(0.0, 0.0);
            for (c, r) in cur.iter_mut().zip(&rot) {
                fd += *c;
                *c *= r;
            }
            let fac = match &d.density {
                Some(f) if d.p < 1.0 => f.cf(z).unwrap_or(Complex64::new(f64::NAN, 0.0)) * (1.0 - d.p),
                _ => Complex64::new(0.0, 0.0),
            };
            *v = (fd * d.p + fac).norm();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridSource {
    Distribution,
    Triplet,
    Synthetic,
}

/// Samples of a complex function on a strictly increasing real grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CharFunctionGrid {
    pub z: Vec<f64>,
    pub values: Vec<Complex64>,
    pub max_step: f64,
    pub source: GridSource,
}

impl CharFunctionGrid {
    pub fn from_points(z: Vec<f64>, values: Vec<Complex64>, source: GridSource) -> Result<Self> {
        if z.len() != values.len() || z.is_empty() {
            return Err(Error::Input("grid and values must have equal, nonzero length".into()));
        }
        if z.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Input("grid must be strictly increasing".into()));
        }
        let max_step = z.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        Ok(Self {
            z,
            values,
            max_step,
            source,
        })
    }

    /// Uniform grid on `[lo, hi]` with `n` points, evaluated in parallel.
    pub fn sample<F>(f: F, lo: f64, hi: f64, n: usize, source: GridSource) -> Self
    where
        F: Fn(f64) -> Complex64 + Sync,
    {
        let n = n.max(2);
        let h = (hi - lo) / (n - 1) as f64;
        let z: Vec<f64> = (0..n).map(|j| lo + j as f64 * h).collect();
        let values = z.par_iter().map(|&t| f(t)).collect();
        Self {
            z,
            values,
            max_step: h,
            source,
        }
    }

    /// Symmetric grid `[-half_width, half_width]` with `2 * half_points + 1` points.
    pub fn symmetric<F>(f: F, half_width: f64, half_points: usize, source: GridSource) -> Self
    where
        F: Fn(f64) -> Complex64 + Sync,
    {
        let h = half_width / half_points.max(1) as f64;
        let n = 2 * half_points.max(1) + 1;
        let z: Vec<f64> = (0..n)
            .map(|j| (j as f64 - half_points.max(1) as f64) * h)
            .collect();
        let values = z.par_iter().map(|&t| f(t)).collect();
        Self {
            z,
            values,
            max_step: h,
            source,
        }
    }

    pub fn of_distribution(d: &MixedDistribution, half_width: f64, half_points: usize) -> Result<Self> {
        let f = evaluator(d, half_width)?;
        Ok(Self::symmetric(f, half_width, half_points, GridSource::Distribution))
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// Violations of the distribution-source invariants (`F(0) = 1`, conjugate symmetry).
    pub fn invariant_issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.source != GridSource::Distribution {
            return out;
        }
        for (k, z) in self.z.iter().enumerate() {
            if *z == 0.0 && (self.values[k] - 1.0).norm() > 1e-12 {
                out.push(format!("value at 0 is {}", self.values[k]));
            }
        }
        let n = self.z.len();
        for k in 0..n / 2 {
            let j = n - 1 - k;
            if (self.z[k] + self.z[j]).abs() < 1e-12 * self.z[j].abs().max(1.0)
                && (self.values[k] - self.values[j].conj()).norm() > 1e-10
            {
                out.push(format!("conjugate symmetry fails at z = {}", self.z[j]));
            }
        }
        out
    }

    /// CSV with header `z,re,im,modulus`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("z,re,im,modulus\n");
        for (z, v) in self.z.iter().zip(&self.values) {
            let _ = writeln!(s, "{z},{},{},{}", v.re, v.im, v.norm());
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroPart {
    /// A zero of the full characteristic function.
    Full,
    /// A zero of the discrete part `F_d` (so `inf |F_d| = 0`).
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroCertificate {
    pub z: f64,
    pub modulus: f64,
    pub part: ZeroPart,
}

/// Zero search inside `window` using the grid for candidates and `f` for
/// polishing. A zero is certified only when the polished modulus is below `tol`.
pub fn find_zero<F>(
    grid: &CharFunctionGrid,
    f: &F,
    window: (f64, f64),
    tol: f64,
) -> Result<Option<ZeroCertificate>>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let (lo, hi) = window;
    let (glo, ghi) = (grid.z[0], grid.z[grid.z.len() - 1]);
    if lo < glo || hi > ghi || !(hi > lo) {
        return Err(Error::WindowMismatch {
            lo,
            hi,
            grid_lo: glo,
            grid_hi: ghi,
        });
    }
    let idx: Vec<usize> = (0..grid.z.len())
        .filter(|&k| grid.z[k] >= lo && grid.z[k] <= hi)
        .collect();
    if idx.is_empty() {
        return Ok(None);
    }
    let values: Vec<f64> = idx.iter().map(|&k| grid.values[k].norm()).collect();
    let best = scan::local_minima(&values, 64)
        .into_par_iter()
        .map(|j| {
            let k = idx[j];
            let a = if k > 0 { grid.z[k - 1] } else { grid.z[k] };
            let b = if k + 1 < grid.z.len() { grid.z[k + 1] } else { grid.z[k] };
            scan::polish(f, a.max(lo), b.min(hi))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .min_by(|a, b| a.modulus.total_cmp(&b.modulus).then(a.z.total_cmp(&b.z)));
    Ok(best.filter(|m| m.modulus < tol).map(|m| ZeroCertificate {
        z: m.z,
        modulus: m.modulus,
        part: ZeroPart::Full,
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ApMethod {
    /// Atoms on `step * Z`: exact minimum over one period.
    Lattice { step: f64 },
    /// Atom differences without small integer relations: Kronecker's theorem
    /// makes the infimum the polygon bound `max(0, 2 max a - sum a)`.
    Kronecker,
    /// Plain scan over a finite window; only an estimate of the infimum.
    Scan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApInfimum {
    /// Estimate (lower bound unless `surrogate`) of `inf |F_d|`.
    pub estimate: f64,
    /// Smallest modulus found by the scan and where.
    pub min_found: Minimum,
    pub window: f64,
    pub step: f64,
    pub method: ApMethod,
    pub surrogate: bool,
}

/// Offsets used by the Kronecker relation search.
const RELATION_BOUND: i64 = 20;

/// Some nonzero `n` with `|n_j| <= bound` and `sum n_j v_j = 0` (relative to `1e-9`).
pub fn integer_relation(v: &[f64], bound: i64) -> Option<Vec<i64>> {
    let r = v.len();
    if r == 0 {
        return None;
    }
    let mut n = vec![-bound; r];
    loop {
        if n.iter().any(|&k| k != 0) {
            // Only report relations whose first nonzero entry is positive.
            let first = n.iter().find(|&&k| k != 0).copied().unwrap();
            if first > 0 {
                let s: f64 = n.iter().zip(v).map(|(k, x)| *k as f64 * x).sum();
                let scale: f64 = n.iter().zip(v).map(|(k, x)| (*k as f64 * x).abs()).sum();
                if s.abs() <= 1e-9 * scale {
                    let g = n.iter().fold(0i64, |g, &k| gcd(g, k.abs()));
                    return Some(n.iter().map(|k| k / g).collect());
                }
            }
        }
        let mut i = 0;
        loop {
            if i == r {
                return None;
            }
            n[i] += 1;
            if n[i] > bound {
                n[i] = -bound;
                i += 1;
            } else {
                break;
            }
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn default_window(locations: &[f64], settings: &Settings) -> f64 {
    if let Some(w) = settings.window {
        return w;
    }
    let mut y = locations.to_vec();
    y.sort_by(f64::total_cmp);
    let gap = y.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if gap.is_finite() {
        (100.0 * 2.0 * PI / gap).max(1e4)
    } else {
        1e4
    }
}

/// Lower-bound estimate of `inf_z |sum w_k e^{i z y_k}|`.
pub fn inf_modulus_ap(locations: &[f64], weights: &[f64], settings: &Settings) -> ApInfimum {
    let total: f64 = weights.iter().map(|w| w.abs()).sum();
    let center = locations.iter().copied().fold(f64::INFINITY, f64::min);
    let atoms: Vec<Atom> = locations
        .iter()
        .zip(weights)
        .map(|(&y, &w)| Atom::new(y, w))
        .collect();
    if atoms.len() == 1 {
        let m = Minimum { z: 0.0, modulus: total };
        return ApInfimum {
            estimate: total,
            min_found: m,
            window: 0.0,
            step: 0.0,
            method: ApMethod::Lattice { step: 1.0 },
            surrogate: false,
        };
    }

    if let Some(q) = settings.lattice.or_else(|| detect_lattice(&atoms)) {
        let idx: Vec<i64> = locations.iter().map(|y| (y / q).round() as i64).collect();
        let lo = *idx.iter().min().unwrap();
        let span = (idx.iter().max().unwrap() - lo) as usize;
        let terms: Vec<(f64, f64)> = idx
            .iter()
            .zip(weights)
            .map(|(k, w)| ((k - lo) as f64, *w))
            .collect();
        let p = move |t: f64| {
            terms
                .iter()
                .map(|(k, w)| Complex64::from_polar(*w, k * t))
                .sum::<Complex64>()
        };
        let n = (64 * (span + 1)).max(2048);
        let m = scan::scan_minimum(&p, 0.0, 2.0 * PI, n + 1, 32);
        let min_found = Minimum {
            z: m.z / q,
            modulus: m.modulus,
        };
        return ApInfimum {
            estimate: m.modulus,
            min_found,
            window: 2.0 * PI / q,
            step: 2.0 * PI / (q * n as f64),
            method: ApMethod::Lattice { step: q },
            surrogate: false,
        };
    }

    let window = default_window(locations, settings);
    let spread = locations.iter().map(|y| (y - center).abs()).fold(0.0, f64::max);
    let step = 2.0 * PI / (16.0 * spread.max(1e-12));
    let n = ((window / step).ceil() as usize).clamp(1024, 1 << 24);
    let shifted: Vec<(f64, f64)> = locations.iter().zip(weights).map(|(y, w)| (y - center, *w)).collect();
    let f = move |z: f64| {
        shifted
            .iter()
            .map(|(y, w)| Complex64::from_polar(*w, y * z))
            .sum::<Complex64>()
    };
    let min_found = scan::scan_minimum(&f, 0.0, window, n + 1, 256);

    let diffs: Vec<f64> = locations[1..].iter().map(|y| y - locations[0]).collect();
    let independent = diffs.len() <= 4 && integer_relation(&diffs, RELATION_BOUND).is_none();
    if independent {
        let max = weights.iter().map(|w| w.abs()).fold(0.0, f64::max);
        ApInfimum {
            estimate: (2.0 * max - total).max(0.0),
            min_found,
            window,
            step: window / n as f64,
            method: ApMethod::Kronecker,
            surrogate: false,
        }
    } else {
        ApInfimum {
            estimate: min_found.modulus,
            min_found,
            window,
            step: window / n as f64,
            method: ApMethod::Scan,
            surrogate: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Qid,
    NotQid,
    Undecided,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Qid => "QID",
            Verdict::NotQid => "notQID",
            Verdict::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QidVerdict {
    pub verdict: Verdict,
    /// Estimate of `inf |F|`.
    pub eps_f: f64,
    /// Estimate of `inf |F_d|`; `None` for the direct infimum route.
    pub eps_d: Option<f64>,
    pub zero: Option<ZeroCertificate>,
    pub tol_zero: f64,
    pub tol_qid: f64,
    /// `|F_ac| < eps_d / 2` beyond this point.
    pub cutoff: f64,
    /// `F` was scanned on `[0, scan_window]` (conjugate symmetry covers the rest).
    pub scan_window: f64,
    pub discrete: Option<ApInfimum>,
}

impl QidVerdict {
    pub fn summary(&self) -> String {
        let mut s = format!(
            "verdict: {}\ninf|F| estimate: {:.6e}\n",
            self.verdict.label(),
            self.eps_f
        );
        if let Some(e) = self.eps_d {
            let _ = writeln!(s, "inf|F_d| estimate: {e:.6e}");
        }
        if let Some(ap) = &self.discrete {
            let method = match ap.method {
                ApMethod::Lattice { step } => format!("lattice (step {step})"),
                ApMethod::Kronecker => "incommensurable atoms, Kronecker bound".to_string(),
                ApMethod::Scan => "scan surrogate".to_string(),
            };
            let _ = writeln!(
                s,
                "discrete part: {method}; smallest |F_d| found {:.6e} at z = {:.10} (window {:.4e})",
                ap.min_found.modulus, ap.min_found.z, ap.window
            );
        }
        match &self.zero {
            Some(c) => {
                let part = if c.part == ZeroPart::Full { "F" } else { "F_d" };
                let _ = writeln!(s, "zero certificate: {part}({:.12}) = {:.3e}", c.z, c.modulus);
            }
            None => s.push_str("zero certificate: none\n"),
        }
        let _ = writeln!(
            s,
            "tolerances: tol_zero = {:e}, tol_qid = {:e}; tail cutoff M = {:.6}, scanned [0, {:.6}]",
            self.tol_zero, self.tol_qid, self.cutoff, self.scan_window
        );
        s
    }
}

fn classify(eps: f64, zero: bool, s: &Settings) -> Verdict {
    if zero || eps < s.tol_zero {
        Verdict::NotQid
    } else if eps > s.tol_qid {
        Verdict::Qid
    } else {
        Verdict::Undecided
    }
}

/// Scan step resolving every oscillation of `F` up to the atom spread and density extent.
fn scan_step(d: &MixedDistribution) -> f64 {
    let ymax = d.atoms.iter().map(|a| a.location.abs()).fold(0.0, f64::max);
    let e = d.density.as_ref().map_or(0.0, |f| f.extent());
    1.0 / (8.0 * (ymax + e + 1.0))
}

/// Zero-freeness of `F` plus a positive infimum of `|F_d|`.
pub fn qid_check(d: &MixedDistribution, settings: &Settings) -> Result<QidVerdict> {
    let report = validate_distribution(d);
    if !report.is_valid() {
        return Err(Error::InvalidDistribution(report.issues));
    }
    let locations = d.locations();
    let weights: Vec<f64> = d.atoms.iter().map(|a| d.p * a.mass).collect();
    let mut s = settings.clone();
    s.lattice = settings.lattice.or(d.lattice_hint);
    let ap = inf_modulus_ap(&locations, &weights, &s);
    let eps_d = ap.estimate;

    if eps_d < s.tol_zero {
        let zero = (ap.min_found.modulus < s.tol_zero).then_some(ZeroCertificate {
            z: ap.min_found.z,
            modulus: ap.min_found.modulus,
            part: if d.p == 1.0 { ZeroPart::Full } else { ZeroPart::Discrete },
        });
        return Ok(QidVerdict {
            verdict: Verdict::NotQid,
            eps_f: eps_d,
            eps_d: Some(eps_d),
            zero,
            tol_zero: s.tol_zero,
            tol_qid: s.tol_qid,
            cutoff: 0.0,
            scan_window: ap.window,
            discrete: Some(ap),
        });
    }

    let (cutoff, tail) = match &d.density {
        Some(f) if d.p < 1.0 => {
            let m = f.decay_cutoff(0.5 * eps_d / (1.0 - d.p));
            (m, (1.0 - d.p) * f.tail_bound(m))
        }
        _ => (0.0, 0.0),
    };
    let period = match ap.method {
        ApMethod::Lattice { step } => 2.0 * PI / step,
        _ => 2.0 * PI / d.min_gap().unwrap_or(1.0),
    };
    let zmax = cutoff + period;
    let f = evaluator(d, zmax)?;
    let n = ((zmax / scan_step(d)).ceil() as usize).clamp(1024, 1 << 24);
    let m = scan::scan_minimum_blocked(&f, &modulus_block(d), 0.0, zmax, n + 1, 64);
    let zero = (m.modulus < s.tol_zero).then_some(ZeroCertificate {
        z: m.z,
        modulus: m.modulus,
        part: ZeroPart::Full,
    });
    let eps_f = m.modulus.min(eps_d - tail);
    Ok(QidVerdict {
        verdict: classify(eps_f, zero.is_some(), &s),
        eps_f,
        eps_d: Some(eps_d),
        zero,
        tol_zero: s.tol_zero,
        tol_qid: s.tol_qid,
        cutoff,
        scan_window: zmax,
        discrete: Some(ap),
    })
}

/// The direct route: a long scan of `|F|` without splitting off `F_d`.
/// The window covers the decay region of `F_ac` plus four lattice periods
/// (or the incommensurable scan window).
pub fn qid_check_by_infimum(d: &MixedDistribution, settings: &Settings) -> Result<QidVerdict> {
    let report = validate_distribution(d);
    if !report.is_valid() {
        return Err(Error::InvalidDistribution(report.issues));
    }
    let decay = match &d.density {
        Some(f) if d.p < 1.0 => f.decay_cutoff(1e-12 / (1.0 - d.p)),
        _ => 0.0,
    };
    let reach = match settings.lattice.or(d.lattice_hint).or_else(|| detect_lattice(&d.atoms)) {
        Some(q) => 4.0 * 2.0 * PI / q,
        None => default_window(&d.locations(), settings),
    };
    let zmax = decay + reach;
    let f = evaluator(d, zmax)?;
    let n = ((zmax / scan_step(d)).ceil() as usize).clamp(1024, 1 << 24);
    let m = scan::scan_minimum_blocked(&f, &modulus_block(d), 0.0, zmax, n + 1, 256);
    let zero = (m.modulus < settings.tol_zero).then_some(ZeroCertificate {
        z: m.z,
        modulus: m.modulus,
        part: ZeroPart::Full,
    });
    Ok(QidVerdict {
        verdict: classify(m.modulus, zero.is_some(), settings),
        eps_f: m.modulus,
        eps_d: None,
        zero,
        tol_zero: settings.tol_zero,
        tol_qid: settings.tol_qid,
        cutoff: decay,
        scan_window: zmax,
        discrete: None,
    })
}

/// Best translation number `tau` in `[lo, hi]` for the trigonometric sum,
/// together with the bound `sum |w_k| |e^{i tau y_k} - 1| >= sup_z |F(z + tau) - F(z)|`.
pub fn find_translation_number(locations: &[f64], weights: &[f64], lo: f64, hi: f64) -> (f64, f64) {
    let slack = |t: f64| -> f64 {
        locations
            .iter()
            .zip(weights)
            .map(|(y, w)| w.abs() * (Complex64::from_polar(1.0, t * y) - 1.0).norm())
            .sum()
    };
    let spread = locations.iter().map(|y| y.abs()).fold(0.0, f64::max).max(1e-12);
    let step = 2.0 * PI / (32.0 * spread);
    let n = (((hi - lo) / step).ceil() as usize).clamp(16, 1 << 24);
    let h = (hi - lo) / n as f64;
    let best = (0..=n)
        .into_par_iter()
        .map(|j| {
            let t = lo + j as f64 * h;
            (slack(t), t)
        })
        .reduce(|| (f64::INFINITY, lo), |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    (best.1, best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DensitySpec;

    fn bern() -> MixedDistribution {
        MixedDistribution::discrete(&[(0.0, 0.75), (1.0, 0.25)]).unwrap()
    }

    #[test]
    fn small_examples() {
        let d = MixedDistribution::point_mass(0.0);
        assert_eq!(eval_cf(&d, 3.7).unwrap(), Complex64::new(1.0, 0.0));
        let v = eval_cf(&bern(), PI).unwrap();
        assert!((v - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        let ex = MixedDistribution::mixed(0.001, &[(0.0, 1.0)], DensitySpec::gaussian(1.0, 1.0)).unwrap();
        for z in [0.0, 0.5, 3.0] {
            let expect = 0.001 + 0.999 * Complex64::from_polar((-z * z / 2.0f64).exp(), z);
            assert!((eval_cf(&ex, z).unwrap() - expect).norm() < 1e-15);
        }
        assert_eq!(eval_cf(&ex, 0.0).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn parts_at_incommensurable_zero() {
        let r2 = 2f64.sqrt();
        let d = MixedDistribution::mixed(0.5, &[(0.0, 0.5), (r2, 0.5)], DensitySpec::gaussian(0.0, 1.0)).unwrap();
        let z = PI / r2;
        let (fd, fac) = eval_cf_parts(&d, z).unwrap();
        assert!(fd.norm() < 1e-15);
        assert!((fac - Complex64::new(0.5 * (-PI * PI / 4.0).exp(), 0.0)).norm() < 1e-15);
        let (_, fac) = eval_cf_parts(&bern(), 1.0).unwrap();
        assert_eq!(fac, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn zero_search_examples() {
        let r2 = 2f64.sqrt();
        let fd = |z: f64| Complex64::new(0.5, 0.0) + Complex64::from_polar(0.5, r2 * z);
        let g = CharFunctionGrid::sample(fd, 0.0, 3.0, 301, GridSource::Synthetic);
        let c = find_zero(&g, &fd, (0.0, 3.0), 1e-9).unwrap().unwrap();
        assert!((c.z - PI / r2).abs() < 1e-9);

        let b = bern();
        let f = |z: f64| eval_cf(&b, z).unwrap();
        let g = CharFunctionGrid::sample(f, 0.0, 10.0, 1001, GridSource::Distribution);
        assert!(find_zero(&g, &f, (0.0, 10.0), 1e-9).unwrap().is_none());
        assert!(matches!(find_zero(&g, &f, (0.0, 11.0), 1e-9), Err(Error::WindowMismatch { .. })));

        let ex = MixedDistribution::mixed(0.001, &[(0.0, 1.0)], DensitySpec::gaussian(1.0, 1.0)).unwrap();
        let f = |z: f64| eval_cf(&ex, z).unwrap();
        let g = CharFunctionGrid::sample(f, 0.0, 8.0, 801, GridSource::Distribution);
        assert!(find_zero(&g, &f, (0.0, 8.0), 1e-9).unwrap().is_none());
    }

    #[test]
    fn infimum_of_discrete_parts() {
        let s = Settings::default();
        let a = inf_modulus_ap(&[0.0, 1.0], &[0.75, 0.25], &s);
        assert!((a.estimate - 0.5).abs() < 1e-14);
        assert_eq!(a.method, ApMethod::Lattice { step: 1.0 });

        let a = inf_modulus_ap(&[0.0, 2f64.sqrt()], &[0.5, 0.5], &s);
        assert!(a.estimate < 1e-12);

        let a = inf_modulus_ap(&[0.0, 1.0, 2f64.sqrt()], &[0.5, 0.3, 0.2], &s);
        assert_eq!(a.method, ApMethod::Kronecker);
        assert_eq!(a.estimate, 0.0);
        assert!(a.min_found.modulus < 1e-3 && a.min_found.modulus > 1e-8, "{:?}", a.min_found);
    }

    #[test]
    fn verdicts() {
        let s = Settings::default();
        assert_eq!(qid_check(&bern(), &s).unwrap().verdict, Verdict::Qid);
        let r2 = 2f64.sqrt();
        let v = qid_check(&MixedDistribution::discrete(&[(0.0, 0.5), (r2, 0.5)]).unwrap(), &s).unwrap();
        assert_eq!(v.verdict, Verdict::NotQid);
        assert!((v.zero.unwrap().z - PI / r2).abs() < 1e-6);
        let ex = MixedDistribution::mixed(0.001, &[(0.0, 1.0)], DensitySpec::gaussian(1.0, 1.0)).unwrap();
        let v = qid_check(&ex, &s).unwrap();
        assert_eq!(v.verdict, Verdict::Qid, "{}", v.summary());
        let v = qid_check(&MixedDistribution::discrete(&[(0.0, 0.5), (1.0, 0.3), (r2, 0.2)]).unwrap(), &s).unwrap();
        assert_eq!(v.verdict, Verdict::NotQid);
        assert!(v.zero.is_none());
    }

    #[test]
    fn relation_search() {
        assert!(integer_relation(&[1.0, 2f64.sqrt()], 20).is_none());
        let r = integer_relation(&[1.0, 2f64.sqrt(), 1.0 + 2f64.sqrt()], 5).unwrap();
        assert_eq!(r, vec![1, 1, -1]);
    }
}
