//! H-moments of a distribution and of the Jordan parts of its quasi-Lévy
//! measure outside the unit ball, and the report comparing the three verdicts.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{grs_check_with, submultiplicative_check, weighted_l1_norm_to, GrsVerdict, MixedDistribution, WeightFunction};
use crate::quad::{classify_tail, gl_composite, regression_slope, Finiteness};
use crate::settings::Settings;
use crate::triplet::{density_parts, extract_triplet, QuasiLevyTriplet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Plus,
    Minus,
    Total,
}

/// The GRS and submultiplicativity preconditions of the moment theorem.
pub fn admissible(h: &WeightFunction, settings: &Settings) -> Result<()> {
    let grs = grs_check_with(h, settings.horizon, 64, settings.tol_grs)?;
    if grs.verdict != GrsVerdict::Satisfied {
        return Err(Error::WeightRejected(format!(
            "{} fails the GRS condition (log H(x)/x = {:.4} at x = {}, verdict {:?})",
            h.name, grs.slope_plus, grs.horizon, grs.verdict
        )));
    }
    let grid: Vec<f64> = (-80..=80).map(|k| k as f64 * 0.5).collect();
    let b = submultiplicative_check(h, &grid)?;
    if b > h.declared_b * (1.0 + 1e-9) {
        return Err(Error::WeightRejected(format!(
            "{} is not submultiplicative with B = {} (found {b})",
            h.name, h.declared_b
        )));
    }
    Ok(())
}

fn add(a: Finiteness, b: Finiteness) -> Finiteness {
    match (a, b) {
        (Finiteness::Infinite, _) | (_, Finiteness::Infinite) => Finiteness::Infinite,
        (Finiteness::Finite(x), Finiteness::Finite(y)) => Finiteness::Finite(x + y),
        (x, y) => Finiteness::Inconclusive {
            partial: partial(x) + partial(y),
        },
    }
}

fn partial(f: Finiteness) -> f64 {
    match f {
        Finiteness::Finite(v) => v,
        Finiteness::Inconclusive { partial } => partial,
        Finiteness::Infinite => f64::INFINITY,
    }
}

/// `int H dmu = p sum H(y) a_y + (1 - p) int H f`.
pub fn h_moment_dist(d: &MixedDistribution, h: &WeightFunction, settings: &Settings) -> Result<Finiteness> {
    admissible(h, settings)?;
    let atoms: f64 = d.atoms.iter().map(|a| d.p * h.times(a.location, a.mass)).sum();
    let dens = match &d.density {
        Some(f) if d.p < 1.0 => match weighted_l1_norm_to(f, h, settings.horizon) {
            Finiteness::Finite(v) => Finiteness::Finite((1.0 - d.p) * v),
            Finiteness::Inconclusive { partial } => Finiteness::Inconclusive {
                partial: (1.0 - d.p) * partial,
            },
            Finiteness::Infinite => Finiteness::Infinite,
        },
        _ => Finiteness::Finite(0.0),
    };
    Ok(add(Finiteness::Finite(atoms), dens))
}

/// Multiple of a measured noise level below which triplet data is ignored.
const NOISE_MARGIN: f64 = 10.0;

/// Both Jordan parts of `H nu` on `{|x| > 1}`, as (plus, minus) verdicts.
fn nu_parts(t: &QuasiLevyTriplet, h: &WeightFunction, settings: &Settings) -> (Finiteness, Finiteness) {
    // Atoms: one shell per distinct |y| > 1, in increasing order.
    // Coefficients below the extraction accuracy are round-off; under a
    // polynomial weight they would otherwise dominate the tail.
    let atom_floor = NOISE_MARGIN * t.diagnostics.discrete_residual.max(t.diagnostics.imag_residue).max(1e-16);
    let kept: Vec<(f64, f64)> = t.atoms.iter().filter(|(_, c)| c.abs() > atom_floor).copied().collect();
    let mut outer: Vec<(f64, f64)> = kept.iter().filter(|(y, _)| y.abs() > 1.0).copied().collect();
    outer.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()));
    let mut plus_atoms: Vec<f64> = Vec::new();
    let mut minus_atoms: Vec<f64> = Vec::new();
    let mut last = f64::NAN;
    for (y, c) in outer {
        if !((y.abs() - last).abs() <= 1e-12 * last.abs()) {
            plus_atoms.push(0.0);
            minus_atoms.push(0.0);
            last = y.abs();
        }
        let v = h.times(y, c.abs());
        if c > 0.0 {
            *plus_atoms.last_mut().unwrap() += v;
        } else {
            *minus_atoms.last_mut().unwrap() += v;
        }
    }
    let tol = settings.tol_grs;

    // Density on dyadic shells out to the horizon.  Outside the outermost
    // samples clearly above the noise floor the grid holds only round-off,
    // which H would amplify, so it is cut there.
    let mut clean = t.clone();
    let floor = NOISE_MARGIN * t.diagnostics.noise_floor;
    let first = clean.h.iter().position(|v| v.abs() > floor);
    let last = clean.h.iter().rposition(|v| v.abs() > floor);
    for (j, v) in clean.h.iter_mut().enumerate() {
        let inside = matches!((first, last), (Some(a), Some(b)) if a <= j && j <= b);
        if !inside || v.abs() < t.diagnostics.noise_floor {
            *v = 0.0;
        }
    }
    let mut plus_shells = Vec::new();
    let mut minus_shells = Vec::new();
    let mut a = 1.0;
    while a < settings.horizon {
        let (p, m) = density_parts(&clean, a, 2.0 * a, |x| h.eval(x));
        plus_shells.push(p);
        minus_shells.push(m);
        a *= 2.0;
    }
    let plus = add(classify_tail(0.0, &plus_atoms, tol), classify_tail(0.0, &plus_shells, tol));
    let minus = add(classify_tail(0.0, &minus_atoms, tol), classify_tail(0.0, &minus_shells, tol));

    // A tail the regression cannot settle by the horizon is still finite
    // when |nu| itself has a measured exponential envelope on both sides:
    // GRS weights grow slower than any exponential.
    if plus.is_finite() && minus.is_finite() {
        return (plus, minus);
    }
    let support = (first.map(|j| clean.x(j)), last.map(|j| clean.x(j)));
    let mut rest = 0.0;
    for sign in [1.0, -1.0] {
        let atom_extent = kept.iter().map(|a| sign * a.0).fold(0.0, f64::max);
        let h_extent = match support {
            (Some(a), Some(b)) => (sign * a).max(sign * b).max(0.0),
            _ => 0.0,
        };
        let extent = atom_extent.max(h_extent).min(settings.horizon);
        if extent < MIN_ENVELOPE_EXTENT {
            continue;
        }
        let Some(env) = tail_envelope(&clean, &kept, sign, extent, tol) else {
            return (plus, minus);
        };
        match envelope_rest(&env, |x| h.eval(sign * x)) {
            Some(r) => rest += r,
            None => return (plus, minus),
        }
    }
    let settle = |f: Finiteness, atoms: &[f64], shells: &[f64]| match f {
        Finiteness::Finite(v) => Finiteness::Finite(v),
        _ => Finiteness::Finite(atoms.iter().sum::<f64>() + shells.iter().sum::<f64>() + rest),
    };
    (
        settle(plus, &plus_atoms, &plus_shells),
        settle(minus, &minus_atoms, &minus_shells),
    )
}

/// Data must reach at least this far out for an envelope fit.
const MIN_ENVELOPE_EXTENT: f64 = 8.0;
const ENVELOPE_BINS: usize = 32;

/// `|nu|` per unit length behaves like `density * e^{-rate (x - extent)}`
/// beyond `extent` on one side.
struct Envelope {
    extent: f64,
    density: f64,
    rate: f64,
}

/// Regression of the log mass per unit length of `|nu|` over the outer half
/// of the data on one side.  Accepted only when it decays faster than `tol`
/// and a power law does not fit clearly better.
fn tail_envelope(t: &QuasiLevyTriplet, atoms: &[(f64, f64)], sign: f64, extent: f64, tol: f64) -> Option<Envelope> {
    let step = t.diagnostics.lattice_step.max(t.dx);
    let width = (extent / (2 * ENVELOPE_BINS) as f64).max(step);
    let mut points = Vec::new();
    let mut a = extent / 2.0;
    while a + width <= extent + 1e-9 * extent {
        let b = a + width;
        let discrete: f64 = atoms
            .iter()
            .filter(|(y, _)| (a..b).contains(&(sign * y)))
            .map(|(_, c)| c.abs())
            .sum();
        let (p, m) = density_parts(t, a, b, |x| if sign * x > 0.0 { 1.0 } else { 0.0 });
        let mass = (discrete + p + m) / width;
        if mass > 0.0 {
            points.push((0.5 * (a + b), mass.ln()));
        }
        a = b;
    }
    if points.len() < 5 {
        return None;
    }
    let exp_slope = regression_slope(&points);
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), *y)).collect();
    let pow_slope = regression_slope(&logs);
    let residual = |pts: &[(f64, f64)], slope: f64| {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        pts.iter().map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum::<f64>()
    };
    // On a short window the two models are hard to tell apart; a power law
    // has to fit clearly better to veto the exponential.
    if !(exp_slope < -tol) || residual(&logs, pow_slope) < 0.5 * residual(&points, exp_slope) {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    Some(Envelope {
        extent,
        density: (my + exp_slope * (extent - mx)).exp(),
        rate: -exp_slope,
    })
}

/// `int_extent^inf H(x) density e^{-rate (x - extent)} dx` on doubling
/// panels; `None` if it has not settled by `1e9`.
fn envelope_rest(env: &Envelope, h: impl Fn(f64) -> f64) -> Option<f64> {
    let f = |x: f64| h(x) * env.density * (-env.rate * (x - env.extent)).exp();
    let mut total = 0.0;
    let mut a = env.extent;
    let mut len = 1.0 / env.rate;
    while a < 1e9 {
        let part = gl_composite(f, a, a + len, len / 8.0);
        total += part;
        a += len;
        if a - env.extent > 40.0 / env.rate && part <= 1e-16 * total {
            return Some(total);
        }
        len *= 2.0;
    }
    None
}

/// `int_{|x|>1} H d nu^+`, `d nu^-` or `d |nu|`.
pub fn h_moment_nu(t: &QuasiLevyTriplet, h: &WeightFunction, variant: Variant, settings: &Settings) -> Result<Finiteness> {
    admissible(h, settings)?;
    let (p, m) = nu_parts(t, h, settings);
    Ok(match variant {
        Variant::Plus => p,
        Variant::Minus => m,
        Variant::Total => add(p, m),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub weight: String,
    pub mu: Finiteness,
    pub nu_plus: Finiteness,
    pub nu_total: Finiteness,
    pub consistent: bool,
    pub horizon: f64,
}

fn cell(f: &Finiteness) -> String {
    match f {
        Finiteness::Finite(v) => format!("{v:.10e}"),
        Finiteness::Inconclusive { partial } => format!("{partial:.10e}"),
        Finiteness::Infinite => "inf".into(),
    }
}

impl MomentReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "weight: {}", self.weight);
        let _ = writeln!(s, "horizon: {}", self.horizon);
        for (name, f) in [("mu", &self.mu), ("nu+", &self.nu_plus), ("|nu|", &self.nu_total)] {
            let qualifier = if matches!(f, Finiteness::Inconclusive { .. }) { " within horizon" } else { "" };
            let _ = writeln!(s, "{name}: {}{qualifier} ({})", f.label(), cell(f));
        }
        let _ = writeln!(s, "consistent: {}", self.consistent);
        s
    }

    pub const CSV_HEADER: &'static str = "weight,horizon,mu,mu_value,nu_plus,nu_plus_value,nu_total,nu_total_value,consistent";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.weight,
            self.horizon,
            self.mu.label(),
            cell(&self.mu),
            self.nu_plus.label(),
            cell(&self.nu_plus),
            self.nu_total.label(),
            cell(&self.nu_total),
            self.consistent
        )
    }
}

/// Verdicts for `mu`, `nu^+` and `|nu|`; `consistent` means all three agree.
pub fn moment_equivalence_report(d: &MixedDistribution, h: &WeightFunction, settings: &Settings) -> Result<MomentReport> {
    admissible(h, settings)?;
    let t = extract_triplet(d, settings)?;
    moment_equivalence_report_with(d, &t, h, settings)
}

/// As `moment_equivalence_report`, reusing an extracted triplet.
pub fn moment_equivalence_report_with(
    d: &MixedDistribution,
    t: &QuasiLevyTriplet,
    h: &WeightFunction,
    settings: &Settings,
) -> Result<MomentReport> {
    let mu = h_moment_dist(d, h, settings)?;
    let (p, m) = nu_parts(t, h, settings);
    let total = add(p, m);
    let consistent = mu.label() == p.label() && p.label() == total.label();
    Ok(MomentReport {
        weight: h.name.clone(),
        mu,
        nu_plus: p,
        nu_total: total,
        consistent,
        horizon: settings.horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DensitySpec;

    fn e1(x: f64) -> f64 {
        crate::quad::gl_composite(|t| (-t).exp() / t, x, 60.0, 0.05)
    }

    #[test]
    fn distribution_moments() {
        let s = Settings::default();
        let h2 = WeightFunction::polynomial(2.0);
        let v = h_moment_dist(&MixedDistribution::point_mass(0.0), &h2, &s).unwrap();
        assert_eq!(v, Finiteness::Finite(1.0));
        let b = MixedDistribution::discrete(&[(0.0, 0.75), (1.0, 0.25)]).unwrap();
        let v = h_moment_dist(&b, &h2, &s).unwrap().value().unwrap();
        assert!((v - 1.75).abs() < 1e-14);
        let g = MixedDistribution::mixed(0.001, &[(0.0, 1.0)], DensitySpec::gaussian(1.0, 1.0)).unwrap();
        assert!(h_moment_dist(&g, &WeightFunction::subexponential(1.0), &s).unwrap().is_finite());
    }

    #[test]
    fn exponential_weight_is_rejected() {
        let s = Settings::default();
        let e = h_moment_dist(&MixedDistribution::point_mass(0.0), &WeightFunction::exponential(1.0), &s);
        assert!(matches!(e, Err(Error::WeightRejected(_))));
    }

    #[test]
    fn triplet_moments() {
        let s = Settings::default();
        let one = WeightFunction::constant();
        let z = QuasiLevyTriplet::zero();
        for v in [Variant::Plus, Variant::Minus, Variant::Total] {
            assert_eq!(h_moment_nu(&z, &one, v, &s).unwrap(), Finiteness::Finite(0.0));
        }
        let c = QuasiLevyTriplet::cayley(1);
        let total = h_moment_nu(&c, &one, Variant::Total, &s).unwrap().value().unwrap();
        assert!((total - 2.0 * e1(1.0)).abs() < 1e-9, "{total}");
        assert!((total - 0.438_767_868_791_040_6).abs() < 1e-9);

        let atoms: Vec<(f64, f64)> = (1..=40)
            .map(|k| {
                let sg = if k % 2 == 1 { 1.0 } else { -1.0 };
                (k as f64, sg * 3f64.powi(-k) / k as f64)
            })
            .collect();
        let b = QuasiLevyTriplet {
            atoms,
            ..QuasiLevyTriplet::zero()
        };
        let w = WeightFunction::subexponential(1.0);
        let got = h_moment_nu(&b, &w, Variant::Total, &s).unwrap().value().unwrap();
        let want: f64 = (2..=200).map(|k| (k as f64).sqrt().exp() * 3f64.powi(-k) / k as f64).sum();
        assert!((got - want).abs() < 1e-12 * want, "{got} vs {want}");
    }

    fn grid_triplet(half: f64, dx: f64, f: impl Fn(f64) -> f64) -> QuasiLevyTriplet {
        let n = (2.0 * half / dx) as usize + 1;
        QuasiLevyTriplet {
            x0: -half,
            dx,
            h: (0..n).map(|j| f(-half + j as f64 * dx)).collect(),
            ..QuasiLevyTriplet::zero()
        }
    }

    #[test]
    fn tail_envelopes() {
        let s = Settings::default();
        let h5 = WeightFunction::polynomial(5.0);
        // Decays exponentially, but too slowly to settle within the horizon.
        let slow = grid_triplet(1500.0, 0.5, |x| 1e-3 * (-0.01 * x.abs()).exp());
        let v = h_moment_nu(&slow, &h5, Variant::Total, &s).unwrap();
        assert!(v.is_finite(), "{v:?}");
        // 2 * 1e-3 * 5! / 0.01^6, up to the (1 + |x|) shift.
        let want = 2.0 * 1e-3 * 120.0 / 0.01f64.powi(6);
        assert!((v.value().unwrap() / want - 1.0).abs() < 0.05, "{v:?} vs {want}");
        // A power tail is never extrapolated.
        let heavy = grid_triplet(3000.0, 0.5, |x| 1.0 / (1.0 + x * x));
        let v = h_moment_nu(&heavy, &WeightFunction::polynomial(2.0), Variant::Total, &s).unwrap();
        assert!(!v.is_finite(), "{v:?}");
    }

    #[test]
    fn equivalence_reports() {
        let s = Settings::default();
        let b = MixedDistribution::discrete(&[(0.0, 0.75), (1.0, 0.25)]).unwrap();
        let r = moment_equivalence_report(&b, &WeightFunction::polynomial(3.0), &s).unwrap();
        assert!(r.consistent && r.mu.is_finite(), "{}", r.to_text());

        let g = MixedDistribution::mixed(0.001, &[(0.0, 1.0)], DensitySpec::gaussian(1.0, 1.0)).unwrap();
        let r = moment_equivalence_report(&g, &WeightFunction::polynomial(2.0), &s).unwrap();
        assert!(r.consistent && r.nu_total.is_finite(), "{}", r.to_text());

        let r = moment_equivalence_report(&MixedDistribution::point_mass(0.0), &WeightFunction::subexponential(0.5), &s).unwrap();
        assert!(r.consistent);
        assert_eq!(r.mu, Finiteness::Finite(1.0));
        assert_eq!(r.nu_total, Finiteness::Finite(0.0));
        assert_eq!(r.to_csv_row().split(',').count(), MomentReport::CSV_HEADER.split(',').count());
    }
}
