use crate::error::{Error, Result};
use crate::model::density::DensitySpec;

/// A point mass `a * delta_y` of the discrete part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

impl Atom {
    pub fn new(location: f64, mass: f64) -> Self {
        Self { location, mass }
    }
}

/// `mu = p * sum a_y delta_y + (1 - p) * f(x) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedDistribution {
    pub p: f64,
    pub atoms: Vec<Atom>,
    pub density: Option<DensitySpec>,
    /// Step `q` with every atom location in `q Z`.
    pub lattice_hint: Option<f64>,
}

/// Atoms closer than this are flagged as numerically unresolvable.
pub const MIN_ATOM_SPACING: f64 = 1e-9;

impl MixedDistribution {
    /// Validated constructor.
    pub fn new(
        p: f64,
        atoms: Vec<Atom>,
        density: Option<DensitySpec>,
        lattice_hint: Option<f64>,
    ) -> Result<Self> {
        let d = Self {
            p,
            atoms,
            density,
            lattice_hint,
        };
        let report = validate_distribution(&d);
        if report.is_valid() {
            Ok(d)
        } else {
            Err(Error::InvalidDistribution(report.issues))
        }
    }

    /// Purely discrete distribution from `(location, mass)` pairs.
    pub fn discrete(atoms: &[(f64, f64)]) -> Result<Self> {
        let atoms: Vec<Atom> = atoms.iter().map(|&(y, a)| Atom::new(y, a)).collect();
        let hint = detect_lattice(&atoms);
        Self::new(1.0, atoms, None, hint)
    }

    pub fn mixed(p: f64, atoms: &[(f64, f64)], density: DensitySpec) -> Result<Self> {
        let atoms: Vec<Atom> = atoms.iter().map(|&(y, a)| Atom::new(y, a)).collect();
        let hint = detect_lattice(&atoms);
        Self::new(p, atoms, Some(density), hint)
    }

    pub fn point_mass(y: f64) -> Self {
        Self {
            p: 1.0,
            atoms: vec![Atom::new(y, 1.0)],
            density: None,
            lattice_hint: detect_lattice(&[Atom::new(y, 1.0)]),
        }
    }

    pub fn locations(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.location).collect()
    }

    pub fn masses(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.mass).collect()
    }

    /// Lattice step to use: explicit override, then the hint, then detection.
    pub fn lattice_step(&self, override_step: Option<f64>) -> Option<f64> {
        override_step
            .or(self.lattice_hint)
            .or_else(|| detect_lattice(&self.atoms))
    }

    /// Smallest pairwise distance between atom locations.
    pub fn min_gap(&self) -> Option<f64> {
        let mut y = self.locations();
        y.sort_by(|a, b| a.partial_cmp(b).unwrap());
        y.windows(2).map(|w| w[1] - w[0]).reduce(f64::min)
    }
}

/// Violated invariants of a distribution; empty iff valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

pub fn validate_distribution(d: &MixedDistribution) -> ValidationReport {
    let mut issues = Vec::new();

    if !(d.p > 0.0 && d.p <= 1.0) {
        issues.push(format!("mixing weight p = {} outside (0, 1]", d.p));
    }
    if d.atoms.is_empty() {
        issues.push("discrete part has no atoms".to_string());
    }
    for a in &d.atoms {
        if !a.location.is_finite() || !a.mass.is_finite() {
            issues.push(format!("atom ({}, {}) is not finite", a.location, a.mass));
        } else if !(a.mass > 0.0) {
            issues.push(format!("atom at {} has non-positive mass {}", a.location, a.mass));
        }
    }
    let total: f64 = d.atoms.iter().map(|a| a.mass).sum();
    if !d.atoms.is_empty() && (total - 1.0).abs() > 1e-12 {
        issues.push(format!("atom masses sum to {total} (expected 1)"));
    }

    let mut y = d.locations();
    y.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    for w in y.windows(2) {
        if w[1] == w[0] {
            issues.push(format!("duplicate atom location {}", w[0]));
        } else if w[1] - w[0] < MIN_ATOM_SPACING {
            issues.push(format!(
                "atoms at {} and {} are closer than {MIN_ATOM_SPACING:e}",
                w[0], w[1]
            ));
        }
    }

    match (&d.density, d.p < 1.0) {
        (None, true) => issues.push("p < 1 but no density given".to_string()),
        (Some(_), false) => issues.push("density given but p = 1".to_string()),
        (Some(f), true) => issues.extend(f.issues()),
        (None, false) => {}
    }

    if let Some(q) = d.lattice_hint {
        if !(q > 0.0) || !q.is_finite() {
            issues.push(format!("lattice hint {q} must be positive"));
        } else {
            for a in &d.atoms {
                let r = a.location / q;
                if (r - r.round()).abs() > 1e-12 * r.abs().max(1.0) {
                    issues.push(format!("atom at {} is not on the lattice {q}Z", a.location));
                }
            }
        }
    }

    ValidationReport { issues }
}

/// Best rational approximation `num/den` of `x` with `den <= max_den`,
/// accepted only when `|x - num/den| <= tol * max(1, |x|)`.
pub fn rational_approx(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1 as f64 / k1 as f64;
        if (x - approx).abs() <= tol * x.abs().max(1.0) {
            return Some((h1, k1));
        }
        let frac = r - a as f64;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Largest `q > 0` with every location in `q Z`, if the locations are
/// commensurable with small denominators. A lone atom at 0 gets `q = 1`.
pub fn detect_lattice(atoms: &[Atom]) -> Option<f64> {
    let ys: Vec<f64> = atoms
        .iter()
        .map(|a| a.location)
        .filter(|y| *y != 0.0)
        .collect();
    let Some(reference) = ys.iter().map(|y| y.abs()).reduce(f64::min) else {
        return Some(1.0);
    };
    let mut lcm: i64 = 1;
    for y in &ys {
        let (_, den) = rational_approx(y / reference, 1000, 1e-11)?;
        lcm = lcm / gcd(lcm, den) * den;
        if lcm > 1000 {
            return None;
        }
    }
    let mut q = reference / lcm as f64;
    // Coarsen to the gcd of the integer indices.
    let idx: Vec<i64> = ys.iter().map(|y| (y / q).round() as i64).collect();
    let g = idx.iter().fold(0, |g, &k| gcd(g, k));
    if g > 1 {
        q *= g as f64;
    }
    let span = ys.iter().map(|y| (y / q).abs()).fold(0.0, f64::max);
    if span > 1e5 {
        return None;
    }
    let on_lattice = ys.iter().all(|y| {
        let r = y / q;
        (r - r.round()).abs() <= 1e-12 * r.abs().max(1.0)
    });
    on_lattice.then_some(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::density::DensitySpec;

    #[test]
    fn examples_validate_as_expected() {
        assert!(validate_distribution(&MixedDistribution::point_mass(0.0)).is_valid());

        let bad = MixedDistribution {
            p: 1.0,
            atoms: vec![Atom::new(0.0, 0.6), Atom::new(1.0, 0.5)],
            density: None,
            lattice_hint: None,
        };
        let r = validate_distribution(&bad);
        assert_eq!(r.issues.len(), 1);
        assert!(r.issues[0].contains("1.1"));

        let ex = MixedDistribution::mixed(0.001, &[(0.0, 1.0)], DensitySpec::gaussian(1.0, 1.0));
        assert!(ex.is_ok());
    }

    #[test]
    fn close_atoms_are_flagged() {
        let d = MixedDistribution {
            p: 1.0,
            atoms: vec![Atom::new(0.0, 0.5), Atom::new(1e-11, 0.5)],
            density: None,
            lattice_hint: None,
        };
        assert!(!validate_distribution(&d).is_valid());
    }

    #[test]
    fn lattice_detection() {
        let at = |ys: &[f64]| ys.iter().map(|&y| Atom::new(y, 0.1)).collect::<Vec<_>>();
        assert_eq!(detect_lattice(&at(&[0.0, 2.0, 3.0])), Some(1.0));
        assert_eq!(detect_lattice(&at(&[0.0, 2.0, 4.0])), Some(2.0));
        assert!((detect_lattice(&at(&[0.5, 1.5])).unwrap() - 0.5).abs() < 1e-15);
        assert!((detect_lattice(&at(&[0.0, 0.3, -0.7])).unwrap() - 0.1).abs() < 1e-12);
        assert!((detect_lattice(&at(&[0.0, 2f64.sqrt()])).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(detect_lattice(&at(&[0.0, 1.0, 2f64.sqrt()])), None);
    }

    #[test]
    fn rational_approximation() {
        assert_eq!(rational_approx(0.75, 100, 1e-12), Some((3, 4)));
        assert_eq!(rational_approx(-7.0 / 3.0, 100, 1e-12), Some((-7, 3)));
        assert_eq!(rational_approx(std::f64::consts::PI, 1000, 1e-12), None);
    }
}
