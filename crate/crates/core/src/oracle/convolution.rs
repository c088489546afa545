use crate::charfn::{eval_cf, qid_check, QidVerdict, Verdict};
use crate::error::{Error, Result};
use crate::model::{detect_lattice, Atom, DensitySpec, MixedDistribution, MixtureComponent};
use crate::settings::Settings;

/// Atoms closer than this after summing locations are merged.
const MERGE: f64 = 1e-12;

/// Exact convolution.  With `mu_i = p_i D_i + (1 - p_i) A_i`,
/// `mu_1 * mu_2 = p1 p2 D1*D2 + p1 (1-p2) D1*A2 + (1-p1) p2 A1*D2 + (1-p1)(1-p2) A1*A2`;
/// every term but the first is absolutely continuous and goes into one
/// mixture density.
pub fn convolve(d1: &MixedDistribution, d2: &MixedDistribution) -> Result<MixedDistribution> {
    let p = d1.p * d2.p;
    let mut atoms: Vec<Atom> = Vec::with_capacity(d1.atoms.len() * d2.atoms.len());
    for a in &d1.atoms {
        for b in &d2.atoms {
            atoms.push(Atom::new(a.location + b.location, a.mass * b.mass));
        }
    }
    atoms.sort_by(|x, y| x.location.total_cmp(&y.location));
    let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match merged.last_mut() {
            Some(last) if (a.location - last.location).abs() <= MERGE => last.mass += a.mass,
            _ => merged.push(a),
        }
    }

    let density = if p < 1.0 {
        let q = 1.0 - p;
        let mut parts = Vec::new();
        let mut shifted = |atoms: &[Atom], weight: f64, density: &Option<DensitySpec>| {
            if let Some(f) = density {
                for a in atoms {
                    parts.push(MixtureComponent {
                        weight: weight * a.mass / q,
                        shift: a.location,
                        density: f.clone(),
                    });
                }
            }
        };
        shifted(&d1.atoms, d1.p * (1.0 - d2.p), &d2.density);
        shifted(&d2.atoms, (1.0 - d1.p) * d2.p, &d1.density);
        if let (Some(f1), Some(f2)) = (&d1.density, &d2.density) {
            parts.push(MixtureComponent {
                weight: (1.0 - d1.p) * (1.0 - d2.p) / q,
                shift: 0.0,
                density: DensitySpec::Convolution(Box::new(f1.clone()), Box::new(f2.clone())),
            });
        }
        if parts.is_empty() {
            return Err(Error::Input("a factor with p < 1 carries no density".into()));
        }
        Some(DensitySpec::Mixture(parts))
    } else {
        None
    };
    let hint = detect_lattice(&merged);
    MixedDistribution::new(p, merged, density, hint)
}

#[derive(Debug, Clone)]
pub struct FactorReport {
    pub product: QidVerdict,
    pub first: QidVerdict,
    pub second: QidVerdict,
    /// `max |F_{mu1*mu2} - F_1 F_2|` on the check grid.
    pub cf_error: f64,
    pub grid_points: usize,
    pub grid_half_width: f64,
    /// A decided product verdict contradicts the decided factor verdicts.
    pub violation: bool,
    pub undecided: bool,
}

impl FactorReport {
    pub const CF_TOL: f64 = 1e-9;

    pub fn passes(&self) -> bool {
        self.cf_error < Self::CF_TOL && !self.violation && !self.undecided
    }

    pub fn summary(&self) -> String {
        format!(
            "product: {}\nfirst: {}\nsecond: {}\ncf error: {:.3e} on {} points in [-{w}, {w}]\nviolation: {}\nundecided: {}\n",
            self.product.verdict.label(),
            self.first.verdict.label(),
            self.second.verdict.label(),
            self.cf_error,
            self.grid_points,
            self.violation,
            self.undecided,
            w = self.grid_half_width,
        )
    }
}

pub const FACTOR_GRID_POINTS: usize = 401;
pub const FACTOR_GRID_HALF_WIDTH: f64 = 20.0;

pub fn convolution_factor_check(d1: &MixedDistribution, d2: &MixedDistribution, settings: &Settings) -> Result<FactorReport> {
    let prod = convolve(d1, d2)?;
    let n = FACTOR_GRID_POINTS;
    let w = FACTOR_GRID_HALF_WIDTH;
    let mut cf_error: f64 = 0.0;
    for j in 0..n {
        let z = -w + 2.0 * w * j as f64 / (n - 1) as f64;
        let e = (eval_cf(&prod, z)? - eval_cf(d1, z)? * eval_cf(d2, z)?).norm();
        cf_error = cf_error.max(e);
    }
    // A lattice override only fits when all three share it; otherwise each
    // distribution falls back to its own hint.
    let own = Settings {
        lattice: None,
        ..settings.clone()
    };
    let product = qid_check(&prod, &own)?;
    let first = qid_check(d1, &own)?;
    let second = qid_check(d2, &own)?;
    let decided = [product.verdict, first.verdict, second.verdict]
        .iter()
        .all(|v| *v != Verdict::Undecided);
    let both = first.verdict == Verdict::Qid && second.verdict == Verdict::Qid;
    // A factor NotQid forces the product NotQid even if the other is undecided.
    let forced_not = first.verdict == Verdict::NotQid || second.verdict == Verdict::NotQid;
    let violation = if decided {
        (product.verdict == Verdict::Qid) != both
    } else {
        (forced_not && product.verdict == Verdict::Qid) || (both && product.verdict == Verdict::NotQid)
    };
    Ok(FactorReport {
        product,
        first,
        second,
        cf_error,
        grid_points: n,
        grid_half_width: w,
        violation,
        undecided: !decided,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bern() -> MixedDistribution {
        MixedDistribution::discrete(&[(0.0, 0.75), (1.0, 0.25)]).unwrap()
    }

    #[test]
    fn identity_factor() {
        let d = MixedDistribution::mixed(0.9, &[(0.0, 0.7), (1.0, 0.3)], DensitySpec::gaussian(0.0, 1.0)).unwrap();
        let r = convolution_factor_check(&MixedDistribution::point_mass(0.0), &d, &Settings::default()).unwrap();
        assert!(r.passes(), "{}", r.summary());
        assert_eq!(r.product.verdict, r.second.verdict);
        assert_eq!(r.product.verdict, Verdict::Qid);
    }

    #[test]
    fn bernoulli_square() {
        let r = convolution_factor_check(&bern(), &bern(), &Settings::default()).unwrap();
        assert!(r.passes(), "{}", r.summary());
        assert_eq!(r.product.verdict, Verdict::Qid);
        let c = convolve(&bern(), &bern()).unwrap();
        assert_eq!(c.atoms.len(), 3);
        assert!((c.atoms[1].mass - 0.375).abs() < 1e-16);
    }

    #[test]
    fn zero_propagates() {
        let h = MixedDistribution::discrete(&[(0.0, 0.5), (2f64.sqrt(), 0.5)]).unwrap();
        let r = convolution_factor_check(&h, &bern(), &Settings::default()).unwrap();
        assert!(r.passes(), "{}", r.summary());
        assert_eq!(r.product.verdict, Verdict::NotQid);
        assert_eq!(r.first.verdict, Verdict::NotQid);
    }

    #[test]
    fn mixed_factors() {
        let a = MixedDistribution::mixed(0.8, &[(0.0, 0.9), (2.0, 0.1)], DensitySpec::laplace(0.0, 1.0)).unwrap();
        let b = MixedDistribution::mixed(0.6, &[(-1.0, 0.8), (1.0, 0.2)], DensitySpec::gaussian(1.0, 0.5)).unwrap();
        let c = convolve(&a, &b).unwrap();
        assert!((c.p - 0.48).abs() < 1e-15);
        let r = convolution_factor_check(&a, &b, &Settings::default()).unwrap();
        assert!(r.passes(), "{}", r.summary());
    }
}
