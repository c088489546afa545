use num_complex::Complex64;
use proptest::prelude::*;

use qidlab_core::charfn::GridSource;
use qidlab_core::distlog::winding_index;
use qidlab_core::model::{parse_spec, validate_distribution, write_spec};
use qidlab_core::oracle::{dominance_ratio, series_log_coeffs};
use qidlab_core::triplet::{parse_triplet, write_triplet};
use qidlab_core::*;

/// Integer atoms with a dominant one, so `|F_d| >= dominant - rest >= 0.4`.
fn dominant_lattice() -> impl Strategy<Value = Vec<(f64, f64)>> {
    (
        proptest::sample::subsequence((-4i64..=4).collect::<Vec<_>>(), 1..=4),
        proptest::collection::vec(0.05f64..1.0, 4),
        0usize..4,
    )
        .prop_map(|(sites, raw, pick)| {
            let n = sites.len();
            let lead = pick % n;
            let rest: f64 = (0..n).filter(|&i| i != lead).map(|i| raw[i]).sum();
            // Dominant mass 0.7 + 0.3 * share, the others share 0.3.
            sites
                .iter()
                .enumerate()
                .map(|(i, k)| {
                    let mass = if n == 1 {
                        1.0
                    } else if i == lead {
                        0.7
                    } else {
                        0.3 * raw[i] / rest
                    };
                    (*k as f64, mass)
                })
                .collect()
        })
}

fn discrete() -> impl Strategy<Value = MixedDistribution> {
    dominant_lattice().prop_map(|atoms| MixedDistribution::discrete(&atoms).unwrap())
}

/// `p >= 0.85` keeps `|F| >= 0.85 * 0.4 - 0.15 > 0`.
fn mixed() -> impl Strategy<Value = MixedDistribution> {
    (dominant_lattice(), 0.85f64..0.99, -1.5f64..1.5, 0.4f64..1.5, any::<bool>()).prop_map(|(atoms, p, c, s, gauss)| {
        let f = if gauss { DensitySpec::gaussian(c, s) } else { DensitySpec::laplace(c, s) };
        MixedDistribution::mixed(p, &atoms, f).unwrap()
    })
}

fn any_distribution() -> impl Strategy<Value = MixedDistribution> {
    prop_oneof![discrete(), mixed()]
}

fn max_err(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    (0..n).map(|j| f(lo + (hi - lo) * j as f64 / (n - 1) as f64)).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cf_is_hermitian_and_bounded(d in any_distribution(), z in -50.0f64..50.0) {
        let f = eval_cf(&d, z).unwrap();
        prop_assert!((eval_cf(&d, -z).unwrap() - f.conj()).norm() < 1e-10);
        prop_assert!(f.norm() <= 1.0 + 1e-12);
        prop_assert!((eval_cf(&d, 0.0).unwrap() - 1.0).norm() < 1e-12);
        let (fd, fac) = eval_cf_parts(&d, z).unwrap();
        prop_assert_eq!(fd + fac, f);
    }

    #[test]
    fn validation_is_idempotent(d in any_distribution()) {
        let a = validate_distribution(&d);
        prop_assert!(a.is_valid());
        prop_assert_eq!(validate_distribution(&d), a);
    }

    #[test]
    fn spec_files_round_trip(d in any_distribution()) {
        let text = write_spec(&d).unwrap();
        let back = parse_spec(&text).unwrap();
        prop_assert_eq!(write_spec(&back).unwrap(), text);
        for z in [-7.3, 0.4, 2.0, 19.5] {
            prop_assert!((eval_cf(&back, z).unwrap() - eval_cf(&d, z).unwrap()).norm() < 1e-15);
        }
    }

    #[test]
    fn log_round_trip_and_additivity(a in any_distribution(), b in any_distribution()) {
        let grid = |f: &(dyn Fn(f64) -> Complex64 + Sync)| CharFunctionGrid::symmetric(f, 20.0, 4000, GridSource::Synthetic);
        let fa = grid(&|z| eval_cf(&a, z).unwrap());
        let fb = grid(&|z| eval_cf(&b, z).unwrap());
        let fab = grid(&|z| eval_cf(&a, z).unwrap() * eval_cf(&b, z).unwrap());
        let la = distinguished_log(&fa, 1e-9).unwrap();
        let lb = distinguished_log(&fb, 1e-9).unwrap();
        let lab = distinguished_log(&fab, 1e-9).unwrap();
        for k in 0..fa.z.len() {
            prop_assert!((la.g[k].exp() - fa.values[k]).norm() < 1e-9);
            prop_assert!((lab.g[k] - la.g[k] - lb.g[k]).norm() < 1e-8);
        }
    }

    #[test]
    fn tighter_qid_tolerance_never_flips_to_not_qid(d in mixed(), tol in 1e-4f64..0.5) {
        let loose = qid_check(&d, &Settings::default()).unwrap();
        let tight = qid_check(&d, &Settings { tol_qid: tol, ..Settings::default() }).unwrap();
        if loose.verdict == Verdict::Qid {
            prop_assert_ne!(tight.verdict, Verdict::NotQid);
        }
    }

    #[test]
    fn series_agrees_with_fft(atoms in dominant_lattice()) {
        let d = MixedDistribution::discrete(&atoms).unwrap();
        let ld = lattice_embed(&d, 1).unwrap();
        prop_assume!(dominance_ratio(&ld) <= 0.8);
        let s = series_log_coeffs(&ld, None).unwrap();
        let f = fft_lattice_triplet(&ld).unwrap();
        prop_assert_eq!(s.dominant, f.winding);
        let reach = s.reach.map_or(60, |r| r.min(61) - 1);
        for k in -reach..=reach {
            prop_assert!((s.coefficient(k) - f.coefficient(k)).abs() < 1e-12, "k = {}", k);
        }
    }

    #[test]
    fn convolution_multiplies_transforms(a in any_distribution(), b in any_distribution(), z in -30.0f64..30.0) {
        let c = convolve(&a, &b).unwrap();
        let want = eval_cf(&a, z).unwrap() * eval_cf(&b, z).unwrap();
        prop_assert!((eval_cf(&c, z).unwrap() - want).norm() < 1e-9);
    }

    #[test]
    fn heavier_weights_give_larger_moments(d in any_distribution(), s in 0.5f64..3.0, ds in 0.1f64..2.0) {
        let set = Settings::default();
        let lo = h_moment_dist(&d, &WeightFunction::polynomial(s), &set).unwrap();
        let hi = h_moment_dist(&d, &WeightFunction::polynomial(s + ds), &set).unwrap();
        prop_assert!(lo.value().unwrap() <= hi.value().unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn cayley_term_is_always_h_finite(m in -3i64..=3, s in 0.0f64..6.0, c in 0.1f64..2.0) {
        let set = Settings::default();
        let t = QuasiLevyTriplet::cayley(m);
        for h in [WeightFunction::polynomial(s), WeightFunction::subexponential(c)] {
            prop_assert!(h_moment_nu(&t, &h, Variant::Total, &set).unwrap().is_finite());
        }
    }

    #[test]
    fn triplet_text_is_bit_exact(
        atoms in proptest::collection::btree_map(-50i64..50, -1.0f64..1.0, 0..12),
        h in proptest::collection::vec(-1e3f64..1e3, 0..40),
        m in -3i64..=3,
        gamma0 in -10.0f64..10.0,
        x0 in -20.0f64..0.0,
        dx in 1e-3f64..1.0,
    ) {
        let t = QuasiLevyTriplet {
            gamma0,
            atoms: atoms.into_iter().filter(|(k, _)| *k != 0).map(|(k, c)| (k as f64 / 7.0, c)).collect(),
            x0: if h.is_empty() { 0.0 } else { x0 },
            dx: if h.is_empty() { 0.0 } else { dx },
            h,
            jump: m as f64,
            m,
            ..QuasiLevyTriplet::zero()
        };
        let back = parse_triplet(&write_triplet(&t)).unwrap();
        prop_assert_eq!(back, t);
    }
}

proptest! {
    // Extraction costs up to a second or so per mixed case.
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn extraction_round_trip(d in any_distribution()) {
        let s = Settings::default();
        let t = extract_triplet(&d, &s).unwrap();
        prop_assert_eq!(t.a, 0.0);
        prop_assert!(t.diagnostics.imag_residue < 1e-8);
        let trip = max_err(|z| (reconstruct_cf(&t, z) - eval_cf(&d, z).unwrap()).norm(), -20.0, 20.0, 401);
        prop_assert!(trip < 1e-6, "round trip {}", trip);
        let forms = max_err(|z| (reconstruct_cf(&t, z) - levy_khintchine_eval(&t, z)).norm(), -20.0, 20.0, 401);
        prop_assert!(forms < 1e-8, "forms {}", forms);
        let back = parse_triplet(&write_triplet(&t)).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn inverse_times_cf_is_one(d in any_distribution()) {
        let g = invert_cf(&d, &Settings::default()).unwrap();
        prop_assert!((g.eval(0.0) - 1.0).norm() < 1e-8);
        let err = max_err(|z| (g.eval(z) * eval_cf(&d, z).unwrap() - 1.0).norm(), -30.0, 30.0, 601);
        prop_assert!(err < 1e-8, "{}", err);
    }

    #[test]
    fn discrete_inverse_reinverts(atoms in dominant_lattice()) {
        let loc: Vec<f64> = atoms.iter().map(|a| a.0).collect();
        let w: Vec<f64> = atoms.iter().map(|a| a.1).collect();
        let s = Settings::default().with_lattice(1.0);
        let inv = wiener_inverse_ap(&loc, &w, &s).unwrap();
        let loc2: Vec<f64> = inv.terms.iter().map(|t| t.0).collect();
        let w2: Vec<f64> = inv.terms.iter().map(|t| t.1.re).collect();
        let again = wiener_inverse_ap(&loc2, &w2, &s).unwrap();
        for (y, a) in &atoms {
            let got: Complex64 = again.terms.iter().filter(|t| (t.0 - y).abs() < 1e-9).map(|t| t.1).sum();
            prop_assert!((got - a).norm() < 1e-8, "at {}: {} vs {}", y, got, a);
        }
        let stray: f64 = again.terms.iter().filter(|t| !loc.iter().any(|y| (t.0 - y).abs() < 1e-9)).map(|t| t.1.norm()).sum();
        prop_assert!(stray < 1e-8);
    }

    #[test]
    fn winding_of_cayley_terms(m in -3i64..=3, scale in 0.5f64..2.0) {
        let grid = CharFunctionGrid::symmetric(|z| cayley_term(z * scale, m), 400.0, 80_000, GridSource::Synthetic);
        prop_assert_eq!(winding_index(&grid, 1e-9).unwrap().index, m);
    }

    #[test]
    fn nu_mass_diverges_only_with_a_cayley_term(atoms in dominant_lattice()) {
        let d = MixedDistribution::discrete(&atoms).unwrap();
        let t = extract_triplet(&d, &Settings::default()).unwrap();
        for m in [0, 1, -2] {
            let tm = QuasiLevyTriplet { m, ..t.clone() };
            let a = nu_measures(&tm, 1e-2).unwrap().total;
            let b = nu_measures(&tm, 1e-4).unwrap().total;
            if m == 0 {
                prop_assert!((b - a).abs() < 1e-9 * a.max(1.0));
            } else {
                // 2|m| log(100) more mass between the two radii.
                let want = 2.0 * m.abs() as f64 * 100f64.ln();
                prop_assert!(((b - a) / want - 1.0).abs() < 0.05, "{} vs {}", b - a, want);
            }
        }
    }
}
