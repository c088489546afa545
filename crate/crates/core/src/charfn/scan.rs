//! Minimum search for `|f|` along a real interval.

use num_complex::Complex64;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub z: f64,
    pub modulus: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the minimum of `|f|` on `[a, b]`, followed by
/// Gauss-Newton steps on `|f|^2` that use a central-difference derivative.
pub fn polish<F: Fn(f64) -> Complex64>(f: &F, mut a: f64, mut b: f64) -> Minimum {
    let g = |z: f64| f(z).norm();
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..90 {
        if (b - a).abs() <= 1e-15 * a.abs().max(b.abs()).max(1.0) {
            break;
        }
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
    }
    let (mut z, mut best) = if gc < gd { (c, gc) } else { (d, gd) };
    let mut value = f(z);
    for _ in 0..8 {
        let h = 1e-6 * z.abs().max(1.0);
        let deriv = (f(z + h) - f(z - h)) / (2.0 * h);
        let dn = deriv.norm_sqr();
        if dn == 0.0 {
            break;
        }
        let step = -(deriv.conj() * value).re / dn;
        let cand = z + step;
        let v = f(cand);
        if v.norm() < best {
            z = cand;
            best = v.norm();
            value = v;
        } else {
            break;
        }
    }
    Minimum { z, modulus: best }
}

/// Local minima of the sampled moduli, smallest first.
pub fn local_minima(values: &[f64], keep: usize) -> Vec<usize> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n)
        .filter(|&j| {
            let left = j == 0 || values[j] <= values[j - 1];
            let right = j + 1 == n || values[j] <= values[j + 1];
            left && right
        })
        .collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx.truncate(keep);
    idx
}

/// Global minimum of `|f|` over `[lo, hi]`: a uniform scan with `n` points,
/// then `polish` around the `keep` smallest local minima.
pub fn scan_minimum<F>(f: &F, lo: f64, hi: f64, n: usize, keep: usize) -> Minimum
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let n = n.max(3);
    let h = (hi - lo) / (n - 1) as f64;
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| f(lo + j as f64 * h).norm())
        .collect();
    refine_candidates(f, lo, h, &values, keep, lo, hi)
}

/// `scan_minimum` with the uniform samples produced block by block:
/// `block(z0, h, out)` fills `out[j] = |f(z0 + j h)|`.
pub fn scan_minimum_blocked<F, B>(f: &F, block: &B, lo: f64, hi: f64, n: usize, keep: usize) -> Minimum
where
    F: Fn(f64) -> Complex64 + Sync,
    B: Fn(f64, f64, &mut [f64]) + Sync,
{
    const BLOCK: usize = 4096;
    let n = n.max(3);
    let h = (hi - lo) / (n - 1) as f64;
    let mut values = vec![0.0; n];
    values
        .par_chunks_mut(BLOCK)
        .enumerate()
        .for_each(|(b, out)| block(lo + (b * BLOCK) as f64 * h, h, out));
    refine_candidates(f, lo, h, &values, keep, lo, hi)
}

pub(crate) fn refine_candidates<F>(
    f: &F,
    z0: f64,
    h: f64,
    values: &[f64],
    keep: usize,
    lo: f64,
    hi: f64,
) -> Minimum
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let cands = local_minima(values, keep);
    cands
        .par_iter()
        .map(|&j| {
            let z = z0 + j as f64 * h;
            let m = polish(f, (z - h).max(lo), (z + h).min(hi));
            if m.modulus <= values[j] {
                m
            } else {
                Minimum { z, modulus: values[j] }
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(
            Minimum {
                z: f64::NAN,
                modulus: f64::INFINITY,
            },
            |a, b| {
                if b.modulus < a.modulus || (b.modulus == a.modulus && b.z < a.z) {
                    b
                } else {
                    a
                }
            },
        )
}
