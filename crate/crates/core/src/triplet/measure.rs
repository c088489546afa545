use num_complex::Complex64;

use super::QuasiLevyTriplet;
use crate::error::{Error, Result};
use crate::quad::{self, Finiteness};

/// `sum_j v_j e^{i z (x0 + j dx)} dx`, with the phase advanced by rotation
/// and reseeded every 512 samples.
pub(crate) fn spectral_kernel(v: &[f64], x0: f64, dx: f64, z: f64) -> Complex64 {
    let step = Complex64::from_polar(1.0, z * dx);
    let mut acc = Complex64::new(0.0, 0.0);
    for (b, chunk) in v.chunks(512).enumerate() {
        let mut e = Complex64::from_polar(1.0, z * (x0 + (b * 512) as f64 * dx));
        for &h in chunk {
            acc += e * h;
            e *= step;
        }
    }
    acc * dx
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuMeasures {
    pub plus: f64,
    pub minus: f64,
    pub total: f64,
}

/// Density `h(x) + m e^{-|x|} sgn(x) / |x|` of the continuous part of nu,
/// with the jump profile folded into the two singular kernels.
pub fn nu_density(t: &QuasiLevyTriplet, x: f64) -> f64 {
    let me = t.m as f64 - t.jump;
    let a = x.abs();
    let singular = if me == 0.0 && t.jump == 0.0 {
        0.0
    } else {
        (me * (-a).exp() + t.jump * (-0.5 * a * a).exp()) / x
    };
    t.grid_at(x) + singular
}

/// Beyond this distance from the `h` grid the Cayley term is below `e^{-50}`.
const FAR: f64 = 50.0;

/// Panel edges on `[lo, hi]` (`0 < lo`) for the side `sign`: geometric
/// growth from `lo` capped at width 0.25, plus every knot of the `h` grid.
fn edges(t: &QuasiLevyTriplet, sign: f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut e = vec![lo];
    let mut x = lo;
    while x < hi {
        x = (x * 1.5).min(x + 0.25).min(hi);
        e.push(x);
    }
    if !t.h.is_empty() {
        let knots = (0..t.h.len()).map(|j| sign * t.x(j)).filter(|x| *x > lo && *x < hi);
        e.extend(knots);
        e.sort_by(f64::total_cmp);
        e.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1e-300));
    }
    e
}

fn panel_parts<K: Fn(f64) -> f64, W: Fn(f64) -> f64>(k: &K, w: &W, a: f64, b: f64, depth: u32) -> (f64, f64) {
    let probes: Vec<f64> = (0..=6).map(|i| a + (b - a) * i as f64 / 6.0).collect();
    let vals: Vec<f64> = probes.iter().map(|x| k(*x)).collect();
    let change = vals.windows(2).position(|v| (v[0] > 0.0 && v[1] < 0.0) || (v[0] < 0.0 && v[1] > 0.0));
    match change {
        Some(i) if depth > 0 => {
            // Bisect for the sign change, then integrate each side separately.
            let (mut l, mut r) = (probes[i], probes[i + 1]);
            let sl = vals[i] > 0.0;
            for _ in 0..60 {
                let mid = 0.5 * (l + r);
                if (k(mid) > 0.0) == sl {
                    l = mid;
                } else {
                    r = mid;
                }
            }
            let c = 0.5 * (l + r);
            let p = panel_parts(k, w, a, c, depth - 1);
            let q = panel_parts(k, w, c, b, depth - 1);
            (p.0 + q.0, p.1 + q.1)
        }
        _ => (
            quad::gl_panel(|x| k(x).max(0.0) * w(x), a, b),
            quad::gl_panel(|x| (-k(x)).max(0.0) * w(x), a, b),
        ),
    }
}

/// `(int w k^+, int w k^-)` over `lo < |x| < hi` with `k` the continuous
/// density of nu. `w` is evaluated at signed `x`.
pub(crate) fn density_parts<W: Fn(f64) -> f64>(t: &QuasiLevyTriplet, lo: f64, hi: f64, w: W) -> (f64, f64) {
    let reach = t.h_support().map_or(0.0, |(a, b)| a.abs().max(b.abs())) + FAR;
    let singular = t.m != 0 || t.jump != 0.0;
    let hi = hi.min(if singular { reach } else { reach - FAR + t.dx });
    if !(hi > lo) || (!singular && t.h.is_empty()) {
        return (0.0, 0.0);
    }
    let mut pos = 0.0;
    let mut neg = 0.0;
    for sign in [1.0, -1.0] {
        let k = |x: f64| nu_density(t, sign * x);
        let wt = |x: f64| w(sign * x);
        for p in edges(t, sign, lo, hi).windows(2) {
            let (a, b) = panel_parts(&k, &wt, p[0], p[1], 4);
            pos += a;
            neg += b;
        }
    }
    (pos, neg)
}

/// Jordan parts of nu restricted to `{|x| > r}`.
pub fn nu_measures(t: &QuasiLevyTriplet, r: f64) -> Result<NuMeasures> {
    if !(r > 0.0) {
        return Err(Error::Input(format!(
            "nu_measures needs r > 0 (got {r}); the Cayley term has infinite mass near 0"
        )));
    }
    let mut plus = 0.0;
    let mut minus = 0.0;
    for (y, c) in &t.atoms {
        if y.abs() > r {
            if *c > 0.0 {
                plus += c;
            } else {
                minus -= c;
            }
        }
    }
    let (p, n) = density_parts(t, r, f64::INFINITY, |_| 1.0);
    plus += p;
    minus += n;
    Ok(NuMeasures {
        plus,
        minus,
        total: plus + minus,
    })
}

/// `int_{0<|x|<1} |x|^beta |nu|(dx)` from the ladder `r = 10^{-k}`, `k = 1..16`:
/// the core `0.1 < |x| < 1` plus one increment per decade, classified by
/// the decay of the increments.
pub fn beta_near_zero_moment(t: &QuasiLevyTriplet, beta: f64) -> Result<Finiteness> {
    if !(beta > 0.0) {
        return Err(Error::Input(format!("beta must be positive (got {beta})")));
    }
    let weight = |x: f64| x.abs().powf(beta);
    let atoms_in = |lo: f64, hi: f64| -> f64 {
        t.atoms
            .iter()
            .filter(|(y, _)| y.abs() > lo && y.abs() < hi)
            .map(|(y, c)| weight(*y) * c.abs())
            .sum()
    };
    let part = |lo: f64, hi: f64| {
        let (p, n) = density_parts(t, lo, hi, weight);
        p + n + atoms_in(lo, hi)
    };
    let base = part(0.1, 1.0);
    let shells: Vec<f64> = (1..16).map(|k| part(10f64.powi(-(k + 1)), 10f64.powi(-k))).collect();
    Ok(quad::classify_tail(base, &shells, 1e-3))
}
