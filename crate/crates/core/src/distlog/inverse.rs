use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::charfn::integer_relation;
use crate::model::{detect_lattice, Atom};
use crate::settings::Settings;

#[derive(Debug, Clone, PartialEq)]
pub enum InverseMethod {
    Lattice { step: f64, points: usize },
    NewtonSchulz { order: usize, iterations: usize },
}

/// `1 / F_d` as a finite almost periodic sum `sum d_y e^{izy}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApInverse {
    pub terms: Vec<(f64, Complex64)>,
    /// Lattice: `sup |F_d D - 1|` on a check set. Newton-Schulz: Wiener norm of `1 - F_d D`.
    pub residual: f64,
    pub method: InverseMethod,
}

impl ApInverse {
    pub fn eval(&self, z: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(y, d)| d * Complex64::from_polar(1.0, y * z))
            .sum()
    }

    pub fn wiener_norm(&self) -> f64 {
        self.terms.iter().map(|(_, d)| d.norm()).sum()
    }
}

fn sup_residual(locations: &[f64], weights: &[f64], inv: &ApInverse, scale: f64) -> f64 {
    // Quasi-random check points spread over many periods.
    let golden = 0.618_033_988_749_894_9_f64;
    (1..=1000)
        .map(|k| {
            let z = scale * ((k as f64 * golden).fract() * 2.0 - 1.0) * 50.0;
            let f: Complex64 = locations
                .iter()
                .zip(weights)
                .map(|(y, w)| Complex64::from_polar(*w, y * z))
                .sum();
            (f * inv.eval(z) - 1.0).norm()
        })
        .fold(0.0, f64::max)
}

/// Inverse of `sum w_k e^{i z y_k}` in the almost periodic Wiener algebra.
pub fn wiener_inverse_ap(locations: &[f64], weights: &[f64], settings: &Settings) -> Result<ApInverse> {
    if locations.is_empty() || locations.len() != weights.len() {
        return Err(Error::Input("wiener_inverse_ap needs matching, nonempty atoms".into()));
    }
    let atoms: Vec<Atom> = locations.iter().zip(weights).map(|(&y, &w)| Atom::new(y, w)).collect();
    match settings.lattice.or_else(|| detect_lattice(&atoms)) {
        Some(q) => lattice_inverse(locations, weights, q),
        None => newton_schulz(locations, weights),
    }
}

fn lattice_inverse(locations: &[f64], weights: &[f64], q: f64) -> Result<ApInverse> {
    let idx: Vec<i64> = locations.iter().map(|y| (y / q).round() as i64).collect();
    let lo = *idx.iter().min().unwrap();
    let mut n = 1usize << 12;
    let mut planner = FftPlanner::<f64>::new();
    loop {
        let mut buf: Vec<Complex64> = (0..n)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / n as f64;
                let p: Complex64 = idx
                    .iter()
                    .zip(weights)
                    .map(|(k, w)| Complex64::from_polar(*w, (k - lo) as f64 * t))
                    .sum();
                1.0 / p
            })
            .collect();
        planner.plan_fft_forward(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        let coeff = |j: i64| buf[j.rem_euclid(n as i64) as usize] * scale;
        let half = n as i64 / 2;
        let tail: f64 = (half / 2..=half)
            .map(|j| coeff(j).norm() + if j != half { coeff(-j).norm() } else { 0.0 })
            .sum();
        if !tail.is_finite() {
            return Err(Error::Inversion { residual: f64::INFINITY });
        }
        if tail > 1e-10 {
            if n >= 1 << 20 {
                return Err(Error::Inversion { residual: tail });
            }
            n *= 2;
            continue;
        }
        let total: f64 = (-half + 1..half).map(|j| coeff(j).norm()).sum();
        let terms: Vec<(f64, Complex64)> = (-half + 1..half)
            .filter(|&j| coeff(j).norm() > 1e-18 * total)
            .map(|j| ((j - lo) as f64 * q, coeff(j)))
            .collect();
        let mut inv = ApInverse {
            terms,
            residual: 0.0,
            method: InverseMethod::Lattice { step: q, points: n },
        };
        inv.residual = sup_residual(locations, weights, &inv, 2.0 * PI / q);
        return Ok(inv);
    }
}

type Series = HashMap<Vec<i32>, Complex64>;

fn mul(a: &Series, b: &Series, order: Option<i32>) -> Series {
    let mut out: Series = HashMap::with_capacity(a.len() * 2);
    for (ka, va) in a {
        for (kb, vb) in b {
            let k: Vec<i32> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
            if let Some(o) = order {
                if k.iter().map(|v| v.abs()).sum::<i32>() > o {
                    continue;
                }
            }
            *out.entry(k).or_insert(Complex64::new(0.0, 0.0)) += va * vb;
        }
    }
    out.retain(|_, v| v.norm() > 1e-18);
    out
}

const MAX_TERMS: usize = 40_000;

/// Newton-Schulz `d <- d (2 - A d)` on formal exponent vectors over the
/// generators `y_k - y_0`, where `y_0` carries the largest weight. The
/// truncation order starts at 8 and doubles while the residual stalls.
fn newton_schulz(locations: &[f64], weights: &[f64]) -> Result<ApInverse> {
    let lead = (0..weights.len())
        .max_by(|&a, &b| weights[a].abs().total_cmp(&weights[b].abs()))
        .unwrap();
    let y0 = locations[lead];

    // Express each difference y_k - y_0 over a basis grown greedily: a
    // difference that is a small integer combination of earlier generators
    // (unit coefficient on itself) reuses them, otherwise it becomes a new one.
    let mut gens: Vec<f64> = Vec::new();
    let mut exps: Vec<(Vec<i32>, f64)> = Vec::new();
    for (k, (&y, &w)) in locations.iter().zip(weights).enumerate() {
        if k == lead {
            continue;
        }
        let delta = y - y0;
        let mut v = gens.clone();
        v.push(delta);
        let expressed = integer_relation(&v, 6).filter(|n| n[gens.len()].abs() == 1).map(|n| {
            let s = -n[gens.len()];
            n[..gens.len()].iter().map(|c| (c * s) as i32).collect::<Vec<i32>>()
        });
        match expressed {
            Some(e) => exps.push((e, w)),
            None => {
                let mut e = vec![0; gens.len()];
                e.push(1);
                gens.push(delta);
                exps.push((e, w));
            }
        }
    }
    let r = gens.len();
    let mut a: Series = HashMap::new();
    a.insert(vec![0; r], Complex64::new(weights[lead], 0.0));
    for (mut e, w) in exps {
        e.resize(r, 0);
        *a.entry(e).or_insert(Complex64::new(0.0, 0.0)) += w;
    }
    let total: f64 = weights.iter().map(|w| w.abs()).sum();
    let lead_w = weights[lead].abs();
    let mut d: Series = if 2.0 * lead_w > total {
        HashMap::from([(vec![0; r], Complex64::new(1.0 / weights[lead], 0.0))])
    } else {
        a.iter()
            .map(|(k, v)| (k.iter().map(|x| -x).collect(), v.conj() / (total * total)))
            .collect()
    };
    let one = vec![0; r];
    let residual_of = |d: &Series| -> f64 {
        let mut ad = mul(&a, d, None);
        *ad.entry(one.clone()).or_insert(Complex64::new(0.0, 0.0)) -= 1.0;
        ad.values().map(|v| v.norm()).sum()
    };
    let mut order = 8i32;
    let mut res = residual_of(&d);
    let mut iterations = 0;
    let mut stall = 0;
    while res >= 1e-10 {
        iterations += 1;
        if iterations > 200 {
            return Err(Error::Inversion { residual: res });
        }
        let mut two_minus = mul(&a, &d, Some(order));
        for v in two_minus.values_mut() {
            *v = -*v;
        }
        *two_minus.entry(one.clone()).or_insert(Complex64::new(0.0, 0.0)) += 2.0;
        let next = mul(&d, &two_minus, Some(order));
        let next_res = residual_of(&next);
        if next_res < 0.5 * res {
            stall = 0;
        } else {
            stall += 1;
        }
        if next_res < res || iterations < 4 {
            d = next;
            res = next_res;
        }
        if stall >= 2 {
            order *= 2;
            stall = 0;
            if d.len() * 4 > MAX_TERMS || order > 1024 {
                return Err(Error::Inversion { residual: res });
            }
        }
    }
    let mut merged: Vec<(f64, Complex64)> = Vec::new();
    let mut terms: Vec<(f64, Complex64)> = d
        .iter()
        .map(|(k, v)| {
            let y: f64 = k.iter().zip(&gens).map(|(n, g)| *n as f64 * g).sum::<f64>() - y0;
            (y, *v)
        })
        .collect();
    terms.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (y, v) in terms {
        match merged.last_mut() {
            Some((py, pv)) if (y - *py).abs() <= 1e-12 * y.abs().max(1.0) => *pv += v,
            _ => merged.push((y, v)),
        }
    }
    Ok(ApInverse {
        terms: merged,
        residual: res,
        method: InverseMethod::NewtonSchulz {
            order: order as usize,
            iterations,
        },
    })
}
