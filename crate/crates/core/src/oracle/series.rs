use std::collections::BTreeMap;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, ToPrimitive};

use super::LatticeDistribution;
use crate::error::{Error, Result};

/// Field arithmetic for the formal expansion; `f64` and `BigRational` both
/// qualify.
pub trait SeriesScalar: Clone + Num + Neg<Output = Self> + PartialOrd + FromPrimitive + ToPrimitive {}

impl<T> SeriesScalar for T where T: Clone + Num + Neg<Output = T> + PartialOrd + FromPrimitive + ToPrimitive {}

/// `log P(w) = log a0 + n0 log w + log(1 + u)` with the dominant atom at
/// index `n0`; `coefficients[k]` multiplies `w^k` in `log(1 + u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesLog<T> {
    pub step: f64,
    pub dominant: i64,
    pub drift: f64,
    pub order: usize,
    pub coefficients: Vec<(i64, T)>,
    /// Every coefficient returned is exact at this order; true when all the
    /// non-dominant atoms sit on one side of `n0`.
    pub exact: bool,
    /// One-sided expansions are final only for `|k| < reach`; higher
    /// exponents are not computed.
    pub reach: Option<i64>,
}

impl<T: SeriesScalar> SeriesLog<T> {
    pub fn coefficient(&self, k: i64) -> T {
        self.coefficients
            .binary_search_by_key(&k, |c| c.0)
            .map_or_else(|_| T::zero(), |i| self.coefficients[i].1.clone())
    }

    pub fn to_f64(&self) -> SeriesLog<f64> {
        SeriesLog {
            step: self.step,
            dominant: self.dominant,
            drift: self.drift,
            order: self.order,
            coefficients: self
                .coefficients
                .iter()
                .map(|(k, c)| (*k, c.to_f64().unwrap_or(f64::NAN)))
                .collect(),
            exact: self.exact,
            reach: self.reach,
        }
    }
}

/// Smallest order whose geometric remainder `r^{K+1} / ((K+1)(1-r))` is
/// below `tol`.
pub fn series_order_for(ratio: f64, tol: f64) -> usize {
    if ratio <= 0.0 {
        return 1;
    }
    let mut k = 1usize;
    while ratio.powi(k as i32 + 1) / ((k + 1) as f64 * (1.0 - ratio)) > tol && k < 100_000 {
        k += 1;
    }
    k
}

/// Laurent polynomial `sum_j c[j] w^{lo + j}`.
#[derive(Clone)]
struct Laurent<T> {
    lo: i64,
    c: Vec<T>,
}

impl<T: SeriesScalar> Laurent<T> {
    /// Product, keeping only exponents with `|e| < bound`.
    fn times(&self, other: &Laurent<T>, bound: i64) -> Laurent<T> {
        let empty = Laurent { lo: 0, c: Vec::new() };
        if self.c.is_empty() || other.c.is_empty() {
            return empty;
        }
        let lo = (self.lo + other.lo).max(1 - bound);
        let hi = (self.lo + other.lo + (self.c.len() + other.c.len()) as i64 - 2).min(bound - 1);
        if hi < lo {
            return empty;
        }
        let mut c = vec![T::zero(); (hi - lo + 1) as usize];
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.c.iter().enumerate() {
                let e = self.lo + other.lo + (i + j) as i64;
                if e < lo || e > hi || y.is_zero() {
                    continue;
                }
                let slot = &mut c[(e - lo) as usize];
                *slot = slot.clone() + x.clone() * y.clone();
            }
        }
        Laurent { lo, c }
    }
}

fn expand<T: SeriesScalar>(step: f64, indices: &[i64], masses: &[T], order: usize) -> Result<SeriesLog<T>> {
    if indices.len() != masses.len() || indices.is_empty() {
        return Err(Error::Input("series oracle needs matching, non-empty index and mass lists".into()));
    }
    let (i0, a0) = masses
        .iter()
        .enumerate()
        .fold((0, &masses[0]), |best, (i, m)| if *m > *best.1 { (i, m) } else { best });
    let a0 = a0.clone();
    let n0 = indices[i0];
    let mut rest = T::zero();
    let mut terms: BTreeMap<i64, T> = BTreeMap::new();
    for (i, (k, m)) in indices.iter().zip(masses).enumerate() {
        if i == i0 {
            continue;
        }
        rest = rest + m.clone();
        let r = m.clone() / a0.clone();
        terms.entry(k - n0).and_modify(|v| *v = v.clone() + r.clone()).or_insert(r);
    }
    if rest >= a0 {
        return Err(Error::NotDominant {
            max: a0.to_f64().unwrap_or(f64::NAN),
            rest: rest.to_f64().unwrap_or(f64::NAN),
        });
    }
    terms.retain(|k, _| *k != 0);
    let lo = terms.keys().next().copied().unwrap_or(0);
    let hi = terms.keys().next_back().copied().unwrap_or(0);
    let one_sided = lo > 0 || hi < 0;
    // One-sided: u^j only reaches exponents >= j * min|k|, so everything
    // strictly below (order + 1) * min|k| is final after `order` powers.
    let bound = if lo > 0 {
        (order as i64 + 1) * lo
    } else if hi < 0 {
        (order as i64 + 1) * -hi
    } else {
        i64::MAX / 4
    };
    let mut u = Laurent {
        lo,
        c: if terms.is_empty() { Vec::new() } else { vec![T::zero(); (hi - lo + 1) as usize] },
    };
    for (k, v) in &terms {
        u.c[(k - lo) as usize] = v.clone();
    }
    let mut log: BTreeMap<i64, T> = BTreeMap::new();
    let mut power = Laurent { lo: 0, c: vec![T::one()] };
    for j in 1..=order {
        power = power.times(&u, bound);
        if power.c.is_empty() {
            break;
        }
        let inv = T::from_usize(j).ok_or_else(|| Error::Input("series order overflow".into()))?;
        for (i, v) in power.c.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let term = if j % 2 == 1 { v.clone() / inv.clone() } else { -(v.clone() / inv.clone()) };
            log.entry(power.lo + i as i64)
                .and_modify(|c| *c = c.clone() + term.clone())
                .or_insert(term);
        }
    }
    let coefficients = log.into_iter().filter(|(k, c)| *k != 0 && !c.is_zero()).collect();
    Ok(SeriesLog {
        step,
        dominant: n0,
        drift: n0 as f64 * step,
        order,
        coefficients,
        exact: one_sided || terms.is_empty(),
        reach: one_sided.then_some(bound),
    })
}

/// `(total - max) / max`; the series converges when this is below 1.
pub fn dominance_ratio(ld: &LatticeDistribution) -> f64 {
    let (max, total) = ld
        .masses
        .iter()
        .fold((0.0f64, 0.0f64), |(m, t), a| (m.max(*a), t + a));
    if max > 0.0 {
        (total - max) / max
    } else {
        f64::INFINITY
    }
}

/// Floating-point expansion.  `order = None` picks the order whose
/// remainder bound is below `1e-17`.
pub fn series_log_coeffs(ld: &LatticeDistribution, order: Option<usize>) -> Result<SeriesLog<f64>> {
    let ratio = dominance_ratio(ld);
    let order = order.unwrap_or_else(|| if ratio < 1.0 { series_order_for(ratio, 1e-17) } else { 1 });
    expand(ld.step(), &ld.indices, &ld.masses, order)
}

/// Exact rational expansion; each mass enters as the exact value of its
/// binary representation.
pub fn series_log_coeffs_exact(ld: &LatticeDistribution, order: usize) -> Result<SeriesLog<BigRational>> {
    let masses = ld
        .masses
        .iter()
        .map(|m| BigRational::from_float(*m).ok_or_else(|| Error::Input(format!("mass {m} is not finite"))))
        .collect::<Result<Vec<_>>>()?;
    expand(ld.step(), &ld.indices, &masses, order)
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fft_lattice_triplet;

    fn ld(n: u64, atoms: &[(i64, f64)]) -> LatticeDistribution {
        LatticeDistribution {
            n,
            indices: atoms.iter().map(|a| a.0).collect(),
            masses: atoms.iter().map(|a| a.1).collect(),
        }
    }

    #[test]
    fn exact_examples() {
        let s = series_log_coeffs_exact(&ld(1, &[(0, 0.75), (1, 0.25)]), 3).unwrap();
        assert!(s.exact);
        assert_eq!(
            s.coefficients,
            vec![(1, rational(1, 3)), (2, rational(-1, 18)), (3, rational(1, 81))]
        );
        let s = series_log_coeffs_exact(&ld(1, &[(0, 0.9), (2, 0.1)]), 2).unwrap();
        assert_eq!(s.coefficients.len(), 2);
        assert!((s.coefficient(2).to_f64().unwrap() - 1.0 / 9.0).abs() < 1e-16);
        assert!((s.coefficient(4).to_f64().unwrap() + 1.0 / 162.0).abs() < 1e-17);
        let s = series_log_coeffs_exact(&ld(1, &[(0, 1.0)]), 5).unwrap();
        assert!(s.coefficients.is_empty());
        assert!(matches!(
            series_log_coeffs_exact(&ld(1, &[(0, 0.5), (1, 0.5)]), 3),
            Err(Error::NotDominant { .. })
        ));
    }

    #[test]
    fn dominant_atom_off_origin() {
        let s = series_log_coeffs_exact(&ld(2, &[(3, 0.2), (5, 0.8)]), 2).unwrap();
        assert_eq!(s.dominant, 5);
        assert!((s.drift - 2.5).abs() < 1e-15);
        assert_eq!(s.coefficients, vec![(-4, rational(-1, 32)), (-2, rational(1, 4))]);
    }

    #[test]
    fn two_sided_float_matches_fft() {
        let d = ld(1, &[(-2, 0.1), (-1, 0.05), (0, 0.7), (1, 0.1), (3, 0.05)]);
        let s = series_log_coeffs(&d, None).unwrap();
        assert!(!s.exact);
        let f = fft_lattice_triplet(&d).unwrap();
        assert_eq!(f.winding, s.dominant);
        for k in -40..=40 {
            assert!((s.coefficient(k) - f.coefficient(k)).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn order_selection() {
        assert_eq!(series_order_for(0.0, 1e-12), 1);
        let k = series_order_for(0.5, 1e-12);
        assert!(0.5f64.powi(k as i32 + 1) / ((k + 1) as f64 * 0.5) <= 1e-12);
        assert!(0.5f64.powi(k as i32) / (k as f64 * 0.5) > 1e-12);
    }
}
