//! Quasi-Lévy triplets `(a, gamma0, nu)` with
//! `nu(dx) = sum c_y delta_y + (h(x) + m e^{-|x|} sgn(x) / |x|) dx`.

mod extract;
mod measure;
mod text;

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::distlog::cayley_log;
use crate::quad;

pub use extract::{extract_triplet, invert_cf, ExtractionDiagnostics, InverseRepresentation};
pub use measure::{beta_near_zero_moment, nu_density, nu_measures, NuMeasures};
pub(crate) use measure::{density_parts, spectral_kernel};
pub use text::{parse_triplet, write_triplet};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone)]
pub struct QuasiLevyTriplet {
    /// Gaussian variance. Always 0 for this class; kept so the Lévy–Khintchine
    /// form can be written out in full.
    pub a: f64,
    pub gamma0: f64,
    /// `(y, c_y)` with `y != 0`, sorted by location.
    pub atoms: Vec<(f64, f64)>,
    /// `h(x) = grid(x) + jump * j(x)` with `grid` sampled on `x0 + k dx` and
    /// `j(x) = sgn(x) (e^{-x^2/2} - e^{-|x|}) / |x|`. Whenever `m != 0` the true
    /// `h` jumps by `2m` at 0; extraction sets `jump = m` so the grid part stays smooth.
    pub x0: f64,
    pub dx: f64,
    pub h: Vec<f64>,
    pub jump: f64,
    pub m: i64,
    pub diagnostics: ExtractionDiagnostics,
}

impl PartialEq for QuasiLevyTriplet {
    fn eq(&self, other: &Self) -> bool {
        self.a.to_bits() == other.a.to_bits()
            && self.gamma0.to_bits() == other.gamma0.to_bits()
            && self.atoms.len() == other.atoms.len()
            && self
                .atoms
                .iter()
                .zip(&other.atoms)
                .all(|(p, q)| p.0.to_bits() == q.0.to_bits() && p.1.to_bits() == q.1.to_bits())
            && self.x0.to_bits() == other.x0.to_bits()
            && self.dx.to_bits() == other.dx.to_bits()
            && self.h.len() == other.h.len()
            && self.h.iter().zip(&other.h).all(|(p, q)| p.to_bits() == q.to_bits())
            && self.jump.to_bits() == other.jump.to_bits()
            && self.m == other.m
    }
}

impl QuasiLevyTriplet {
    pub fn zero() -> Self {
        Self {
            a: 0.0,
            gamma0: 0.0,
            atoms: Vec::new(),
            x0: 0.0,
            dx: 0.0,
            h: Vec::new(),
            jump: 0.0,
            m: 0,
            diagnostics: ExtractionDiagnostics::default(),
        }
    }

    /// Only the Cayley density `m e^{-|x|} sgn(x) / |x|`.
    pub fn cayley(m: i64) -> Self {
        Self { m, ..Self::zero() }
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    /// `(lo, hi)` of the `h` grid, or `None` when `h` is empty.
    pub fn h_support(&self) -> Option<(f64, f64)> {
        (!self.h.is_empty()).then(|| (self.x0, self.x(self.h.len() - 1)))
    }

    pub fn h_at(&self, x: f64) -> f64 {
        self.grid_at(x) + self.jump * jump_profile(x)
    }

    /// Linear interpolation of the grid part; zero off the grid.
    pub fn grid_at(&self, x: f64) -> f64 {
        let n = self.h.len();
        if n == 0 {
            return 0.0;
        }
        if n == 1 {
            return if (x - self.x0).abs() < 0.5 * self.dx { self.h[0] } else { 0.0 };
        }
        let t = (x - self.x0) / self.dx;
        if t < 0.0 || t > (n - 1) as f64 {
            return 0.0;
        }
        let j = (t.floor() as usize).min(n - 2);
        let w = t - j as f64;
        self.h[j] * (1.0 - w) + self.h[j + 1] * w
    }

    /// `int h dx`; the jump profile is odd, so only the grid contributes.
    pub fn integral_h(&self) -> f64 {
        self.h.iter().sum::<f64>() * self.dx
    }

    /// `sum_k h_k e^{i z x_k} dx` over the grid part.
    pub fn h_transform(&self, z: f64) -> Complex64 {
        spectral_kernel(&self.h, self.x0, self.dx, z)
    }

    /// Invariant violations (empty for a valid triplet).
    pub fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.a != 0.0 {
            out.push(format!("gaussian variance must be 0, got {}", self.a));
        }
        if !self.gamma0.is_finite() {
            out.push("drift is not finite".into());
        }
        for (y, c) in &self.atoms {
            if *y == 0.0 || !y.is_finite() || !c.is_finite() {
                out.push(format!("bad atom ({y}, {c})"));
            }
        }
        if self.atoms.windows(2).any(|w| w[0].0 >= w[1].0) {
            out.push("atom locations must be strictly increasing".into());
        }
        if !self.h.is_empty() && !(self.dx > 0.0 && self.x0.is_finite()) {
            out.push("density grid needs dx > 0 and a finite origin".into());
        }
        if !self.jump.is_finite() {
            out.push("jump coefficient is not finite".into());
        }
        if self.h.iter().any(|v| !v.is_finite()) {
            out.push("density grid has non-finite samples".into());
        }
        out
    }

    /// `gamma = gamma0 + int_{(-1,1)} x nu(dx)`. The Cayley part contributes
    /// `m int_{-1}^{1} e^{-|x|} dx = 2m(1 - 1/e)`: its integrand `x k(x)` is even.
    /// The jump profile adds `2 jump int_0^1 (e^{-x^2/2} - e^{-x}) dx`.
    pub fn levy_khintchine_drift(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|(y, _)| y.abs() < 1.0).map(|(y, c)| y * c).sum();
        let dens: f64 = (0..self.h.len())
            .map(|j| (self.x(j), self.h[j]))
            .filter(|(x, _)| x.abs() < 1.0)
            .map(|(x, v)| x * v)
            .sum::<f64>()
            * self.dx;
        let e1 = 1.0 - (-1.0f64).exp();
        let g1 = (PI / 2.0).sqrt() * libm::erf(FRAC_1_SQRT_2);
        self.gamma0 + atoms + dens + 2.0 * self.m as f64 * e1 + 2.0 * self.jump * (g1 - e1)
    }

    /// `log reconstruct_cf(z)`.
    pub fn log_cf(&self, z: f64) -> Complex64 {
        let mut acc = I * (self.gamma0 * z) - 0.5 * self.a * z * z;
        for (y, c) in &self.atoms {
            acc += (Complex64::from_polar(1.0, y * z) - 1.0) * *c;
        }
        if !self.h.is_empty() {
            acc += self.h_transform(z) - self.integral_h();
        }
        acc + cayley_log(z) * (self.m as f64 - self.jump) + smooth_cayley_log(z) * self.jump
    }
}

/// `sgn(x) (e^{-x^2/2} - e^{-|x|}) / |x|`, tending to `sgn(x)` at 0.
pub fn jump_profile(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let a = x.abs();
    x.signum() * (libm::expm1(-0.5 * a * a) - libm::expm1(-a)) / a
}

/// `int sgn(x) e^{-x^2/2} (e^{izx} - 1) / |x| dx = i pi erf(z / sqrt 2)`.
pub fn smooth_cayley_log(z: f64) -> Complex64 {
    I * (PI * libm::erf(z * FRAC_1_SQRT_2))
}

/// `exp(i gamma0 z + sum c_y (e^{izy} - 1) + int h (e^{izx} - 1) dx + m Lambda(z))`.
pub fn reconstruct_cf(t: &QuasiLevyTriplet, z: f64) -> Complex64 {
    t.log_cf(z).exp()
}

/// The Lévy–Khintchine form
/// `exp(i gamma z - a z^2/2 + int (e^{izx} - 1 - izx 1_{|x|<1}) nu(dx))`.
/// The Cayley part is integrated numerically rather than through `Lambda`.
pub fn levy_khintchine_eval(t: &QuasiLevyTriplet, z: f64) -> Complex64 {
    let gamma = t.levy_khintchine_drift();
    let mut acc = I * (gamma * z) - 0.5 * t.a * z * z;
    for (y, c) in &t.atoms {
        let comp = if y.abs() < 1.0 { I * (z * y) } else { Complex64::new(0.0, 0.0) };
        acc += (Complex64::from_polar(1.0, y * z) - 1.0 - comp) * *c;
    }
    if !t.h.is_empty() {
        let comp: f64 = (0..t.h.len())
            .map(|j| (t.x(j), t.h[j]))
            .filter(|(x, _)| x.abs() < 1.0)
            .map(|(x, v)| x * v)
            .sum::<f64>()
            * t.dx;
        acc += t.h_transform(z) - t.integral_h() - I * (z * comp);
    }
    let (me, mg) = (t.m as f64 - t.jump, t.jump);
    if (me != 0.0 || mg != 0.0) && z != 0.0 {
        // 2i int_0^inf (me e^{-x} + mg e^{-x^2/2}) (sin(zx) - zx 1_{x<1}) / x dx, split at 1.
        let kernel = |x: f64| me * (-x).exp() + mg * (-0.5 * x * x).exp();
        let width = (0.25 / z.abs()).min(0.1);
        let near = quad::gl_composite(
            |x| {
                let s = if x * z.abs() < 1e-3 {
                    let u = z * x;
                    -u * u * u / 6.0 + u.powi(5) / 120.0
                } else {
                    (z * x).sin() - z * x
                };
                kernel(x) * s / x
            },
            0.0,
            1.0,
            width,
        );
        let far = quad::gl_composite(|x| kernel(x) * (z * x).sin() / x, 1.0, 46.0, width);
        acc += I * (2.0 * (near + far));
    }
    acc.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distlog::cayley_term;

    fn bernoulli_triplet(k: usize) -> QuasiLevyTriplet {
        let atoms = (1..=k)
            .map(|j| {
                let s = if j % 2 == 1 { 1.0 } else { -1.0 };
                (j as f64, s * (1.0f64 / 3.0).powi(j as i32) / j as f64)
            })
            .collect();
        QuasiLevyTriplet {
            atoms,
            ..QuasiLevyTriplet::zero()
        }
    }

    #[test]
    fn zero_triplet_is_one() {
        let t = QuasiLevyTriplet::zero();
        for z in [-7.0, 0.0, 0.3, 50.0] {
            assert_eq!(reconstruct_cf(&t, z), Complex64::new(1.0, 0.0));
            assert_eq!(levy_khintchine_eval(&t, z), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn bernoulli_series_matches_cf() {
        let t = bernoulli_triplet(40);
        for k in 0..=400 {
            let z = -20.0 + 0.1 * k as f64;
            let f = Complex64::new(0.75, 0.0) + Complex64::from_polar(0.25, z);
            assert!((reconstruct_cf(&t, z) - f).norm() < 1e-10, "z = {z}");
        }
        for z in [1.0, std::f64::consts::PI, 10.0] {
            assert!((reconstruct_cf(&t, z) - levy_khintchine_eval(&t, z)).norm() < 1e-8);
        }
    }

    #[test]
    fn cayley_only_triplet() {
        for m in -3..=3 {
            let t = QuasiLevyTriplet::cayley(m);
            for k in 0..=80 {
                let z = -20.0 + 0.5 * k as f64;
                let v = reconstruct_cf(&t, z);
                assert!((v.norm() - 1.0).abs() < 1e-14);
                assert!((v - cayley_term(z, m)).norm() < 1e-12);
                assert!((v - levy_khintchine_eval(&t, z)).norm() < 1e-8, "m = {m}, z = {z}");
            }
        }
    }

    #[test]
    fn cayley_drift_is_not_zero() {
        let t = QuasiLevyTriplet::cayley(1);
        assert!((t.levy_khintchine_drift() - 2.0 * (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn jump_split_is_invisible() {
        // Moving the Cayley density into the jump profile plus a smooth kernel
        // leaves the function unchanged.
        let t = QuasiLevyTriplet {
            jump: 2.0,
            m: 2,
            ..QuasiLevyTriplet::zero()
        };
        let plain = QuasiLevyTriplet::cayley(2);
        let want = plain.levy_khintchine_drift() + 2.0 * 2.0 * quad::gl_composite(|x| (-0.5 * x * x).exp() - (-x).exp(), 0.0, 1.0, 0.1);
        assert!((t.levy_khintchine_drift() - want).abs() < 1e-13);
        for z in [-15.0, -2.0, 0.4, 7.0] {
            let v = reconstruct_cf(&t, z);
            let sg = (I * (PI * libm::erf(z / 2f64.sqrt()))).exp().powi(2);
            assert!((v - sg).norm() < 1e-13);
            assert!((levy_khintchine_eval(&t, z) - v).norm() < 1e-8);
        }
        assert!((jump_profile(1e-9) - 1.0).abs() < 1e-8);
        assert!((jump_profile(-3.0) + ((-4.5f64).exp() - (-3.0f64).exp()) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn density_grid_forms_agree() {
        // h = standard normal density on a fine grid: int h (e^{izx} - 1) = e^{-z^2/2} - 1.
        let dx = 0.01;
        let n = 2001;
        let x0 = -10.0;
        let h: Vec<f64> = (0..n)
            .map(|j| {
                let x = x0 + j as f64 * dx;
                (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
            })
            .collect();
        let t = QuasiLevyTriplet {
            x0,
            dx,
            h,
            m: -1,
            gamma0: 0.25,
            ..QuasiLevyTriplet::zero()
        };
        for z in [-9.0, -1.0, 0.5, 3.0, 12.0] {
            let want = (I * (0.25 * z) + (-0.5 * z * z).exp() - 1.0).exp() * cayley_term(z, -1);
            assert!((reconstruct_cf(&t, z) - want).norm() < 1e-12);
            assert!((levy_khintchine_eval(&t, z) - want).norm() < 1e-8);
        }
        assert!((t.h_at(0.0) - 0.398_942_280_401_432_7).abs() < 1e-12);
        assert_eq!(t.h_at(11.0), 0.0);
    }
}
