//! Quadrature helpers: fixed-order Gauss-Legendre panels and a tail ladder
//! used to decide finiteness of improper integrals.

use num_complex::Complex64;

/// 10-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_4,
    0.219_086_362_515_982,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

/// Gauss-Legendre rule on one panel `[a, b]`.
pub fn gl_panel<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        acc += w * (f(c - h * x) + f(c + h * x));
    }
    acc * h
}

pub fn gl_panel_c<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64) -> Complex64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        acc += (f(c - h * x) + f(c + h * x)) * *w;
    }
    acc * h
}

/// Composite Gauss-Legendre on `[a, b]` with panels no wider than `max_width`.
pub fn gl_composite<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, max_width: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = ((b - a) / max_width).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    (0..n)
        .map(|k| {
            let lo = a + k as f64 * h;
            gl_panel(&mut f, lo, lo + h)
        })
        .sum()
}

pub fn gl_composite_c<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    max_width: f64,
) -> Complex64 {
    if b <= a {
        return Complex64::new(0.0, 0.0);
    }
    let n = ((b - a) / max_width).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    (0..n)
        .map(|k| {
            let lo = a + k as f64 * h;
            gl_panel_c(&mut f, lo, lo + h)
        })
        .sum()
}

/// Integral over `[a, b]` with `0 < a` using geometrically growing panels
/// (ratio 2). Suited to integrands with an algebraic singularity at 0.
pub fn gl_geometric<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    debug_assert!(a > 0.0);
    let mut acc = 0.0;
    let mut lo = a;
    while lo < b {
        let hi = (lo * 1.5).min(b);
        acc += gl_panel(&mut f, lo, hi);
        lo = hi;
    }
    acc
}

/// Verdict of a finiteness decision on a non-negative improper integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Finiteness {
    Finite(f64),
    Infinite,
    /// Tail growth could not be classified within the horizon.
    Inconclusive { partial: f64 },
}

impl Finiteness {
    pub fn is_finite(&self) -> bool {
        matches!(self, Finiteness::Finite(_))
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Finiteness::Finite(v) => Some(*v),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Finiteness::Finite(_) => "finite",
            Finiteness::Infinite => "infinite",
            Finiteness::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Decide whether the non-negative sequence of shell contributions
/// `shells[k]` (the integral over the `k`-th dyadic shell) sums to a finite
/// value. `base` is the contribution of the core region.
///
/// The regression is on `log shell` against the shell index: a decaying
/// trend means a convergent geometric tail, a flat or growing one means the
/// partial integrals diverge.
pub fn classify_tail(base: f64, shells: &[f64], tol: f64) -> Finiteness {
    let total: f64 = base + shells.iter().sum::<f64>();
    if !total.is_finite() {
        return Finiteness::Infinite;
    }
    let scale = total.abs().max(f64::MIN_POSITIVE);
    // Shells that underflowed below relative round-off are treated as zero.
    let tail: Vec<(f64, f64)> = shells
        .iter()
        .enumerate()
        .skip(shells.len() / 2)
        .filter(|(_, s)| **s > 1e-300 && **s > 1e-17 * scale)
        .map(|(k, s)| (k as f64, s.ln()))
        .collect();
    if tail.len() < 2 {
        return Finiteness::Finite(total);
    }
    let slope = regression_slope(&tail);
    let last = shells.last().copied().unwrap_or(0.0);
    if slope < -tol {
        // Geometric tail continuation beyond the horizon.
        let ratio = slope.exp();
        let rest = last * ratio / (1.0 - ratio);
        if rest <= 1e-3 * scale {
            Finiteness::Finite(total + rest)
        } else {
            Finiteness::Inconclusive { partial: total }
        }
    } else if slope > tol || last > 1e-3 * scale {
        Finiteness::Infinite
    } else {
        Finiteness::Inconclusive { partial: total }
    }
}

/// Least-squares slope of `y` against `x`.
pub fn regression_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Integrate a non-negative integrand over `|x| > inner` (or all of R when
/// `inner == 0`) on dyadic shells out to `horizon` and classify the tail.
/// `core_width` bounds the panel width used on each shell.
pub fn ladder_integral<F: FnMut(f64) -> f64>(
    mut f: F,
    inner: f64,
    horizon: f64,
    core_width: f64,
    tol: f64,
) -> Finiteness {
    let mut edges = vec![inner];
    let mut x = inner.max(1.0);
    if x > inner {
        edges.push(x);
    }
    // Whole dyadic shells only: a clipped last shell would fake a decaying trend.
    while x < horizon {
        x *= 2.0;
        edges.push(x);
    }
    let mut base = 0.0;
    let mut shells = Vec::with_capacity(edges.len());
    for (k, w) in edges.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let width = core_width.min((b - a) / 4.0).max(1e-6);
        let part = gl_composite(&mut f, a, b, width) + gl_composite(|t| f(-t), a, b, width);
        if k == 0 && inner < 1.0 {
            base += part;
        } else {
            shells.push(part);
        }
    }
    classify_tail(base, &shells, tol)
}

/// Trapezoid weights for an increasing abscissa vector.
pub fn trapezoid_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let h = 0.5 * (x[k + 1] - x[k]);
        w[k] += h;
        w[k + 1] += h;
    }
    w
}
