use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::density::DensitySpec;
use crate::quad::{self, Finiteness};

/// `Weight` is an algebra weight (values >= 1); `Submultiplicative` a moment function `H > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    Weight,
    Submultiplicative,
}

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct WeightFunction {
    pub name: String,
    /// Declared constant in `w(x + y) <= B w(x) w(y)`.
    pub declared_b: f64,
    pub kind: WeightKind,
    eval: Eval,
    log_eval: Option<Eval>,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFunction")
            .field("name", &self.name)
            .field("declared_b", &self.declared_b)
            .field("kind", &self.kind)
            .finish()
    }
}

impl WeightFunction {
    pub fn new<F>(name: impl Into<String>, declared_b: f64, kind: WeightKind, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            declared_b,
            kind,
            eval: Arc::new(f),
            log_eval: None,
        }
    }

    /// Supply `log w` in closed form, so fast-growing weights never overflow.
    pub fn with_log<F>(mut self, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.log_eval = Some(Arc::new(f));
        self
    }

    pub fn constant() -> Self {
        Self::new("one", 1.0, WeightKind::Weight, |_| 1.0).with_log(|_| 0.0)
    }

    /// `(1 + |x|)^s`.
    pub fn polynomial(s: f64) -> Self {
        Self::new(format!("poly:{s}"), 1.0, WeightKind::Weight, move |x: f64| {
            (1.0 + x.abs()).powf(s)
        })
        .with_log(move |x: f64| s * x.abs().ln_1p())
    }

    /// `exp(c sqrt|x|)`.
    pub fn subexponential(c: f64) -> Self {
        Self::new(format!("subexp:{c}"), 1.0, WeightKind::Weight, move |x: f64| {
            (c * x.abs().sqrt()).exp()
        })
        .with_log(move |x: f64| c * x.abs().sqrt())
    }

    /// `exp(c |x|)`: submultiplicative but fails GRS for `c > 0`.
    pub fn exponential(c: f64) -> Self {
        Self::new(format!("exp:{c}"), 1.0, WeightKind::Weight, move |x: f64| {
            (c * x.abs()).exp()
        })
        .with_log(move |x: f64| c * x.abs())
    }

    /// Catalog lookup: `one`, `poly:S`, `subexp:C`, `exp:C`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec == "one" || spec == "1" {
            return Ok(Self::constant());
        }
        let (kind, arg) = spec
            .split_once(':')
            .ok_or_else(|| Error::Input(format!("unknown weight `{spec}` (expected one, poly:S, subexp:C, exp:C)")))?;
        let v: f64 = arg
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("bad weight parameter `{arg}`")))?;
        match kind.trim() {
            "poly" => Ok(Self::polynomial(v)),
            "subexp" => Ok(Self::subexponential(v)),
            "exp" => Ok(Self::exponential(v)),
            other => Err(Error::Input(format!("unknown weight family `{other}`"))),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn ln_eval(&self, x: f64) -> f64 {
        match &self.log_eval {
            Some(l) => l(x),
            None => self.eval(x).ln(),
        }
    }

    /// `w(x) * g` computed through logs; zero when `g` is zero.
    pub fn times(&self, x: f64, g: f64) -> f64 {
        if g == 0.0 {
            0.0
        } else {
            (self.ln_eval(x) + g.ln()).exp()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrsVerdict {
    Satisfied,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrsReport {
    pub verdict: GrsVerdict,
    /// `log w(x) / x` at the horizon, for `+x` and `-x`.
    pub slope_plus: f64,
    pub slope_minus: f64,
    /// Log-log decay rate of `|log w(x) / x|` over the upper half of the ladder.
    pub decay_exponent: f64,
    pub horizon: f64,
}

pub const GRS_TOL: f64 = 1e-3;

pub fn grs_check(w: &WeightFunction, horizon: f64, samples: usize) -> Result<GrsReport> {
    grs_check_with(w, horizon, samples, GRS_TOL)
}

pub fn grs_check_with(w: &WeightFunction, horizon: f64, samples: usize, tol: f64) -> Result<GrsReport> {
    if !(horizon > 1.0) {
        return Err(Error::Input(format!("GRS horizon must exceed 1 (got {horizon})")));
    }
    let n = samples.max(8);
    let ratio = horizon.ln() / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|k| (k as f64 * ratio).exp()).collect();
    let mut worst_decay = f64::NEG_INFINITY;
    let mut tails = [0.0; 2];
    let mut small = true;
    for (side, sign) in [1.0, -1.0].into_iter().enumerate() {
        let mut s = Vec::with_capacity(n);
        for &x in &xs {
            let l = w.ln_eval(sign * x);
            if !l.is_finite() {
                return Err(Error::Input(format!("weight {} not evaluable at {}", w.name, sign * x)));
            }
            s.push(l / x);
        }
        tails[side] = *s.last().unwrap();
        let upper: Vec<(f64, f64)> = xs
            .iter()
            .zip(&s)
            .skip(n / 2)
            .filter(|(_, v)| v.abs() > 0.0)
            .map(|(x, v)| (x.ln(), v.abs().ln()))
            .collect();
        let decay = if upper.len() < 2 { f64::NEG_INFINITY } else { quad::regression_slope(&upper) };
        worst_decay = worst_decay.max(decay);
        if s.iter().skip(n / 2).any(|v| v.abs() >= tol) {
            small = false;
        }
    }
    let verdict = if small || worst_decay < -0.1 {
        GrsVerdict::Satisfied
    } else if worst_decay > -0.02 {
        GrsVerdict::Violated
    } else {
        GrsVerdict::Inconclusive
    };
    Ok(GrsReport {
        verdict,
        slope_plus: tails[0],
        slope_minus: tails[1],
        decay_exponent: worst_decay,
        horizon,
    })
}

/// `max w(x + y) / (w(x) w(y))` over all pairs of the grid.
pub fn submultiplicative_check(w: &WeightFunction, grid: &[f64]) -> Result<f64> {
    let logs: Vec<f64> = grid.iter().map(|x| w.ln_eval(*x)).collect();
    if let Some(k) = logs.iter().position(|l| !l.is_finite()) {
        return Err(Error::Input(format!(
            "weight {} must be > 0 and finite; got {} at {}",
            w.name,
            w.eval(grid[k]),
            grid[k]
        )));
    }
    let mut worst = f64::NEG_INFINITY;
    for (i, x) in grid.iter().enumerate() {
        for (j, y) in grid.iter().enumerate() {
            let l = w.ln_eval(x + y);
            if !l.is_finite() {
                return Err(Error::Input(format!("weight {} not evaluable at {}", w.name, x + y)));
            }
            worst = worst.max(l - logs[i] - logs[j]);
        }
    }
    Ok(worst.exp())
}

/// `int w(x) |f(x)| dx` out to `horizon`, with tail classification.
pub fn weighted_l1_norm(density: &DensitySpec, w: &WeightFunction) -> Finiteness {
    weighted_l1_norm_to(density, w, 1e3)
}

pub fn weighted_l1_norm_to(density: &DensitySpec, w: &WeightFunction, horizon: f64) -> Finiteness {
    let width = (density.scale() / 8.0).clamp(1e-3, 0.25);
    quad::ladder_integral(|x| w.times(x, density.pdf(x).abs()), 0.0, horizon, width, GRS_TOL)
}
