//! Plain-text distribution spec files.
//!
//! ```text
//! # 0.001 delta_0 + 0.999 N(1, 1)
//! [mixing]
//! p = 0.001
//! lattice = 1
//!
//! [atoms]
//! 0   1.0
//!
//! [density]
//! kind = gaussian
//! mean = 1
//! variance = 1
//! ```
//!
//! A sampled density takes `kind = sampled`, a `tail = exponential C R` or
//! `tail = polynomial C S` line, and then one `x f(x)` pair per line.
//! Numbers may be written as decimals, `a/b`, or `sqrt(a)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::density::{DensitySpec, SampledDensity, Side, TailBound};
use crate::model::distribution::{validate_distribution, Atom, MixedDistribution};

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        return parse_number(inner).filter(|v| *v >= 0.0).map(f64::sqrt);
    }
    if let Some(inner) = s.strip_prefix("-sqrt(").and_then(|r| r.strip_suffix(')')) {
        return parse_number(inner).filter(|v| *v >= 0.0).map(|v| -v.sqrt());
    }
    if let Some((a, b)) = s.split_once('/') {
        let (a, b) = (parse_number(a)?, parse_number(b)?);
        return (b != 0.0).then(|| a / b);
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

#[derive(Default)]
struct Section {
    keys: BTreeMap<String, (usize, String)>,
    rows: Vec<(usize, Vec<String>)>,
    line: usize,
}

fn num_at(line: usize, s: &str) -> Result<f64> {
    parse_number(s).ok_or_else(|| perr(line, format!("expected a number, found `{s}`")))
}

fn key(sec: &Section, name: &str, what: &str) -> Result<f64> {
    match sec.keys.get(name) {
        Some((line, v)) => num_at(*line, v),
        None => Err(perr(sec.line, format!("{what} requires `{name} = ...`"))),
    }
}

pub fn parse_spec(text: &str) -> Result<MixedDistribution> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let name = name.trim().to_ascii_lowercase();
            if !matches!(name.as_str(), "mixing" | "atoms" | "density") {
                return Err(perr(line, format!("unknown section [{name}]")));
            }
            if sections.contains_key(&name) {
                return Err(perr(line, format!("duplicate section [{name}]")));
            }
            sections.insert(name.clone(), Section { line, ..Default::default() });
            current = Some(name);
            continue;
        }
        let Some(name) = current.as_ref() else {
            return Err(perr(line, "content before the first section header"));
        };
        let sec = sections.get_mut(name).unwrap();
        if let Some((k, v)) = body.split_once('=') {
            let k = k.trim().to_ascii_lowercase();
            if sec.keys.insert(k.clone(), (line, v.trim().to_string())).is_some() {
                return Err(perr(line, format!("duplicate key `{k}`")));
            }
        } else {
            sec.rows.push((line, body.split_whitespace().map(str::to_string).collect()));
        }
    }

    let atoms_sec = sections
        .get("atoms")
        .ok_or_else(|| perr(1, "missing [atoms] section"))?;
    let mut atoms = Vec::with_capacity(atoms_sec.rows.len());
    for (line, cols) in &atoms_sec.rows {
        if cols.len() != 2 {
            return Err(perr(*line, "atom rows are `location mass`"));
        }
        atoms.push(Atom::new(num_at(*line, &cols[0])?, num_at(*line, &cols[1])?));
    }
    if let Some((line, k)) = atoms_sec.keys.iter().map(|(k, (l, _))| (*l, k)).next() {
        return Err(perr(line, format!("unexpected key `{k}` in [atoms]")));
    }

    let density = match sections.get("density") {
        Some(sec) => Some(parse_density(sec)?),
        None => None,
    };

    let (mut p, mut lattice_hint) = (if density.is_some() { None } else { Some(1.0) }, None);
    if let Some(sec) = sections.get("mixing") {
        for (k, (line, v)) in &sec.keys {
            match k.as_str() {
                "p" => p = Some(num_at(*line, v)?),
                "lattice" => lattice_hint = Some(num_at(*line, v)?),
                other => return Err(perr(*line, format!("unknown key `{other}` in [mixing]"))),
            }
        }
        if let Some((line, _)) = sec.rows.first() {
            return Err(perr(*line, "[mixing] takes `key = value` lines only"));
        }
    }
    let p = p.ok_or_else(|| perr(1, "a density is given, so [mixing] must set p"))?;

    let d = MixedDistribution {
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

fn parse_density(sec: &Section) -> Result<DensitySpec> {
    let (kline, kind) = sec
        .keys
        .get("kind")
        .cloned()
        .ok_or_else(|| perr(sec.line, "[density] requires `kind = ...`"))?;
    let allowed: &[&str] = match kind.as_str() {
        "gaussian" => &["kind", "mean", "variance"],
        "laplace" => &["kind", "location", "scale"],
        "uniform" => &["kind", "lo", "hi"],
        "exponential" => &["kind", "rate", "side"],
        "sampled" => &["kind", "tail"],
        other => return Err(perr(kline, format!("unknown density kind `{other}`"))),
    };
    for (k, (line, _)) in &sec.keys {
        if !allowed.contains(&k.as_str()) {
            return Err(perr(*line, format!("key `{k}` not valid for {kind} density")));
        }
    }
    if kind != "sampled" {
        if let Some((line, _)) = sec.rows.first() {
            return Err(perr(*line, "data rows are only allowed for sampled densities"));
        }
    }
    Ok(match kind.as_str() {
        "gaussian" => DensitySpec::gaussian(key(sec, "mean", "gaussian")?, key(sec, "variance", "gaussian")?),
        "laplace" => DensitySpec::laplace(key(sec, "location", "laplace")?, key(sec, "scale", "laplace")?),
        "uniform" => DensitySpec::uniform(key(sec, "lo", "uniform")?, key(sec, "hi", "uniform")?),
        "exponential" => {
            let side = match sec.keys.get("side").map(|(l, v)| (*l, v.as_str())) {
                None | Some((_, "right")) => Side::Right,
                Some((_, "left")) => Side::Left,
                Some((line, other)) => return Err(perr(line, format!("side must be left or right, found `{other}`"))),
            };
            DensitySpec::exponential(key(sec, "rate", "exponential")?, side)
        }
        _ => {
            let (tline, tail) = sec
                .keys
                .get("tail")
                .cloned()
                .ok_or_else(|| perr(sec.line, "sampled density requires `tail = exponential C R` or `tail = polynomial C S`"))?;
            let parts: Vec<&str> = tail.split_whitespace().collect();
            let tail = match parts.as_slice() {
                ["exponential", c, r] => TailBound::Exponential {
                    coeff: num_at(tline, c)?,
                    rate: num_at(tline, r)?,
                },
                ["polynomial", c, s] => TailBound::Polynomial {
                    coeff: num_at(tline, c)?,
                    exponent: num_at(tline, s)?,
                },
                _ => return Err(perr(tline, "tail must be `exponential C R` or `polynomial C S`")),
            };
            let mut x = Vec::new();
            let mut v = Vec::new();
            for (line, cols) in &sec.rows {
                if cols.len() != 2 {
                    return Err(perr(*line, "sampled rows are `x f(x)`"));
                }
                x.push(num_at(*line, &cols[0])?);
                v.push(num_at(*line, &cols[1])?);
            }
            DensitySpec::Sampled(SampledDensity { x, values: v, tail })
        }
    })
}

/// Render a distribution in the spec format; `parse_spec` reads it back bit-exactly.
pub fn write_spec(d: &MixedDistribution) -> Result<String> {
    let mut s = String::new();
    let _ = writeln!(s, "[mixing]\np = {:e}", d.p);
    if let Some(q) = d.lattice_hint {
        let _ = writeln!(s, "lattice = {q:e}");
    }
    s.push_str("\n[atoms]\n");
    for a in &d.atoms {
        let _ = writeln!(s, "{:e} {:e}", a.location, a.mass);
    }
    if let Some(f) = &d.density {
        s.push_str("\n[density]\n");
        match f {
            DensitySpec::Gaussian { mean, variance } => {
                let _ = writeln!(s, "kind = gaussian\nmean = {mean:e}\nvariance = {variance:e}");
            }
            DensitySpec::Laplace { location, scale } => {
                let _ = writeln!(s, "kind = laplace\nlocation = {location:e}\nscale = {scale:e}");
            }
            DensitySpec::Uniform { lo, hi } => {
                let _ = writeln!(s, "kind = uniform\nlo = {lo:e}\nhi = {hi:e}");
            }
            DensitySpec::Exponential { rate, side } => {
                let side = if *side == Side::Right { "right" } else { "left" };
                let _ = writeln!(s, "kind = exponential\nrate = {rate:e}\nside = {side}");
            }
            DensitySpec::Sampled(g) => {
                s.push_str("kind = sampled\n");
                let _ = match g.tail {
                    TailBound::Exponential { coeff, rate } => writeln!(s, "tail = exponential {coeff:e} {rate:e}"),
                    TailBound::Polynomial { coeff, exponent } => writeln!(s, "tail = polynomial {coeff:e} {exponent:e}"),
                };
                for (x, v) in g.x.iter().zip(&g.values) {
                    let _ = writeln!(s, "{x:e} {v:e}");
                }
            }
            DensitySpec::Mixture(_) | DensitySpec::Convolution(..) => {
                return Err(Error::Input(
                    "mixture and convolution densities have no spec-file form".into(),
                ))
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX: &str = "\
# mixed example
[mixing]
p = 1/1000
lattice = 1

[atoms]
0 1.0

[density]
kind = gaussian
mean = 1
variance = 1
";

    #[test]
    fn parses_mixed_example() {
        let d = parse_spec(EX).unwrap();
        assert_eq!(d.p, 0.001);
        assert_eq!(d.atoms, vec![Atom::new(0.0, 1.0)]);
        assert_eq!(d.density, Some(DensitySpec::gaussian(1.0, 1.0)));
        assert_eq!(d.lattice_hint, Some(1.0));
    }

    #[test]
    fn irrational_locations() {
        let d = parse_spec("[atoms]\n0 0.5\nsqrt(2) 0.5\n").unwrap();
        assert_eq!(d.atoms[1].location, 2f64.sqrt());
        assert_eq!(d.p, 1.0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse_spec("[atoms]\n0 1.0\n1 abc\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match parse_spec("[atoms]\n0 1\n[density]\nkind = cauchy\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_spec("[atoms]\n0 0.6\n1 0.5\n"), Err(Error::InvalidDistribution(_))));
    }

    #[test]
    fn write_then_parse_is_identity() {
        let d = parse_spec(EX).unwrap();
        assert_eq!(parse_spec(&write_spec(&d).unwrap()).unwrap(), d);
        let s = MixedDistribution::mixed(
            0.3,
            &[(-0.1, 0.7), (0.2, 0.3)],
            DensitySpec::Sampled(SampledDensity {
                x: vec![-1.0, 0.0, 1.0],
                values: vec![0.0, 1.0, 0.0],
                tail: TailBound::Polynomial { coeff: 1.0, exponent: 3.0 },
            }),
        )
        .unwrap();
        assert_eq!(parse_spec(&write_spec(&s).unwrap()).unwrap(), s);
    }
}
