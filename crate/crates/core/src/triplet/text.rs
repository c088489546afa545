//! Plain-text triplet files:
//!
//! ```text
//! [gaussian]
//! a = 0e0
//! [drift]
//! gamma0 = 0e0
//! [atoms]
//! 1e0 3.333333333333333e-1
//! [density-grid]
//! x0 = -1e1
//! dx = 1e-2
//! jump = 0e0
//! 3.9e-23
//! [cayley-index]
//! m = 0
//! ```
//!
//! Numbers are written in shortest round-trip exponent form, so a parse of
//! a written triplet is bit-identical.

use std::fmt::Write as _;

use super::{ExtractionDiagnostics, QuasiLevyTriplet};
use crate::error::{Error, Result};

pub fn write_triplet(t: &QuasiLevyTriplet) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "[gaussian]\na = {:e}", t.a);
    let _ = writeln!(s, "[drift]\ngamma0 = {:e}", t.gamma0);
    s.push_str("[atoms]\n");
    for (y, c) in &t.atoms {
        let _ = writeln!(s, "{y:e} {c:e}");
    }
    let _ = writeln!(s, "[density-grid]\nx0 = {:e}\ndx = {:e}\njump = {:e}", t.x0, t.dx, t.jump);
    for v in &t.h {
        let _ = writeln!(s, "{v:e}");
    }
    let _ = writeln!(s, "[cayley-index]\nm = {}", t.m);
    s
}

#[derive(PartialEq, Clone, Copy)]
enum Section {
    None,
    Gaussian,
    Drift,
    Atoms,
    Density,
    Cayley,
}

fn num(line: usize, s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("expected a number, got `{}`", s.trim()),
    })
}

fn key_value<'a>(line: usize, text: &'a str, key: &str) -> Result<&'a str> {
    let (k, v) = text.split_once('=').ok_or_else(|| Error::Parse {
        line,
        message: format!("expected `{key} = value`"),
    })?;
    if k.trim() != key {
        return Err(Error::Parse {
            line,
            message: format!("unknown key `{}` (expected `{key}`)", k.trim()),
        });
    }
    Ok(v)
}

pub fn parse_triplet(text: &str) -> Result<QuasiLevyTriplet> {
    let mut t = QuasiLevyTriplet::zero();
    let mut section = Section::None;
    let mut seen = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if body.starts_with('[') {
            section = match body {
                "[gaussian]" => Section::Gaussian,
                "[drift]" => Section::Drift,
                "[atoms]" => Section::Atoms,
                "[density-grid]" => Section::Density,
                "[cayley-index]" => Section::Cayley,
                other => {
                    return Err(Error::Parse {
                        line,
                        message: format!("unknown section {other}"),
                    })
                }
            };
            if seen.contains(&(section as u8)) {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate section {body}"),
                });
            }
            seen.push(section as u8);
            continue;
        }
        match section {
            Section::None => {
                return Err(Error::Parse {
                    line,
                    message: "content before the first section".into(),
                })
            }
            Section::Gaussian => t.a = num(line, key_value(line, body, "a")?)?,
            Section::Drift => t.gamma0 = num(line, key_value(line, body, "gamma0")?)?,
            Section::Cayley => {
                let v = key_value(line, body, "m")?.trim();
                t.m = v.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("cayley index must be an integer, got `{v}`"),
                })?;
            }
            Section::Atoms => {
                let mut it = body.split_whitespace();
                let (Some(y), Some(c), None) = (it.next(), it.next(), it.next()) else {
                    return Err(Error::Parse {
                        line,
                        message: "atom rows are `location coefficient`".into(),
                    });
                };
                t.atoms.push((num(line, y)?, num(line, c)?));
            }
            Section::Density => {
                if body.contains('=') {
                    let (k, v) = body.split_once('=').unwrap();
                    match k.trim() {
                        "x0" => t.x0 = num(line, v)?,
                        "dx" => t.dx = num(line, v)?,
                        "jump" => t.jump = num(line, v)?,
                        other => {
                            return Err(Error::Parse {
                                line,
                                message: format!("unknown key `{other}` in [density-grid]"),
                            })
                        }
                    }
                } else {
                    t.h.push(num(line, body)?);
                }
            }
        }
    }
    let issues = t.issues();
    if !issues.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: issues.join("; "),
        });
    }
    t.diagnostics = ExtractionDiagnostics::default();
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let t = QuasiLevyTriplet {
            gamma0: 0.1 + 0.2,
            atoms: vec![(-1.0, -1e-300), (1.0, 1.0 / 3.0), (2.5, f64::MIN_POSITIVE)],
            x0: -std::f64::consts::PI,
            dx: 0.1,
            h: vec![1.0 / 7.0, -2.0e-17, 0.0],
            jump: -2.0,
            m: -2,
            ..QuasiLevyTriplet::zero()
        };
        let back = parse_triplet(&write_triplet(&t)).unwrap();
        assert_eq!(back, t);
        assert_eq!(parse_triplet(&write_triplet(&QuasiLevyTriplet::zero())).unwrap(), QuasiLevyTriplet::zero());
    }

    #[test]
    fn parse_errors_carry_lines() {
        let bad = "[drift]\ngamma0 = 1\n[atoms]\n1 2 3\n";
        match parse_triplet(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(parse_triplet("[gaussian]\na = 1\n").is_err());
        assert!(parse_triplet("[cayley-index]\nm = 1.5\n").is_err());
    }
}
