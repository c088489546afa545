//! Seeded corpus of zero-free lattice distributions, some with a Gaussian
//! or Laplace part.  Member `id` draws from its own ChaCha stream, so any
//! single member can be regenerated without the others.

use std::f64::consts::PI;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{lattice_embed, LatticeDistribution};
use crate::charfn::qid_check;
use crate::error::{Error, Result};
use crate::model::{Atom, DensitySpec, MixedDistribution};
use crate::settings::Settings;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub seed: u64,
    #[serde(default = "default_size")]
    pub size: usize,
    #[serde(default = "default_max_atoms")]
    pub max_atoms: usize,
    /// Atom locations are drawn from `[-span, span]`.
    #[serde(default = "default_span")]
    pub span: i64,
    /// Draws with `min |P|` on the circle at or below this are rejected.
    #[serde(default = "default_margin")]
    pub margin: f64,
    /// Probability that a member gets an absolutely continuous part.
    #[serde(default = "default_ac_fraction")]
    pub ac_fraction: f64,
    /// Mixed members whose `inf |F|` estimate falls inside this band are
    /// redrawn, so their verdict never hinges on the QID tolerance.
    #[serde(default = "default_gray_band")]
    pub gray_band: (f64, f64),
}

fn default_size() -> usize {
    100
}
fn default_max_atoms() -> usize {
    8
}
fn default_span() -> i64 {
    6
}
fn default_margin() -> f64 {
    0.05
}
fn default_ac_fraction() -> f64 {
    0.5
}
fn default_gray_band() -> (f64, f64) {
    (1e-6, 1e-2)
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            seed: 20_240_611,
            size: default_size(),
            max_atoms: default_max_atoms(),
            span: default_span(),
            margin: default_margin(),
            ac_fraction: default_ac_fraction(),
            gray_band: default_gray_band(),
        }
    }
}

impl CorpusSpec {
    pub fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.max_atoms < 1 {
            out.push("max_atoms must be at least 1".into());
        }
        if self.span < 0 || (2 * self.span + 1) < self.max_atoms as i64 {
            out.push(format!("span {} leaves fewer than {} lattice sites", self.span, self.max_atoms));
        }
        if !(self.margin > 0.0 && self.margin < 1.0) {
            out.push(format!("margin {} must lie in (0, 1)", self.margin));
        }
        if !(0.0..=1.0).contains(&self.ac_fraction) {
            out.push(format!("ac_fraction {} must lie in [0, 1]", self.ac_fraction));
        }
        if !(self.gray_band.0 <= self.gray_band.1) {
            out.push("gray_band must be ordered".into());
        }
        out
    }
}

/// Fingerprint of one generated member, kept in a manifest so a rerun can
/// confirm it reproduced the same corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberRecord {
    pub id: usize,
    pub attempts: u32,
    pub indices: Vec<i64>,
    pub masses: Vec<f64>,
    pub p: f64,
    pub density: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub corpus: CorpusSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub members: Vec<MemberRecord>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self> {
        let m: Manifest = toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map_or(0, |s| text[..s.start].lines().count().max(1)),
            message: e.message().to_string(),
        })?;
        let issues = m.corpus.issues();
        if !issues.is_empty() {
            return Err(Error::Input(issues.join("; ")));
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest fields are always representable")
    }

    pub fn of_corpus(corpus: &Corpus) -> Self {
        Self {
            corpus: corpus.spec.clone(),
            members: corpus.members.iter().map(CorpusMember::record).collect(),
        }
    }

    /// Ids whose regenerated fingerprint differs from the recorded one.
    pub fn mismatches(&self, corpus: &Corpus) -> Vec<usize> {
        let fresh: Vec<MemberRecord> = corpus.members.iter().map(CorpusMember::record).collect();
        self.members
            .iter()
            .filter(|r| fresh.get(r.id) != Some(*r))
            .map(|r| r.id)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct CorpusMember {
    pub id: usize,
    pub attempts: u32,
    pub distribution: MixedDistribution,
    pub lattice: LatticeDistribution,
    pub circle_min: f64,
}

impl CorpusMember {
    pub fn has_density(&self) -> bool {
        self.distribution.density.is_some()
    }

    pub fn record(&self) -> MemberRecord {
        MemberRecord {
            id: self.id,
            attempts: self.attempts,
            indices: self.lattice.indices.clone(),
            masses: self.lattice.masses.clone(),
            p: self.distribution.p,
            density: match &self.distribution.density {
                None => "none".into(),
                Some(DensitySpec::Gaussian { mean, variance }) => format!("gaussian {mean:e} {variance:e}"),
                Some(DensitySpec::Laplace { location, scale }) => format!("laplace {location:e} {scale:e}"),
                Some(other) => format!("{other:?}"),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub spec: CorpusSpec,
    pub members: Vec<CorpusMember>,
}

pub const CIRCLE_CHECK_POINTS: usize = 4096;
const MAX_ATTEMPTS: u32 = 10_000;

fn circle_min(ld: &LatticeDistribution) -> f64 {
    (0..CIRCLE_CHECK_POINTS)
        .map(|j| ld.circle(2.0 * PI * j as f64 / CIRCLE_CHECK_POINTS as f64).norm())
        .fold(f64::INFINITY, f64::min)
}

fn member_rng(seed: u64, id: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn draw_lattice(rng: &mut ChaCha8Rng, spec: &CorpusSpec) -> LatticeDistribution {
    let k = rng.random_range(1..=spec.max_atoms);
    let sites = (2 * spec.span + 1) as usize;
    let mut indices: Vec<i64> = sample(rng, sites, k).into_iter().map(|i| i as i64 - spec.span).collect();
    indices.sort_unstable();
    let raw: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    LatticeDistribution {
        n: 1,
        indices,
        masses: raw.iter().map(|x| x / total).collect(),
    }
}

fn draw_density(rng: &mut ChaCha8Rng) -> DensitySpec {
    if rng.random_bool(0.5) {
        DensitySpec::gaussian(rng.random_range(-2.0..2.0), rng.random_range(0.25..2.0))
    } else {
        DensitySpec::laplace(rng.random_range(-2.0..2.0), rng.random_range(0.3..1.5))
    }
}

pub fn generate_member(spec: &CorpusSpec, id: usize, settings: &Settings) -> Result<CorpusMember> {
    let mut rng = member_rng(spec.seed, id);
    for attempt in 1..=MAX_ATTEMPTS {
        let lattice = draw_lattice(&mut rng, spec);
        let min = circle_min(&lattice);
        if min <= spec.margin {
            continue;
        }
        let atoms: Vec<Atom> = lattice
            .indices
            .iter()
            .zip(&lattice.masses)
            .map(|(k, a)| Atom::new(*k as f64, *a))
            .collect();
        let distribution = if rng.random_bool(spec.ac_fraction) {
            let p = rng.random_range(0.5..0.95);
            let d = MixedDistribution::new(p, atoms, Some(draw_density(&mut rng)), Some(1.0))?;
            let eps = qid_check(&d, settings)?.eps_f;
            if eps > spec.gray_band.0 && eps < spec.gray_band.1 {
                continue;
            }
            d
        } else {
            MixedDistribution::new(1.0, atoms, None, Some(1.0))?
        };
        debug_assert_eq!(lattice_embed(&distribution, 1).as_ref().ok(), Some(&lattice));
        return Ok(CorpusMember {
            id,
            attempts: attempt,
            distribution,
            lattice,
            circle_min: min,
        });
    }
    Err(Error::Input(format!(
        "corpus member {id}: no admissible draw in {MAX_ATTEMPTS} attempts"
    )))
}

pub fn generate_corpus(spec: &CorpusSpec) -> Result<Corpus> {
    let issues = spec.issues();
    if !issues.is_empty() {
        return Err(Error::Input(issues.join("; ")));
    }
    let settings = Settings::default();
    let members = (0..spec.size)
        .into_par_iter()
        .map(|id| generate_member(spec, id, &settings))
        .collect::<Result<Vec<_>>>()?;
    Ok(Corpus {
        spec: spec.clone(),
        members,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> CorpusSpec {
        CorpusSpec {
            size: 12,
            ..CorpusSpec::default()
        }
    }

    #[test]
    fn members_respect_the_spec() {
        let c = generate_corpus(&small()).unwrap();
        assert_eq!(c.members.len(), 12);
        for m in &c.members {
            assert!(m.circle_min > 0.05);
            assert!(m.lattice.indices.len() <= 8);
            assert!(m.lattice.indices.iter().all(|k| k.abs() <= 6));
            assert!(m.lattice.indices.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn generation_is_deterministic_per_member() {
        let spec = small();
        let c = generate_corpus(&spec).unwrap();
        let again = generate_member(&spec, 7, &Settings::default()).unwrap();
        assert_eq!(c.members[7].record(), again.record());
        let m = Manifest::of_corpus(&c);
        let back = Manifest::parse(&m.to_toml()).unwrap();
        assert_eq!(back, m);
        assert!(back.mismatches(&c).is_empty());
        let other = generate_corpus(&CorpusSpec { seed: 1, ..spec }).unwrap();
        assert!(!back.mismatches(&other).is_empty());
    }

    #[test]
    fn manifest_defaults_and_errors() {
        let m = Manifest::parse("[corpus]\nseed = 5\n").unwrap();
        assert_eq!(m.corpus.size, 100);
        assert_eq!(m.corpus.margin, 0.05);
        assert!(Manifest::parse("[corpus]\nseed = 5\nmargin = 2.0\n").is_err());
        assert!(matches!(
            Manifest::parse("[corpus]\nseed = 5\nbogus = 1\n"),
            Err(Error::Parse { .. })
        ));
    }
}
