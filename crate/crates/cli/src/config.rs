//! Experiment definition files.
//!
//! A definition is a TOML document:
//!
//! ```toml
//! rank = 2
//!
//! [automorphisms.phi]
//! images = ["ab", "a"]
//! inverse = ["b", "Ba"]
//!
//! [experiment]
//! kind = "eigencurrent"
//! phi = "phi"
//! output = "out/fib_eigencurrent.csv"
//!
//! [parameters]
//! L = 2
//! tol = 1e-6
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use outdyn::currents::parse_current;
use outdyn::sample::random_current;
use outdyn::{Automorphism, RationalCurrent, Word};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Validate,
    Orbit,
    Pf,
    TrainTrack,
    Eigencurrent,
    Basin,
    HeightShift,
    TreeNs,
    FlareCert,
    AtoroidalSearch,
    Rank1Search,
    StretchSign,
    Pingpong,
}

pub const KINDS: [(Kind, &str); 13] = [
    (Kind::Validate, "validate"),
    (Kind::Orbit, "orbit"),
    (Kind::Pf, "pf"),
    (Kind::TrainTrack, "train-track"),
    (Kind::Eigencurrent, "eigencurrent"),
    (Kind::Basin, "basin"),
    (Kind::HeightShift, "height-shift"),
    (Kind::TreeNs, "tree-ns"),
    (Kind::FlareCert, "flare-cert"),
    (Kind::AtoroidalSearch, "atoroidal-search"),
    (Kind::Rank1Search, "rank1-search"),
    (Kind::StretchSign, "stretch-sign"),
    (Kind::Pingpong, "pingpong"),
];

impl FromStr for Kind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Kind, CliError> {
        KINDS
            .iter()
            .find(|(_, name)| *name == s)
            .map(|(k, _)| *k)
            .ok_or_else(|| CliError::UnknownKind(s.to_string()))
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = KINDS.iter().find(|(k, _)| k == self).map(|(_, n)| *n).unwrap_or("?");
        f.write_str(name)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    rank: usize,
    #[serde(default)]
    automorphisms: BTreeMap<String, RawAutomorphism>,
    experiment: RawExperiment,
    #[serde(default)]
    parameters: Parameters,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAutomorphism {
    images: Vec<String>,
    inverse: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    kind: String,
    phi: Option<String>,
    psi: Option<String>,
    pair_word: Option<String>,
    output: Option<PathBuf>,
}

/// Numeric knobs shared by the experiment kinds; absent keys take defaults.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Parameters {
    pub n: u32,
    pub m: u32,
    #[serde(rename = "R")]
    pub radius: usize,
    #[serde(rename = "K")]
    pub max_power: usize,
    #[serde(rename = "L")]
    pub max_len: usize,
    pub depth: usize,
    /// Extra depths for height-shift; the context is rebuilt at each.
    pub depths: Vec<usize>,
    pub tol: f64,
    pub pf_tol: f64,
    pub shift_tol: f64,
    pub iterations: usize,
    pub max_iter: usize,
    pub probe_len: usize,
    pub steps: usize,
    pub delta: Option<f64>,
    pub seeds: Vec<String>,
    pub random_seeds: usize,
    /// Seed for random currents; `--seed` overrides it.
    pub seed: u64,
}

impl Default for Parameters {
    fn default() -> Parameters {
        Parameters {
            n: 1,
            m: 1,
            radius: 4,
            max_power: 4,
            max_len: 2,
            depth: 8,
            depths: Vec::new(),
            tol: 1e-6,
            pf_tol: outdyn::spectra::DEFAULT_PF_TOL,
            shift_tol: 0.1,
            iterations: 24,
            max_iter: 500,
            probe_len: 3,
            steps: 1,
            delta: None,
            seeds: Vec::new(),
            random_seeds: 0,
            seed: 0,
        }
    }
}

impl Parameters {
    fn check(&self) -> Result<(), CliError> {
        let bad = |what: &str| Err(CliError::Parameter(what.to_string()));
        if self.n < 1 || self.m < 1 {
            return bad("n and m must be at least 1");
        }
        if !(1..=12).contains(&self.radius) {
            return bad("R must lie in 1..=12");
        }
        if !(1..=64).contains(&self.max_power) {
            return bad("K must lie in 1..=64");
        }
        if !(1..=6).contains(&self.max_len) {
            return bad("L must lie in 1..=6");
        }
        if self.depth < 1 || self.depths.contains(&0) {
            return bad("depths must be at least 1");
        }
        if !(self.tol > 0.0) || !(self.pf_tol > 0.0) || !(self.shift_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.iterations < 2 || self.max_iter < 1 {
            return bad("iterations must be at least 2 and max_iter at least 1");
        }
        if !(1..=8).contains(&self.probe_len) {
            return bad("probe_len must lie in 1..=8");
        }
        if self.steps < 1 {
            return bad("steps must be at least 1");
        }
        if let Some(d) = self.delta {
            if !(d > 0.0) {
                return bad("delta must be positive");
            }
        }
        Ok(())
    }

    /// The configured depth followed by any extra depths, deduplicated in order.
    pub fn all_depths(&self) -> Vec<usize> {
        let mut out = vec![self.depth];
        for &d in &self.depths {
            if !out.contains(&d) {
                out.push(d);
            }
        }
        out
    }
}

/// A loaded and verified experiment definition.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub rank: usize,
    pub automorphisms: BTreeMap<String, Automorphism>,
    pub kind: Kind,
    pub phi: Option<String>,
    pub psi: Option<String>,
    pub pair_word: Word,
    pub output: Option<PathBuf>,
    pub params: Parameters,
}

fn parse_words(name: &str, literals: &[String]) -> Result<Vec<Word>, CliError> {
    literals
        .iter()
        .map(|s| {
            s.parse().map_err(|source| CliError::Automorphism {
                name: name.to_string(),
                source,
            })
        })
        .collect()
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Syntax(e.to_string()))?;
    if raw.rank < 2 {
        return Err(CliError::Parameter(format!("rank must be at least 2, got {}", raw.rank)));
    }
    let mut automorphisms = BTreeMap::new();
    for (name, a) in &raw.automorphisms {
        let images = parse_words(name, &a.images)?;
        let inverse = parse_words(name, &a.inverse)?;
        let phi = Automorphism::new(images, inverse).map_err(|source| CliError::Automorphism {
            name: name.clone(),
            source,
        })?;
        if phi.rank() != raw.rank {
            return Err(CliError::Automorphism {
                name: name.clone(),
                source: outdyn::Error::RankMismatch {
                    expected: raw.rank,
                    found: phi.rank(),
                },
            });
        }
        automorphisms.insert(name.clone(), phi);
    }
    for name in [&raw.experiment.phi, &raw.experiment.psi].into_iter().flatten() {
        if !automorphisms.contains_key(name) {
            return Err(CliError::UnknownAutomorphism(name.clone()));
        }
    }
    let pair_word = match &raw.experiment.pair_word {
        Some(s) => s.parse().map_err(CliError::Core)?,
        None => Word::identity(),
    };
    raw.parameters.check()?;
    Ok(ExperimentConfig {
        rank: raw.rank,
        automorphisms,
        kind: raw.experiment.kind.parse()?,
        phi: raw.experiment.phi,
        psi: raw.experiment.psi,
        pair_word,
        output: raw.experiment.output,
        params: raw.parameters,
    })
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

impl ExperimentConfig {
    fn named<'a>(&'a self, which: &'a Option<String>, role: &'static str) -> Result<(&'a str, &'a Automorphism), CliError> {
        let name = which.as_deref().ok_or(CliError::Missing(role))?;
        Ok((name, &self.automorphisms[name]))
    }

    pub fn phi(&self) -> Result<(&str, &Automorphism), CliError> {
        self.named(&self.phi, "experiment.phi")
    }

    pub fn psi(&self) -> Result<(&str, &Automorphism), CliError> {
        self.named(&self.psi, "experiment.psi")
    }

    /// Configured seeds, then `random_seeds` random currents drawn from `seed`.
    ///
    /// A seed literal is either a word (its counting current) or `;`-separated
    /// `coefficient word` terms such as `"2 ab; 1/2 c"`.
    pub fn seed_currents(&self, seed: u64) -> Result<Vec<(String, RationalCurrent)>, CliError> {
        let mut out = Vec::new();
        let literals: Vec<String> = if self.params.seeds.is_empty() && self.params.random_seeds == 0 {
            (1..=self.rank).map(|g| Word::gen(g).to_string()).collect()
        } else {
            self.params.seeds.clone()
        };
        for s in literals {
            let mu = if s.trim().contains(char::is_whitespace) {
                parse_current(self.rank, &s.replace(';', "\n"))
            } else {
                s.trim().parse::<Word>().and_then(|w| RationalCurrent::counting(self.rank, &w))
            }
            .map_err(CliError::Core)?;
            if mu.is_zero() {
                return Err(CliError::Parameter(format!("seed {s:?} is the zero current")));
            }
            out.push((s, mu));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..self.params.random_seeds {
            out.push((format!("random{i}"), random_current(&mut rng, self.rank, 3, 8)));
        }
        Ok(out)
    }

    /// Seeds that must be plain words.
    pub fn seed_words(&self) -> Result<Vec<Word>, CliError> {
        if self.params.seeds.is_empty() {
            return Ok((1..=self.rank).map(Word::gen).collect());
        }
        self.params
            .seeds
            .iter()
            .map(|s| s.trim().parse::<Word>().map_err(CliError::Core))
            .collect()
    }
}
