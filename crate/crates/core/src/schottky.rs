//! Bounded searches around two-generator subgroups: the three-out-of-four
//! flare certificate, periodic-class and invariant-factor witness searches,
//! the stretch-sign experiment and ping-pong containment.

use std::fmt;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

use crate::automorphism::Automorphism;
use crate::currents::{counting_weights, push_forward, NormalizedWeights, RationalCurrent};
use crate::dynamics::{eigencurrent_approx, EigencurrentApprox};
use crate::enumerate::{canonical_cyclic_words, canonical_cyclic_words_of_length, conjugacy_class_count};
use crate::error::{Error, Result};
use crate::intersection::{classify_neighborhood, HeightContext, NeighborhoodClass};
use crate::whitehead::is_primitive;
use crate::word::{cyclic_canonical, CyclicWord, Letter, Word};

/// An automorphism together with its display name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Named {
    pub name: String,
    pub automorphism: Automorphism,
}

impl Named {
    pub fn new(name: impl Into<String>, automorphism: Automorphism) -> Named {
        Named {
            name: name.into(),
            automorphism,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthStats {
    pub length: usize,
    pub words: u64,
    pub worst_count: u8,
    /// `by_count[c]` words have exactly `c` doubling maps.
    pub by_count: [u64; 5],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlareCertificate {
    pub phi: Named,
    pub psi: Named,
    pub n: u32,
    pub m: u32,
    pub radius: usize,
    pub words_checked: u64,
    pub worst_word: CyclicWord,
    pub worst_count: u8,
    pub pass: bool,
    pub histogram: Vec<LengthStats>,
}

/// The four maps `φ^n, ψ^m, φ^-n, ψ^-m`, in that order.
fn flare_maps(phi: &Automorphism, psi: &Automorphism, n: u32, m: u32) -> [Automorphism; 4] {
    [
        phi.pow(n as i64),
        psi.pow(m as i64),
        phi.pow(-(n as i64)),
        psi.pow(-(m as i64)),
    ]
}

/// How many of the maps at least double the cyclic length of `w`.
pub fn doubling_count(maps: &[Automorphism], w: &CyclicWord) -> u8 {
    maps.iter()
        .filter(|a| 2 * w.len() <= a.apply_cyclic(w).expect("rank checked").len())
        .count() as u8
}

/// Exhaustive check of the flare condition over the ball of cyclic radius `radius`.
pub fn flare_certify(phi: &Named, psi: &Named, n: u32, m: u32, radius: usize) -> Result<FlareCertificate> {
    if n < 1 || m < 1 {
        return Err(Error::InvalidParameter("exponents must be at least 1".into()));
    }
    if radius < 1 {
        return Err(Error::InvalidParameter("radius must be at least 1".into()));
    }
    let rank = phi.automorphism.rank();
    if psi.automorphism.rank() != rank {
        return Err(Error::RankMismatch {
            expected: rank,
            found: psi.automorphism.rank(),
        });
    }
    let maps = flare_maps(&phi.automorphism, &psi.automorphism, n, m);
    let per_length: Vec<(LengthStats, CyclicWord)> = (1..=radius)
        .into_par_iter()
        .map(|len| {
            let words = canonical_cyclic_words_of_length(rank, len);
            let counts: Vec<u8> = words.par_iter().map(|w| doubling_count(&maps, w)).collect();
            let mut by_count = [0u64; 5];
            counts.iter().for_each(|&c| by_count[c as usize] += 1);
            let (worst_at, &worst_count) = counts
                .iter()
                .enumerate()
                .min_by_key(|&(i, c)| (*c, i))
                .expect("every length has words");
            let stats = LengthStats {
                length: len,
                words: words.len() as u64,
                worst_count,
                by_count,
            };
            (stats, words[worst_at].clone())
        })
        .collect();
    let (worst_stats, worst_word) = per_length
        .iter()
        .min_by_key(|(s, _)| (s.worst_count, s.length))
        .map(|(s, w)| (s.clone(), w.clone()))
        .expect("radius >= 1");
    let histogram: Vec<LengthStats> = per_length.into_iter().map(|(s, _)| s).collect();
    Ok(FlareCertificate {
        phi: phi.clone(),
        psi: psi.clone(),
        n,
        m,
        radius,
        words_checked: histogram.iter().map(|s| s.words).sum(),
        worst_word,
        worst_count: worst_stats.worst_count,
        pass: worst_stats.worst_count >= 3,
        histogram,
    })
}

fn word_list(ws: &[Word]) -> String {
    ws.iter()
        .map(|w| if w.is_identity() { "1".to_string() } else { w.to_string() })
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for FlareCertificate {
    /// Line-oriented `key: value` record; round-trips through [`parse_certificate`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "flare-certificate 1")?;
        writeln!(f, "rank: {}", self.phi.automorphism.rank())?;
        writeln!(f, "phi-name: {}", self.phi.name)?;
        writeln!(f, "phi-images: {}", word_list(self.phi.automorphism.images()))?;
        writeln!(f, "phi-inverse: {}", word_list(self.phi.automorphism.inverse_images()))?;
        writeln!(f, "psi-name: {}", self.psi.name)?;
        writeln!(f, "psi-images: {}", word_list(self.psi.automorphism.images()))?;
        writeln!(f, "psi-inverse: {}", word_list(self.psi.automorphism.inverse_images()))?;
        writeln!(f, "n: {}", self.n)?;
        writeln!(f, "m: {}", self.m)?;
        writeln!(f, "radius: {}", self.radius)?;
        writeln!(f, "words-checked: {}", self.words_checked)?;
        writeln!(f, "worst-word: {}", self.worst_word)?;
        writeln!(f, "worst-count: {}", self.worst_count)?;
        writeln!(f, "pass: {}", self.pass)?;
        writeln!(f, "histogram: length words worst c0 c1 c2 c3 c4")?;
        for s in &self.histogram {
            let c = s.by_count;
            writeln!(
                f,
                "  {} {} {} {} {} {} {} {}",
                s.length, s.words, s.worst_count, c[0], c[1], c[2], c[3], c[4]
            )?;
        }
        Ok(())
    }
}

fn cert_error(reason: impl Into<String>) -> Error {
    Error::Parse {
        literal: "certificate".into(),
        reason: reason.into(),
    }
}

fn field<'a>(lines: &'a [&'a str], key: &str) -> Result<&'a str> {
    let prefix = format!("{key}:");
    lines
        .iter()
        .find_map(|l| l.strip_prefix(prefix.as_str()))
        .map(str::trim)
        .ok_or_else(|| cert_error(format!("missing field {key}")))
}

fn number<T: std::str::FromStr>(lines: &[&str], key: &str) -> Result<T> {
    field(lines, key)?
        .parse()
        .map_err(|_| cert_error(format!("field {key} is not a number")))
}

fn automorphism_field(lines: &[&str], images: &str, inverse: &str) -> Result<Automorphism> {
    let parse = |key: &str| -> Result<Vec<Word>> { field(lines, key)?.split_whitespace().map(str::parse).collect() };
    Automorphism::new(parse(images)?, parse(inverse)?)
}

pub fn parse_certificate(text: &str) -> Result<FlareCertificate> {
    let lines: Vec<&str> = text.lines().collect();
    if lines.first().map(|l| l.trim()) != Some("flare-certificate 1") {
        return Err(cert_error("missing header line"));
    }
    let phi = Named::new(field(&lines, "phi-name")?, automorphism_field(&lines, "phi-images", "phi-inverse")?);
    let psi = Named::new(field(&lines, "psi-name")?, automorphism_field(&lines, "psi-images", "psi-inverse")?);
    let start = lines
        .iter()
        .position(|l| l.starts_with("histogram:"))
        .ok_or_else(|| cert_error("missing histogram"))?;
    let mut histogram = Vec::new();
    for line in &lines[start + 1..] {
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<u64> = line
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| cert_error(format!("bad histogram row {line:?}"))))
            .collect::<Result<_>>()?;
        if v.len() != 8 {
            return Err(cert_error(format!("bad histogram row {line:?}")));
        }
        histogram.push(LengthStats {
            length: v[0] as usize,
            words: v[1],
            worst_count: v[2] as u8,
            by_count: [v[3], v[4], v[5], v[6], v[7]],
        });
    }
    let pass = match field(&lines, "pass")? {
        "true" => true,
        "false" => false,
        other => return Err(cert_error(format!("bad pass value {other:?}"))),
    };
    Ok(FlareCertificate {
        phi,
        psi,
        n: number(&lines, "n")?,
        m: number(&lines, "m")?,
        radius: number(&lines, "radius")?,
        words_checked: number(&lines, "words-checked")?,
        worst_word: CyclicWord::new(&field(&lines, "worst-word")?.parse()?),
        worst_count: number(&lines, "worst-count")?,
        pass,
        histogram,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateCheck {
    pub sampled: usize,
    pub problems: Vec<String>,
}

impl CertificateCheck {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Re-checks a certificate: the closed-form word count, the worst word, and a
/// random sample of about one percent of the ball (at least one word).
pub fn verify_certificate<R: Rng>(cert: &FlareCertificate, rng: &mut R) -> Result<CertificateCheck> {
    let rank = cert.phi.automorphism.rank();
    let mut problems = Vec::new();
    let expected: u128 = (1..=cert.radius).map(|l| conjugacy_class_count(rank, l)).sum();
    if expected != cert.words_checked as u128 {
        problems.push(format!("words-checked {} but the ball holds {expected}", cert.words_checked));
    }
    if cert.pass != (cert.worst_count >= 3) {
        problems.push("pass flag disagrees with worst-count".into());
    }
    let maps = flare_maps(&cert.phi.automorphism, &cert.psi.automorphism, cert.n, cert.m);
    let worst = doubling_count(&maps, &cert.worst_word);
    if worst != cert.worst_count {
        problems.push(format!("worst word {} has count {worst}, recorded {}", cert.worst_word, cert.worst_count));
    }
    let ball = canonical_cyclic_words(rank, 1, cert.radius);
    let k = ball.len().div_ceil(100).max(1).min(ball.len());
    let mut picks = sample(rng, ball.len(), k).into_vec();
    picks.sort_unstable();
    for &i in &picks {
        let c = doubling_count(&maps, &ball[i]);
        if c < cert.worst_count {
            problems.push(format!("word {} has count {c}, below the recorded minimum", ball[i]));
        }
    }
    Ok(CertificateCheck {
        sampled: picks.len(),
        problems,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WitnessKind {
    Toroidal,
    Rank1Invariant,
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessKind::Toroidal => "toroidal",
            WitnessKind::Rank1Invariant => "rank1-invariant",
        })
    }
}

/// `Φ^power(word) = conjugator · word^{±1} · conjugator^-1`, with the sign
/// negative when `inverted`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub power: usize,
    pub word: CyclicWord,
    pub conjugator: Word,
    pub inverted: bool,
}

impl Witness {
    /// Recomputes `Φ^power(word)` and checks the recorded conjugation exactly.
    pub fn replay(&self, phi: &Automorphism) -> Result<bool> {
        let w = self.word.as_word();
        let image = phi.pow(self.power as i64).apply(&w)?;
        let target = if self.inverted { w.inverse() } else { w };
        Ok(image == self.conjugator.mul(&target).mul(&self.conjugator.inverse()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Witness),
    NoneFound { max_power: usize, radius: usize },
}

impl SearchOutcome {
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            SearchOutcome::Found(w) => Some(w),
            SearchOutcome::NoneFound { .. } => None,
        }
    }
}

/// Smallest `k <= max_power` with `Φ^k(w)` conjugate to `w` (or `w^-1` when
/// `allow_inverse`), with the conjugator.
fn first_periodic_power(
    phi: &Automorphism,
    w: &CyclicWord,
    max_power: usize,
    allow_inverse: bool,
) -> Option<(usize, Word, bool)> {
    let start = w.as_word();
    let inverse = w.inverse();
    let mut image = start.clone();
    for k in 1..=max_power {
        image = phi.apply(&image).expect("rank checked");
        let (class, u) = cyclic_canonical(&image);
        if &class == w {
            return Some((k, u, false));
        }
        if allow_inverse && class == inverse {
            // image = u · c · u^-1 where c is the canonical rotation of w^-1 = x^-1 · w^-1 · x
            let (_, x) = cyclic_canonical(&start.inverse());
            return Some((k, u.mul(&x.inverse()), true));
        }
    }
    None
}

fn search(
    phi: &Automorphism,
    words: Vec<CyclicWord>,
    max_power: usize,
    radius: usize,
    kind: WitnessKind,
) -> SearchOutcome {
    let allow_inverse = kind == WitnessKind::Rank1Invariant;
    let found = words
        .par_iter()
        .enumerate()
        .filter_map(|(i, w)| first_periodic_power(phi, w, max_power, allow_inverse).map(|(k, u, inv)| (k, i, u, inv)))
        .min_by_key(|(k, i, _, _)| (*k, *i));
    match found {
        Some((power, i, conjugator, inverted)) => SearchOutcome::Found(Witness {
            kind,
            power,
            word: words[i].clone(),
            conjugator,
            inverted,
        }),
        None => SearchOutcome::NoneFound { max_power, radius },
    }
}

/// First `(k, w)` in (power, word) order with `Φ^k(w)` conjugate to `w`.
pub fn atoroidal_search(phi: &Automorphism, max_power: usize, radius: usize) -> Result<SearchOutcome> {
    if max_power < 1 || radius < 1 {
        return Err(Error::InvalidParameter("power and radius bounds must be at least 1".into()));
    }
    let words = canonical_cyclic_words(phi.rank(), 1, radius);
    Ok(search(phi, words, max_power, radius, WitnessKind::Toroidal))
}

/// Primitive classes fixed up to inversion by some `Φ^k`, `k <= max_power`.
pub fn rank1_invariant_factor_search(phi: &Automorphism, max_power: usize, radius: usize) -> Result<SearchOutcome> {
    if max_power < 1 {
        return Err(Error::InvalidParameter("power bound must be at least 1".into()));
    }
    let rank = phi.rank();
    let words: Vec<CyclicWord> = canonical_cyclic_words(rank, 1, radius)
        .into_par_iter()
        .filter(|w| is_primitive(&w.as_word(), rank).unwrap_or(false))
        .collect();
    Ok(search(phi, words, max_power, radius, WitnessKind::Rank1Invariant))
}

/// `W = φ^m ∘ w' ∘ φ^n`, reading `a`, `b` in `w'` as `φ`, `ψ`.
pub fn pair_word_automorphism(phi: &Automorphism, psi: &Automorphism, m: u32, pair_word: &Word, n: u32) -> Result<Automorphism> {
    if m < 1 || n < 1 {
        return Err(Error::InvalidParameter("exponents must be at least 1".into()));
    }
    if psi.rank() != phi.rank() {
        return Err(Error::RankMismatch {
            expected: phi.rank(),
            found: psi.rank(),
        });
    }
    if pair_word.max_generator() > 2 {
        return Err(Error::MalformedPairWord(pair_word.clone()));
    }
    let phi_inverse = Letter::new(1, true);
    let letters = pair_word.letters();
    if letters.first() == Some(&phi_inverse) || letters.last() == Some(&phi_inverse) {
        return Err(Error::MalformedPairWord(pair_word.clone()));
    }
    let mut total = phi.pow(m as i64);
    for x in letters {
        let base = if x.generator() == 1 { phi } else { psi };
        let step = if x.is_inverse() { base.inverse() } else { base.clone() };
        total = total.compose(&step)?;
    }
    let total = total.compose(&phi.pow(n as i64))?;
    if total.is_identity() {
        return Err(Error::InvalidParameter("the composed automorphism is the identity".into()));
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StretchSignReport {
    pub composed: Automorphism,
    pub eigencurrent: EigencurrentApprox,
    pub lambda_estimate: f64,
    pub side: NeighborhoodClass,
    pub passed: bool,
}

pub struct StretchSignParams {
    pub max_len: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub depth: usize,
}

pub fn stretch_sign_experiment(
    phi: &Automorphism,
    psi: &Automorphism,
    m: u32,
    n: u32,
    pair_word: &Word,
    params: &StretchSignParams,
) -> Result<StretchSignReport> {
    let composed = pair_word_automorphism(phi, psi, m, pair_word, n)?;
    let eigencurrent = eigencurrent_approx(&composed, params.max_len, params.tol, params.max_iter)?;
    let ctx = HeightContext::for_automorphism(phi, params.depth)?;
    let side = classify_neighborhood(&ctx, &eigencurrent.approximant)?;
    let lambda_estimate = eigencurrent.lambda_estimate;
    Ok(StretchSignReport {
        composed,
        lambda_estimate,
        side,
        passed: lambda_estimate > 1.0,
        eigencurrent,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    North,
    South,
    East,
    West,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::North => "N",
            Region::South => "S",
            Region::East => "E",
            Region::West => "W",
        })
    }
}

pub const REGIONS: [Region; 4] = [Region::North, Region::South, Region::East, Region::West];

/// δ-balls around the attracting currents of `φ, φ^-1, ψ, ψ^-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Geography {
    pub max_len: usize,
    pub delta: f64,
    pub centers: [NormalizedWeights; 4],
    pub converged: [bool; 4],
    pub min_distance: f64,
}

impl Geography {
    pub fn new(
        phi: &Automorphism,
        psi: &Automorphism,
        max_len: usize,
        delta: Option<f64>,
        tol: f64,
        max_iter: usize,
    ) -> Result<Geography> {
        let sources = [phi.clone(), phi.inverse(), psi.clone(), psi.inverse()];
        let approx: Vec<EigencurrentApprox> = sources
            .par_iter()
            .map(|a| eigencurrent_approx(a, max_len, tol, max_iter))
            .collect::<Result<_>>()?;
        let centers: [NormalizedWeights; 4] = std::array::from_fn(|i| approx[i].weights.clone());
        let converged: [bool; 4] = std::array::from_fn(|i| approx[i].converged);
        let mut min_distance = f64::INFINITY;
        for i in 0..4 {
            for j in i + 1..4 {
                min_distance = min_distance.min(centers[i].distance(&centers[j]));
            }
        }
        let delta = delta.unwrap_or(min_distance / 4.0);
        if !(delta > 0.0) || min_distance < 4.0 * delta {
            return Err(Error::GeographyUndefined { min_distance, delta });
        }
        Ok(Geography {
            max_len,
            delta,
            centers,
            converged,
            min_distance,
        })
    }

    pub fn center(&self, r: Region) -> &NormalizedWeights {
        &self.centers[r as usize]
    }

    /// The region whose open δ-ball contains `x`, if any.
    pub fn locate(&self, x: &NormalizedWeights) -> Option<Region> {
        REGIONS.into_iter().find(|&r| x.distance(self.center(r)) < self.delta)
    }
}

/// One seed pushed by one map. `checked` is false when the seed starts in
/// the map's repelling ball, where nothing is required.
#[derive(Debug, Clone, PartialEq)]
pub struct PingPongCheck {
    pub seed: usize,
    pub map: Region,
    pub checked: bool,
    pub landed: Option<Region>,
    pub distance: f64,
}

impl PingPongCheck {
    pub fn is_violation(&self, delta: f64) -> bool {
        self.checked && self.distance >= delta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PingPongReport {
    pub delta: f64,
    pub checks: Vec<PingPongCheck>,
}

impl PingPongReport {
    pub fn violations(&self) -> Vec<&PingPongCheck> {
        self.checks.iter().filter(|c| c.is_violation(self.delta)).collect()
    }

    pub fn passed(&self) -> bool {
        self.violations().is_empty()
    }
}

/// The ball a map must avoid as a source: `φ^n` may send anything outside `S` into `N`.
fn repeller(r: Region) -> Region {
    match r {
        Region::North => Region::South,
        Region::South => Region::North,
        Region::East => Region::West,
        Region::West => Region::East,
    }
}

/// For each seed and each of `φ^n, φ^-n, ψ^m, ψ^-m` (targets N, S, E, W):
/// seeds outside the map's repelling ball must land in its target ball after
/// `steps` applications.
pub fn ping_pong_containment(
    geography: &Geography,
    phi: &Automorphism,
    psi: &Automorphism,
    n: u32,
    m: u32,
    seeds: &[RationalCurrent],
    steps: usize,
) -> Result<PingPongReport> {
    let maps = [phi.pow(n as i64), phi.pow(-(n as i64)), psi.pow(m as i64), psi.pow(-(m as i64))];
    let per_seed: Vec<Vec<PingPongCheck>> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, seed)| -> Result<Vec<PingPongCheck>> {
            let here = counting_weights(seed, geography.max_len)?.normalized()?;
            let mut out = Vec::with_capacity(4);
            for (target, map) in REGIONS.into_iter().zip(&maps) {
                let mut check = PingPongCheck {
                    seed: i,
                    map: target,
                    checked: false,
                    landed: None,
                    distance: f64::NAN,
                };
                if here.distance(geography.center(repeller(target))) >= geography.delta {
                    let mut mu = seed.clone();
                    for _ in 0..steps {
                        mu = push_forward(map, &mu)?;
                    }
                    let image = counting_weights(&mu, geography.max_len)?.normalized()?;
                    check.checked = true;
                    check.distance = image.distance(geography.center(target));
                    check.landed = geography.locate(&image);
                }
                out.push(check);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(PingPongReport {
        delta: geography.delta,
        checks: per_seed.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn fib() -> Automorphism {
        Automorphism::parse(&["ab", "a"], &["b", "Ba"]).unwrap()
    }

    fn tribo() -> Automorphism {
        Automorphism::parse(&["b", "c", "ab"], &["cA", "a", "b"]).unwrap()
    }

    fn tribo_conjugate() -> Automorphism {
        Automorphism::parse(&["bc", "c", "a"], &["c", "aB", "b"]).unwrap()
    }

    fn swap() -> Automorphism {
        Automorphism::parse(&["b", "a"], &["b", "a"]).unwrap()
    }

    #[test]
    fn conjugate_pair_is_the_rotated_anchor() {
        let sigma = Automorphism::parse(&["b", "c", "a"], &["c", "a", "b"]).unwrap();
        let expected = sigma.compose(&tribo()).unwrap().compose(&sigma.inverse()).unwrap();
        assert_eq!(expected, tribo_conjugate());
    }

    #[test]
    fn identity_fails_flare() {
        let id = Named::new("id", Automorphism::identity(2));
        let cert = flare_certify(&id, &id, 3, 2, 1).unwrap();
        assert!(!cert.pass);
        assert_eq!(cert.worst_count, 0);
        assert_eq!(cert.words_checked, 4);
        assert!(flare_certify(&id, &id, 0, 1, 1).is_err());
        assert!(flare_certify(&id, &id, 1, 1, 0).is_err());
    }

    #[test]
    fn flare_counts_match_direct_evaluation() {
        let phi = Named::new("phi", tribo());
        let psi = Named::new("psi", tribo_conjugate());
        let cert = flare_certify(&phi, &psi, 2, 2, 4).unwrap();
        let expected: u128 = (1..=4).map(|l| conjugacy_class_count(3, l)).sum();
        assert_eq!(cert.words_checked as u128, expected);
        // oracle: raw iteration of each word, cyclic length by reduction
        let maps = [tribo(), tribo_conjugate(), tribo().inverse(), tribo_conjugate().inverse()];
        let mut worst = 4;
        for c in canonical_cyclic_words(3, 1, 4) {
            let mut count = 0;
            for a in &maps {
                let image = a.apply(&a.apply(&c.as_word()).unwrap()).unwrap();
                if 2 * c.len() <= image.cyclic_len() {
                    count += 1;
                }
            }
            worst = worst.min(count);
        }
        assert_eq!(cert.worst_count, worst);
        assert_eq!(doubling_count(&flare_maps(&tribo(), &tribo_conjugate(), 2, 2), &cert.worst_word), worst);
    }

    #[test]
    fn flare_is_deterministic_and_round_trips() {
        let phi = Named::new("phi", tribo());
        let psi = Named::new("psi", tribo_conjugate());
        let a = flare_certify(&phi, &psi, 3, 3, 4).unwrap().to_string();
        let b = flare_certify(&phi, &psi, 3, 3, 4).unwrap().to_string();
        assert_eq!(a, b);
        let parsed = parse_certificate(&a).unwrap();
        assert_eq!(parsed.to_string(), a);
        let check = verify_certificate(&parsed, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert!(check.passed(), "{:?}", check.problems);
        assert!(check.sampled >= 1);
    }

    #[test]
    fn tampered_certificate_is_caught() {
        let phi = Named::new("phi", tribo());
        let psi = Named::new("psi", tribo_conjugate());
        let mut cert = flare_certify(&phi, &psi, 2, 2, 3).unwrap();
        cert.worst_count += 1;
        cert.words_checked += 1;
        let check = verify_certificate(&cert, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(check.problems.len() >= 2);
    }

    #[test]
    fn worst_count_grows_with_exponents() {
        let phi = Named::new("phi", tribo());
        let psi = Named::new("psi", tribo_conjugate());
        let mut last = 0;
        for k in 1..=5 {
            let cert = flare_certify(&phi, &psi, k, k, 4).unwrap();
            assert!(cert.worst_count >= last, "k = {k}");
            last = cert.worst_count;
        }
    }

    #[test]
    fn sub_balls_inherit_a_pass() {
        let phi = Named::new("phi", tribo());
        let psi = Named::new("psi", tribo_conjugate());
        for k in 1..=8 {
            let cert = flare_certify(&phi, &psi, k, k, 4).unwrap();
            if cert.pass {
                for r in 1..4 {
                    assert!(flare_certify(&phi, &psi, k, k, r).unwrap().pass);
                }
            }
        }
    }

    #[test]
    fn fibonacci_commutator_witness() {
        let outcome = atoroidal_search(&fib(), 2, 4).unwrap();
        let witness = outcome.witness().expect("witness");
        assert_eq!(witness.kind, WitnessKind::Toroidal);
        assert_eq!(witness.power, 2);
        assert_eq!(witness.word.to_string(), "abAB");
        assert!(witness.replay(&fib()).unwrap());
        // Φ([a,b]) is cyclically [b,a] = [a,b]^-1, so k = 1 is not a witness
        let once = fib().apply(&w("abAB")).unwrap();
        assert_eq!(CyclicWord::new(&once), CyclicWord::new(&w("baBA")));
    }

    #[test]
    fn identity_and_anchor_searches() {
        let outcome = atoroidal_search(&Automorphism::identity(2), 1, 1).unwrap();
        let witness = outcome.witness().unwrap();
        assert_eq!((witness.power, witness.word.to_string()), (1, "a".to_string()));
        assert!(witness.replay(&Automorphism::identity(2)).unwrap());
        assert_eq!(
            atoroidal_search(&tribo(), 6, 6).unwrap(),
            SearchOutcome::NoneFound { max_power: 6, radius: 6 }
        );
    }

    #[test]
    fn rank1_examples() {
        let outcome = rank1_invariant_factor_search(&swap(), 2, 1).unwrap();
        let witness = outcome.witness().unwrap();
        assert_eq!((witness.power, witness.word.to_string()), (2, "a".to_string()));
        assert!(witness.replay(&swap()).unwrap());
        assert_eq!(
            rank1_invariant_factor_search(&fib(), 4, 4).unwrap(),
            SearchOutcome::NoneFound { max_power: 4, radius: 4 }
        );
        assert_eq!(
            rank1_invariant_factor_search(&fib(), 4, 0).unwrap(),
            SearchOutcome::NoneFound { max_power: 4, radius: 0 }
        );
    }

    #[test]
    fn inverted_witnesses_replay() {
        // a -> A, b -> b fixes the class of a up to inversion at k = 1
        let flip = Automorphism::signed_permutation(&[0, 1], &[true, false]).unwrap();
        let witness = rank1_invariant_factor_search(&flip, 1, 1).unwrap().witness().cloned().unwrap();
        assert_eq!(witness.power, 1);
        assert_eq!(witness.word.to_string(), "a");
        assert!(witness.inverted);
        assert!(witness.replay(&flip).unwrap());
        // conjugated inversion: b -> a B A fixes b's class up to inversion
        let phi = Automorphism::parse(&["a", "aBA"], &["a", "ABa"]).unwrap();
        let witness = rank1_invariant_factor_search(&phi, 1, 1).unwrap().witness().cloned().unwrap();
        assert!(witness.replay(&phi).unwrap());
    }

    #[test]
    fn pair_word_rules() {
        assert!(matches!(
            pair_word_automorphism(&fib(), &fib(), 1, &w("Ab"), 1),
            Err(Error::MalformedPairWord(_))
        ));
        assert!(matches!(
            pair_word_automorphism(&fib(), &fib(), 1, &w("bA"), 1),
            Err(Error::MalformedPairWord(_))
        ));
        assert!(pair_word_automorphism(&fib(), &fib(), 0, &w(""), 1).is_err());
        assert!(pair_word_automorphism(&fib(), &fib(), 1, &w("c"), 1).is_err());
        // φ ∘ ψ^-1 ∘ φ with ψ = φ^2 is the identity
        let sq = fib().pow(2);
        assert!(pair_word_automorphism(&fib(), &sq, 1, &w("B"), 1).is_err());
        assert!(pair_word_automorphism(&fib(), &tribo(), 2, &w(""), 3).is_err());
        assert_eq!(pair_word_automorphism(&fib(), &swap(), 2, &w(""), 3).unwrap(), fib().pow(5));
    }

    #[test]
    fn stretch_sign_power_law() {
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let params = StretchSignParams {
            max_len: 2,
            tol: 1e-6,
            max_iter: 100,
            depth: 8,
        };
        for (m, n) in [(1, 1), (2, 1), (3, 3)] {
            let r = stretch_sign_experiment(&fib(), &swap(), m, n, &w(""), &params).unwrap();
            let expected = golden.powi((m + n) as i32);
            assert!((r.lambda_estimate / expected - 1.0).abs() < 0.01, "{m} {n}");
            assert!(r.passed);
            assert_eq!(r.side, NeighborhoodClass::UPlus);
        }
    }

    #[test]
    fn ping_pong_examples() {
        let phi = tribo();
        let psi = tribo_conjugate();
        let geo = Geography::new(&phi, &psi, 2, None, 1e-6, 200).unwrap();
        assert!(geo.converged.iter().all(|&c| c));
        assert!(geo.min_distance >= 4.0 * geo.delta);
        // a seed near the attracting current of φ stays in N under φ^n
        let e = eigencurrent_approx(&phi, 2, 1e-6, 200).unwrap();
        assert_eq!(geo.locate(&counting_weights(&e.approximant, 2).unwrap().normalized().unwrap()), Some(Region::North));
        let once = push_forward(&phi.pow(4), &e.approximant).unwrap();
        let image = counting_weights(&once, 2).unwrap().normalized().unwrap();
        assert_eq!(geo.locate(&image), Some(Region::North));

        let seeds: Vec<RationalCurrent> = ["a", "b", "c", "aB"]
            .iter()
            .map(|s| RationalCurrent::counting(3, &w(s)).unwrap())
            .collect();
        let broken = ping_pong_containment(&geo, &Automorphism::identity(3), &psi, 6, 6, &seeds, 1).unwrap();
        assert!(!broken.passed());
        assert!(broken.violations().iter().any(|v| v.map == Region::North));
    }
}
