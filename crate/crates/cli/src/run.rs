//! Dispatch from an experiment definition to the library operations.

use outdyn::dynamics::{basin_check, eigencurrent_approx, height_shift_check, tree_convergence_check};
use outdyn::enumerate::reduced_words;
use outdyn::intersection::HeightContext;
use outdyn::metric_trees::{probe_set, TreePoint};
use outdyn::schottky::{
    atoroidal_search, flare_certify, parse_certificate, ping_pong_containment, rank1_invariant_factor_search,
    stretch_sign_experiment, verify_certificate, Geography, Named, SearchOutcome, StretchSignParams,
};
use outdyn::spectra::{growth_rate, DEFAULT_PF_MAX_ITER, is_train_track_on_rose, pf_eigen, transition_matrix};
use outdyn::{CyclicWord, Word};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, Kind};
use crate::output::{fmt_f64, Artifact, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    fn from(pass: bool) -> Status {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }
}

/// What a run produced: a main artifact plus sidecars named by file suffix.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub summary: String,
    pub main: Artifact,
    pub sidecars: Vec<(String, Artifact)>,
}

impl Outcome {
    fn new(status: Status, summary: String, main: Table) -> Outcome {
        Outcome {
            status,
            summary,
            main: Artifact::Csv(main),
            sidecars: Vec::new(),
        }
    }

    fn with(mut self, suffix: &str, artifact: Artifact) -> Outcome {
        self.sidecars.push((suffix.to_string(), artifact));
        self
    }
}

fn word_str(w: &Word) -> String {
    if w.is_identity() {
        "1".into()
    } else {
        w.to_string()
    }
}

fn s<T: ToString>(x: T) -> String {
    x.to_string()
}

pub fn run_experiment(cfg: &ExperimentConfig, seed: u64) -> Result<Outcome, CliError> {
    match cfg.kind {
        Kind::Validate => validate(cfg),
        Kind::Orbit => orbit(cfg),
        Kind::Pf => pf(cfg),
        Kind::TrainTrack => train_track(cfg),
        Kind::Eigencurrent => eigencurrent(cfg),
        Kind::Basin => basin(cfg, seed),
        Kind::HeightShift => height_shift(cfg, seed),
        Kind::TreeNs => tree_ns(cfg),
        Kind::FlareCert => flare(cfg),
        Kind::AtoroidalSearch => witness_search(cfg, false),
        Kind::Rank1Search => witness_search(cfg, true),
        Kind::StretchSign => stretch_sign(cfg),
        Kind::Pingpong => pingpong(cfg, seed),
    }
}

fn validate(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut t = Table::new(["name", "rank", "images", "inverse", "verified"]);
    for (name, phi) in &cfg.automorphisms {
        let join = |ws: &[Word]| ws.iter().map(word_str).collect::<Vec<_>>().join(" ");
        t.push(vec![name.clone(), s(phi.rank()), join(phi.images()), join(phi.inverse_images()), s(true)]);
    }
    let summary = format!("{} automorphism(s) verified", cfg.automorphisms.len());
    Ok(Outcome::new(Status::Pass, summary, t))
}

fn orbit(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let (name, phi) = cfg.phi()?;
    let mut t = Table::new(["seed", "k", "cyclic_length", "growth_ratio"]);
    for w in cfg.seed_words()? {
        let rates = growth_rate(phi, &w, cfg.params.iterations)?;
        let mut c = CyclicWord::new(&w);
        t.push(vec![word_str(&w), s(0), s(c.len()), fmt_f64(f64::NAN)]);
        for (k, r) in rates.ratios.iter().enumerate() {
            c = phi.apply_cyclic(&c)?;
            t.push(vec![word_str(&w), s(k + 1), s(c.len()), fmt_f64(*r)]);
        }
    }
    Ok(Outcome::new(Status::Pass, format!("orbit of {name}: {} rows", t.rows.len()), t))
}

fn pf(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let (name, phi) = cfg.phi()?;
    let m = transition_matrix(phi);
    let n = m.size();
    let mut header: Vec<String> = ["automorphism", "irreducible", "primitive", "components", "lambda", "residual", "iterations"]
        .map(String::from)
        .to_vec();
    header.extend((1..=n).map(|i| format!("v{i}")));
    let mut t = Table::new(header);
    let components = m
        .components()
        .iter()
        .map(|c| c.iter().map(|i| s(i + 1)).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("|");
    match pf_eigen(&m, cfg.params.pf_tol, DEFAULT_PF_MAX_ITER) {
        Ok(d) => {
            let mut row = vec![
                name.to_string(),
                s(true),
                s(d.primitive),
                components,
                fmt_f64(d.lambda),
                fmt_f64(d.residual),
                s(d.iterations),
            ];
            row.extend(d.eigvec.iter().map(|&x| fmt_f64(x)));
            t.push(row);
            let summary = format!("{name}: lambda = {:.10}, residual {:.3e}", d.lambda, d.residual);
            Ok(Outcome::new(Status::Pass, summary, t))
        }
        Err(outdyn::Error::Reducible { .. }) => {
            let mut row = vec![name.to_string(), s(false), s(m.is_primitive()), components.clone()];
            row.extend([fmt_f64(f64::NAN), fmt_f64(f64::NAN), s(0)]);
            row.extend((0..n).map(|_| fmt_f64(f64::NAN)));
            t.push(row);
            Ok(Outcome::new(Status::Fail, format!("{name}: reducible, components {components}"), t))
        }
        Err(e) => Err(e.into()),
    }
}

fn train_track(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let (name, phi) = cfg.phi()?;
    let r = is_train_track_on_rose(phi)?;
    let (turn, generator) = match r.illegal_turn {
        Some((x, y, g)) => (format!("{}{}", Word::from_letters([x]), Word::from_letters([y])), g),
        None => (String::new(), 0),
    };
    let mut t = Table::new(["automorphism", "train_track", "illegal_turn", "generator"]);
    t.push(vec![name.to_string(), s(r.train_track), turn.clone(), s(generator)]);
    let summary = if r.train_track {
        format!("{name}: train track on the rose")
    } else {
        format!("{name}: illegal turn {{{turn}}} in the image of generator {generator}")
    };
    Ok(Outcome::new(Status::from(r.train_track), summary, t))
}

fn eigencurrent(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let (name, phi) = cfg.phi()?;
    let p = &cfg.params;
    let e = eigencurrent_approx(phi, p.max_len, p.tol, p.max_iter)?;
    let mut t = Table::new(["iteration", "lambda_estimate", "distance_to_previous"]);
    for (i, (l, d)) in e.scale_history.iter().zip(&e.distance_history).enumerate() {
        t.push(vec![s(i + 1), fmt_f64(*l), fmt_f64(*d)]);
    }
    let mut weights = Table::new(["word", "weight"]);
    for (w, x) in reduced_words(cfg.rank, p.max_len).iter().zip(&e.weights.values) {
        weights.push(vec![w.to_string(), fmt_f64(*x)]);
    }
    let state = match (e.converged, e.period) {
        (true, _) => "converged".to_string(),
        (false, Some(k)) => format!("cycling with period {k}"),
        (false, None) => "not converged".to_string(),
    };
    let summary = format!(
        "{name}: {state} after {} iterations, lambda estimate {:.10}",
        e.iterations, e.lambda_estimate
    );
    Ok(Outcome::new(Status::from(e.converged), summary, t).with("weights.csv", Artifact::Csv(weights)))
}

fn basin(cfg: &ExperimentConfig, seed: u64) -> Result<Outcome, CliError> {
    let (name, phi) = cfg.phi()?;
    let p = &cfg.params;
    let seeds = cfg.seed_currents(seed)?;
    let currents: Vec<_> = seeds.iter().map(|(_, mu)| mu.clone()).collect();
    let r = basin_check(phi, &currents, p.iterations, p.max_len, p.tol)?;
    let mut t = Table::new(["seed_i", "seed_j", "distance", "within_tol"]);
    for &(i, j, d) in &r.pairwise {
        t.push(vec![seeds[i].0.clone(), seeds[j].0.clone(), fmt_f64(d), s(d < p.tol)]);
    }
    let mut traces = Table::new(["seed", "k", "scale_factor", "distance_to_previous"]);
    for (i, trace) in r.traces.iter().enumerate() {
        for step in &trace.steps {
            traces.push(vec![
                seeds[i].0.clone(),
                s(step.k),
                fmt_f64(step.scale_factor),
                fmt_f64(step.distance_to_previous),
            ]);
        }
    }
    let summary = format!(
        "{name}: {} seeds, max pairwise distance {:.3e} after {} steps, outliers {:?}",
        seeds.len(),
        r.max_distance,
        p.iterations,
        r.outliers.iter().map(|&i| seeds[i].0.as_str()).collect::<Vec<_>>()
    );
    Ok(Outcome::new(Status::from(r.passed), summary, t).with("traces.csv", Artifact::Csv(traces)))
}

fn height_shift(cfg: &ExperimentConfig, seed: u64) -> Result<Outcome, CliError> {
    let (name, phi) = cfg.phi()?;
    let currents = cfg.seed_currents(seed)?;
    let mut t = Table::new(["current_id", "depth", "height_before", "height_after", "shift_residual"]);
    let mut maxima = Vec::new();
    let depths = cfg.params.all_depths();
    let base = HeightContext::for_automorphism(phi, depths[0])?;
    for &d in &depths {
        let ctx = base.with_depth(d)?;
        let r = height_shift_check(&ctx, phi, &currents)?;
        for row in &r.rows {
            t.push(vec![
                row.id.clone(),
                s(row.depth),
                fmt_f64(row.before.to_f64()),
                fmt_f64(row.after.to_f64()),
                fmt_f64(row.residual),
            ]);
        }
        maxima.push((d, r.max_residual, r.mean_residual));
    }
    let mut ordered = maxima.clone();
    ordered.sort_by_key(|m| m.0);
    let decaying = ordered.windows(2).all(|w| w[1].1 <= w[0].1);
    let deepest = ordered.last().expect("at least one depth").1;
    let pass = decaying && deepest < cfg.params.shift_tol;
    let parts: Vec<String> = ordered
        .iter()
        .map(|(d, mx, mean)| format!("depth {d}: max {mx:.3e}, mean {mean:.3e}"))
        .collect();
    let summary = format!("{name}: log stretch sum {:.6}; {}", base.log_stretch_sum(), parts.join("; "));
    Ok(Outcome::new(Status::from(pass), summary, t))
}

fn tree_ns(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let (name, phi) = cfg.phi()?;
    let p = &cfg.params;
    let rose = TreePoint::unit_rose(cfg.rank);
    let start = match cfg.psi.as_ref() {
        Some(_) => rose.act_right(cfg.psi()?.1)?,
        None => rose,
    };
    let probe = probe_set(cfg.rank, p.probe_len);
    let r = tree_convergence_check(phi, &start, p.iterations, &probe, p.tol)?;
    let mut t = Table::new(["k", "distance"]);
    for (k, d) in r.distances.iter().enumerate() {
        t.push(vec![s(k + 1), fmt_f64(*d)]);
    }
    let summary = format!(
        "{name}: final normalized L1 distance {:.3e} on {} probe classes",
        r.final_distance,
        probe.len()
    );
    Ok(Outcome::new(Status::from(r.passed), summary, t))
}

fn flare(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let (phi_name, phi) = cfg.phi()?;
    let (psi_name, psi) = cfg.psi()?;
    let p = &cfg.params;
    let cert = flare_certify(
        &Named::new(phi_name, phi.clone()),
        &Named::new(psi_name, psi.clone()),
        p.n,
        p.m,
        p.radius,
    )?;
    let mut t = Table::new(["length", "words", "worst_count", "c0", "c1", "c2", "c3", "c4"]);
    for h in &cert.histogram {
        let mut row = vec![s(h.length), s(h.words), s(h.worst_count)];
        row.extend(h.by_count.iter().map(s));
        t.push(row);
    }
    let summary = format!(
        "{} words checked, worst count {} at {}: {}",
        cert.words_checked,
        cert.worst_count,
        cert.worst_word,
        if cert.pass { "pass" } else { "fail" }
    );
    Ok(Outcome::new(Status::from(cert.pass), summary, t).with("cert", Artifact::Text(cert.to_string())))
}

fn witness_search(cfg: &ExperimentConfig, rank1: bool) -> Result<Outcome, CliError> {
    let (name, phi) = cfg.phi()?;
    let p = &cfg.params;
    let outcome = if rank1 {
        rank1_invariant_factor_search(phi, p.max_power, p.radius)?
    } else {
        atoroidal_search(phi, p.max_power, p.radius)?
    };
    let mut t = Table::new(["kind", "power", "word", "conjugator", "inverted", "replayed", "K", "R"]);
    let (status, summary) = match &outcome {
        SearchOutcome::Found(w) => {
            let replayed = w.replay(phi)?;
            t.push(vec![
                s(w.kind),
                s(w.power),
                w.word.to_string(),
                word_str(&w.conjugator),
                s(w.inverted),
                s(replayed),
                s(p.max_power),
                s(p.radius),
            ]);
            (Status::Fail, format!("{name}: {} witness {} at power {}", w.kind, w.word, w.power))
        }
        SearchOutcome::NoneFound { max_power, radius } => {
            t.push(vec![
                "none".into(),
                s(0),
                String::new(),
                String::new(),
                s(false),
                s(false),
                s(max_power),
                s(radius),
            ]);
            (Status::Pass, format!("{name}: no witness up to K = {max_power}, R = {radius}"))
        }
    };
    Ok(Outcome::new(status, summary, t))
}

fn stretch_sign(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let (_, phi) = cfg.phi()?;
    let (_, psi) = cfg.psi()?;
    let p = &cfg.params;
    let params = StretchSignParams {
        max_len: p.max_len,
        tol: p.tol,
        max_iter: p.max_iter,
        depth: p.depth,
    };
    let r = stretch_sign_experiment(phi, psi, p.m, p.n, &cfg.pair_word, &params)?;
    let mut t = Table::new(["m", "n", "pair_word", "lambda_estimate", "side", "converged", "passed"]);
    t.push(vec![
        s(p.m),
        s(p.n),
        cfg.pair_word.to_string(),
        fmt_f64(r.lambda_estimate),
        s(r.side),
        s(r.eigencurrent.converged),
        s(r.passed),
    ]);
    let summary = format!("lambda estimate {:.10}, attractor side {}", r.lambda_estimate, r.side);
    Ok(Outcome::new(Status::from(r.passed), summary, t))
}

fn pingpong(cfg: &ExperimentConfig, seed: u64) -> Result<Outcome, CliError> {
    let (_, phi) = cfg.phi()?;
    let (_, psi) = cfg.psi()?;
    let p = &cfg.params;
    let geo = Geography::new(phi, psi, p.max_len, p.delta, p.tol, p.max_iter)?;
    let seeds = cfg.seed_currents(seed)?;
    let currents: Vec<_> = seeds.iter().map(|(_, mu)| mu.clone()).collect();
    let r = ping_pong_containment(&geo, phi, psi, p.n, p.m, &currents, p.steps)?;
    let mut t = Table::new(["seed", "map", "checked", "landed", "distance", "violation"]);
    for c in &r.checks {
        t.push(vec![
            seeds[c.seed].0.clone(),
            s(c.map),
            s(c.checked),
            c.landed.map(s).unwrap_or_default(),
            fmt_f64(c.distance),
            s(c.is_violation(r.delta)),
        ]);
    }
    let checked = r.checks.iter().filter(|c| c.checked).count();
    let summary = format!(
        "delta {:.4e} (min center distance {:.4e}); {} checks, {} violations",
        geo.delta,
        geo.min_distance,
        checked,
        r.violations().len()
    );
    Ok(Outcome::new(Status::from(r.passed()), summary, t))
}

/// Re-checks a certificate file; the sample is drawn from `seed`.
pub fn verify_cert_text(text: &str, seed: u64) -> Result<Outcome, CliError> {
    let cert = parse_certificate(text)?;
    let check = verify_certificate(&cert, &mut ChaCha8Rng::seed_from_u64(seed))?;
    let mut t = Table::new(["words_checked", "worst_count", "sampled", "problems", "verified"]);
    t.push(vec![
        s(cert.words_checked),
        s(cert.worst_count),
        s(check.sampled),
        s(check.problems.len()),
        s(check.passed()),
    ]);
    let summary = if check.passed() {
        format!("certificate verified ({} sampled words plus the worst word)", check.sampled)
    } else {
        format!("certificate rejected: {}", check.problems.join("; "))
    };
    Ok(Outcome::new(Status::from(check.passed()), summary, t))
}
