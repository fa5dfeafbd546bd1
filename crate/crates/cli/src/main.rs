use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use outdyn_cli::{emit, load_config, run_experiment, verify_cert_text, CliError, Kind, Outcome};

#[derive(Parser)]
#[command(name = "outdyn", version, about = "Run free-group automorphism experiments")]
struct Cli {
    /// Experiment definition (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Main CSV output; sidecar files are written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for random currents and certificate sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the kind named in the experiment file.
    Run,
    Validate,
    Orbit,
    Pf,
    TrainTrack,
    Eigencurrent,
    Basin,
    HeightShift,
    TreeNs,
    FlareCert,
    /// Re-check a flare certificate.
    VerifyCert { certificate: PathBuf },
    AtoroidalSearch,
    Rank1Search,
    StretchSign,
    Pingpong,
}

impl Command {
    fn kind(&self) -> Option<Kind> {
        Some(match self {
            Command::Run | Command::VerifyCert { .. } => return None,
            Command::Validate => Kind::Validate,
            Command::Orbit => Kind::Orbit,
            Command::Pf => Kind::Pf,
            Command::TrainTrack => Kind::TrainTrack,
            Command::Eigencurrent => Kind::Eigencurrent,
            Command::Basin => Kind::Basin,
            Command::HeightShift => Kind::HeightShift,
            Command::TreeNs => Kind::TreeNs,
            Command::FlareCert => Kind::FlareCert,
            Command::AtoroidalSearch => Kind::AtoroidalSearch,
            Command::Rank1Search => Kind::Rank1Search,
            Command::StretchSign => Kind::StretchSign,
            Command::Pingpong => Kind::Pingpong,
        })
    }
}

fn execute(cli: &Cli) -> Result<(Outcome, Option<PathBuf>), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Parameter("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Parameter(e.to_string()))?;
    }
    if let Command::VerifyCert { certificate } = &cli.command {
        let text = std::fs::read_to_string(certificate).map_err(|source| CliError::Io {
            path: certificate.clone(),
            source,
        })?;
        return Ok((verify_cert_text(&text, cli.seed.unwrap_or(0))?, cli.out.clone()));
    }
    let path = cli.config.as_deref().ok_or(CliError::Missing("--config"))?;
    let mut cfg = load_config(path)?;
    if let Some(kind) = cli.command.kind() {
        cfg.kind = kind;
    }
    let out = cli.out.clone().or_else(|| cfg.output.clone());
    Ok((run_experiment(&cfg, cli.seed.unwrap_or(cfg.params.seed))?, out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|(outcome, out)| {
        emit(&outcome, out.as_deref())?;
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            eprintln!("{}: {}", if outcome.status.exit_code() == 0 { "pass" } else { "fail" }, outcome.summary);
            ExitCode::from(outcome.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
