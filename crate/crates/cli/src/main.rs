use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use openxxz_cli::{cmd_classify, cmd_energies, cmd_spectrum, cmd_verify, Format, Report, RunConfig};

#[derive(Parser)]
#[command(name = "openxxz", version, about = "Open spin-s XXZ chain: transfer matrices, identities and Bethe Ansatz tables")]
struct Cli {
    /// Configuration file (defaults to the built-in two-site spin-1 chain)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format: csv or json
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<Format>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the randomized checks
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override a named tolerance (repeatable)
    #[arg(long = "tol", global = true, value_name = "NAME=VAL")]
    tol: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity, property and appendix suites
    Verify {
        /// Only run the appendix identities
        #[arg(long)]
        appendix_only: bool,
    },
    /// Eigenvalues of the rescaled transfer matrix at u0
    Spectrum,
    /// Count levels per sector for each k
    Classify {
        /// Comma-separated k values (default: every k allowed by parity)
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        k: Option<Vec<i64>>,
    },
    /// Spin-1 energies from the Hamiltonian and from the Bethe roots
    Energies,
    /// Same as `verify --appendix-only`
    AppendixCheck,
}

fn parse_format(s: &str) -> Result<Format, String> {
    Format::parse(s).ok_or_else(|| format!("unknown format '{s}' (expected csv or json)"))
}

fn load(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            RunConfig::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(out) = &cli.out {
        cfg.output = Some(out.clone());
    }
    for item in &cli.tol {
        let (name, value) = item.split_once('=').ok_or_else(|| format!("--tol expects NAME=VAL, got '{item}'"))?;
        let value: f64 = value.trim().parse().map_err(|_| format!("--tol {name}: '{value}' is not a number"))?;
        cfg.set_tolerance(name.trim(), value).map_err(|e| format!("--tol: {e}"))?;
    }
    if let Ok(v) = std::env::var("BETHE_MAX_DIM") {
        cfg.max_dim = v
            .trim()
            .parse()
            .ok()
            .filter(|&d: &usize| d > 0)
            .ok_or_else(|| format!("BETHE_MAX_DIM must be a positive integer, got '{v}'"))?;
    }
    Ok(cfg)
}

fn emit(report: &Report, cfg: &RunConfig) -> Result<(), String> {
    for note in &report.notes {
        eprintln!("{note}");
    }
    let text = report.render(cfg.format);
    match &cfg.output {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Verify { appendix_only } => cmd_verify(&cfg, *appendix_only),
        Command::AppendixCheck => cmd_verify(&cfg, true),
        Command::Spectrum => cmd_spectrum(&cfg),
        Command::Classify { k } => cmd_classify(&cfg, k.as_deref()),
        Command::Energies => cmd_energies(&cfg),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&report, &cfg) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
