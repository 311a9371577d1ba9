use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

mod commands;
mod config;

use commands::{exit_code, Context, EXIT_CONFIG, EXIT_NUMERICAL};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "magspace", version, about = "Magnetic Ginzburg-Landau energy experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Coulomb-gauge potential of the configured field.
    Gauge,
    /// Minimize the energy from the configured initial state.
    Minimize,
    /// Random-state suites for the cut-off and Dirichlet bounds.
    Verify,
    /// Run an energy-growth experiment preset.
    Experiment,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Gauge => "gauge",
            Command::Minimize => "minimize",
            Command::Verify => "verify",
            Command::Experiment => "experiment",
        }
    }
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Reduced grids and radii.
    #[arg(long, global = true)]
    quick: bool,
}

#[derive(Serialize)]
struct RunMetadata<'a> {
    subcommand: &'a str,
    version: &'a str,
    threads: usize,
    exit_code: u8,
    unix_time: u64,
}

fn load_config(path: Option<&Path>) -> Result<(RunConfig, PathBuf), String> {
    match path {
        None => Ok((RunConfig::default(), PathBuf::from("."))),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            let cfg = RunConfig::parse(&text).map_err(|e| format!("{}: {e}", p.display()))?;
            let base = p.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
            Ok((cfg, base))
        }
    }
}

fn run(cli: Cli) -> u8 {
    let command = cli.command;
    let c = &cli.common;
    let (config, base) = match load_config(c.config.as_deref()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let config = config.resolve(c.seed, c.quick, command.name());
    if c.threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return EXIT_CONFIG;
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(c.threads).build_global() {
        eprintln!("error: thread pool: {e}");
        return EXIT_NUMERICAL;
    }
    if let Err(e) = fs::create_dir_all(&c.out).and_then(|_| commands::write_echo(&c.out, &config)) {
        eprintln!("error: {}: {e}", c.out.display());
        return EXIT_NUMERICAL;
    }
    let ctx = Context {
        config: &config,
        base: &base,
        out: &c.out,
    };
    let result = match command {
        Command::Gauge => commands::cmd_gauge(&ctx),
        Command::Minimize => commands::cmd_minimize(&ctx),
        Command::Verify => commands::cmd_verify(&ctx),
        Command::Experiment => commands::cmd_experiment(&ctx),
    };
    let code = result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit_code(&e)
    });
    let meta = RunMetadata {
        subcommand: command.name(),
        version: env!("CARGO_PKG_VERSION"),
        threads: c.threads,
        exit_code: code,
        unix_time: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    let text = toml::to_string(&meta).expect("metadata serializes");
    if let Err(e) = fs::write(c.out.join("metadata.toml"), text) {
        eprintln!("error: {e}");
        return EXIT_NUMERICAL;
    }
    code
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    ExitCode::from(run(cli))
}
