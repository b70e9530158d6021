use std::panic;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mslab::commands::{execute, Command};
use mslab::config::ExperimentConfig;
use mslab::{DEFAULT_OUTPUT, OUTPUT_ENV};

/// Numerical checks of level-set concavity for minimal graphs over convex rings.
///
/// Exit status: 0 when every check passes, 2 when a check fails, 1 on a
/// configuration or runtime error.
#[derive(Debug, Parser)]
#[command(name = "mslab", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Catenoid band: closed forms, asymptotics, concavity.
    Catenoid(Common),
    /// Rotationally symmetric ring in any dimension.
    Radial(Common),
    /// Planar ring: solve, then concavity, chordal bound and identities.
    Ring2d(Common),
    /// All acceptance criteria.
    Verify(Common),
    /// Observed orders under grid doubling.
    Convergence(Common),
    /// Brute-force check of the quadratic bound.
    Lemma32(Common),
}

#[derive(Debug, clap::Args)]
struct Common {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config value, e.g. `--set ring2d.n_theta=64`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output root (beats the config and MSLAB_OUT).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Cmd {
    fn split(&self) -> (Command, &Common) {
        match self {
            Cmd::Catenoid(c) => (Command::Catenoid, c),
            Cmd::Radial(c) => (Command::Radial, c),
            Cmd::Ring2d(c) => (Command::Ring2d, c),
            Cmd::Verify(c) => (Command::Verify, c),
            Cmd::Convergence(c) => (Command::Convergence, c),
            Cmd::Lemma32(c) => (Command::Lemma32, c),
        }
    }
}

fn output_root(cli: Option<&Path>, config: &ExperimentConfig) -> PathBuf {
    cli.map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone())
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
}

fn run(cli: Cli) -> i32 {
    let (command, common) = cli.command.split();
    let config = match ExperimentConfig::load(common.config.as_deref(), &common.overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 1;
        }
    };
    let dir = output_root(common.out.as_deref(), &config).join(command.name());
    match execute(command, &config, &dir) {
        Ok(manifest) => {
            for c in &manifest.checks {
                println!("[{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            println!("{} -> {}", command.name(), dir.display());
            manifest.exit_code()
        }
        Err(e) => {
            match e.downcast_ref::<mslab_core::Error>() {
                Some(core) => eprintln!("error: {e:#} [{core:?}]"),
                None => eprintln!("error: {e:#}"),
            }
            1
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    panic::set_hook(Box::new(|info| eprintln!("internal error: {info}")));
    let code = panic::catch_unwind(|| run(cli)).unwrap_or(1);
    ExitCode::from(code as u8)
}
