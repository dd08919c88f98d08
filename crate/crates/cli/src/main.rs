//! `hardy-ss`: self-similar profiles and regularized evolutions for
//! `u_t = Δu^m + K |x|^{-2} u^p`.

mod config;
mod dto;
mod error;
mod evolve;
mod output;
mod plots;
mod portrait;
mod solve;
mod sweep;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{CommonArgs, NumericArgs, Settings};
use error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "hardy-ss", version, about = "Self-similar profiles for porous-medium equations with a Hardy potential")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    numeric: NumericArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Shoot for the self-similar profile and write it with diagnostics.
    SolveProfile,
    /// Integrate phase-space orbits from seeds or along the computed profile.
    PhasePortrait {
        /// Starting point `X,Y,Z` (repeatable).
        #[arg(long = "seed", value_parser = portrait::parse_seed)]
        seeds: Vec<[f64; 3]>,
        /// Add the orbit of the computed profile.
        #[arg(long)]
        from_profile: bool,
        /// Length of the integration interval in the orbit parameter.
        #[arg(long, default_value_t = 40.0)]
        eta: f64,
    },
    /// Evolve a compactly supported bump for each eps and check ordering and
    /// the supersolution bound.
    EvolvePde {
        /// Profile file (profile.json) for the comparison solution; solved
        /// afresh when absent.
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Also evolve the profile's own data and report the distance to it.
        #[arg(long)]
        track_self_similarity: bool,
        /// Regularization used by the tracking run.
        #[arg(long, default_value_t = 1e-3)]
        track_eps: f64,
    },
    /// Run the invariant suite.
    Verify {
        /// Print the invariant catalog and exit.
        #[arg(long)]
        list: bool,
        /// Check fresh computations for the given parameters.
        #[arg(long, conflicts_with = "from")]
        fresh: bool,
        /// Check the files of an earlier run.
        #[arg(long)]
        from: Option<PathBuf>,
    },
    /// Solve the profile for several triples, each in its own subdirectory.
    Sweep {
        /// Triple `m,p,N` (repeatable).
        #[arg(long = "triple", value_parser = sweep::parse_triple, required = true)]
        triples: Vec<(f64, f64, u32)>,
        /// Worker threads.
        #[arg(long, default_value_t = 4)]
        jobs: usize,
    },
}

fn print(v: &impl serde::Serialize) {
    if let Ok(s) = serde_json::to_string_pretty(v) {
        println!("{s}");
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    let settings = |dir: &str| Settings::resolve(&cli.common, &cli.numeric, dir);
    match &cli.command {
        Command::SolveProfile => print(&solve::run(&settings("hardy-ss-profile")?)?),
        Command::PhasePortrait { seeds, from_profile, eta } => {
            if !(*eta > 0.0) {
                return Err(error::CliError::usage(anyhow::anyhow!("--eta must be positive")));
            }
            print(&portrait::run(&settings("hardy-ss-phase")?, seeds, *from_profile, *eta)?)
        }
        Command::EvolvePde { profile, track_self_similarity, track_eps } => {
            if !(*track_eps > 0.0) {
                return Err(error::CliError::usage(anyhow::anyhow!("--track-eps must be positive")));
            }
            let opts = evolve::EvolveOptions {
                profile: profile.clone(),
                track: track_self_similarity.then_some(*track_eps),
            };
            print(&evolve::run(&settings("hardy-ss-pde")?, &opts)?)
        }
        Command::Verify { list, fresh, from } => {
            if *list {
                print!("{}", verify::catalog_text());
                return Ok(());
            }
            if !*fresh && from.is_none() {
                return Err(error::CliError::usage(anyhow::anyhow!("verify needs --list, --fresh or --from DIR")));
            }
            let report = verify::run(&settings("hardy-ss-verify")?, from.as_deref())?;
            for c in &report.checks {
                println!("{} {:<18} {}", if c.passed { "ok  " } else { "FAIL" }, c.id, c.detail);
            }
            verify::outcome(&report)?;
        }
        Command::Sweep { triples, jobs } => print(&sweep::run(&settings("hardy-ss-sweep")?, triples, *jobs)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
