//! `lopsim`: runs the simulator's experiments and writes JSON or CSV reports.
//!
//! Settings resolve as defaults, then `--config` (a config file or a previous
//! report), then command-line flags. Exit codes: 0 when every checked claim
//! holds, 1 when one is violated, 2 on usage or I/O errors.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use commands::*;
use report::{emit, Format, Status};

#[derive(Debug, Parser)]
#[command(name = "lopsim", version, about = "Postselected linear optics: protocols, bounds and gate search")]
struct Cli {
    /// Base random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Command tolerance (photon-number slack, gate validity, fidelity).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Report path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// JSON config file, or a previous report to re-run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that no mode of a random linear-optics state holds more than one photon on average.
    VerifyTheorem1 {
        /// Random states per configuration.
        #[arg(long)]
        trials: Option<usize>,
        /// Comma-separated `MODESxPHOTONS` pairs, e.g. `2x1,4x2`.
        #[arg(long, value_parser = parse_configs)]
        configs: Option<ConfigList>,
    },
    /// Run both protocols with ideal gates and derive the success-probability bounds.
    ReproduceBounds,
    /// Search for a postselected circuit implementing a gate.
    Optimize {
        #[arg(long)]
        gate: Option<String>,
        #[arg(long)]
        ancilla_modes: Option<usize>,
        #[arg(long)]
        ancilla_photons: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        max_iterations: Option<usize>,
        /// Circuit file to start restart 0 of every outcome from.
        #[arg(long)]
        warm_start: Option<PathBuf>,
        /// Where to write the best circuit.
        #[arg(long)]
        circuit_out: Option<PathBuf>,
    },
    /// Re-verify a serialized circuit against a gate.
    CheckCircuit {
        circuit: Option<PathBuf>,
        #[arg(long)]
        gate: Option<String>,
    },
    /// Apply a mode unitary to a state, optionally postselecting.
    Evolve {
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long)]
        unitary: Option<PathBuf>,
        #[arg(long)]
        pattern: Option<PathBuf>,
    },
    /// Find a layout producing (|1100> + |0011>)/sqrt(2) with one CS.
    EntangledCs {
        #[arg(long)]
        max_before: Option<usize>,
        #[arg(long)]
        max_after: Option<usize>,
    },
}

#[derive(Clone, Debug)]
struct ConfigList(Vec<(usize, usize)>);

fn parse_configs(s: &str) -> Result<ConfigList, String> {
    s.split(',')
        .map(|pair| {
            let (n, k) = pair.trim().split_once('x').ok_or_else(|| format!("expected MODESxPHOTONS, got {pair:?}"))?;
            Ok((n.parse().map_err(|e| format!("{n:?}: {e}"))?, k.parse().map_err(|e| format!("{k:?}: {e}"))?))
        })
        .collect::<Result<_, String>>()
        .map(ConfigList)
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn run(cli: Cli) -> Result<Status, String> {
    let config_path = cli.config.as_deref();
    let report = match cli.command {
        Command::VerifyTheorem1 { trials, configs } => {
            let mut c: Theorem1Config = load_config(config_path)?;
            set(&mut c.seed, cli.seed);
            set(&mut c.tolerance, cli.tol);
            set(&mut c.trials_per_config, trials);
            set(&mut c.configurations, configs.map(|c| c.0));
            verify_theorem1_cmd(&c)?
        }
        Command::ReproduceBounds => {
            let mut c: BoundsConfig = load_config(config_path)?;
            set(&mut c.tolerance, cli.tol);
            reproduce_bounds_cmd(&c)?
        }
        Command::Optimize {
            gate,
            ancilla_modes,
            ancilla_photons,
            restarts,
            max_iterations,
            warm_start,
            circuit_out,
        } => {
            let mut c: OptimizeConfig = load_config(config_path)?;
            set(&mut c.gate, gate);
            set(&mut c.circuit_out, circuit_out);
            set(&mut c.search.seed, cli.seed);
            set(&mut c.search.validity_tolerance, cli.tol);
            set(&mut c.search.n_ancilla_modes, ancilla_modes);
            set(&mut c.search.n_ancilla_photons, ancilla_photons);
            set(&mut c.search.restarts, restarts);
            set(&mut c.search.max_iterations, max_iterations);
            if let Some(path) = warm_start {
                c.search.warm_start = Some(load_circuit(&path)?);
            }
            optimize_cmd(&c)?
        }
        Command::CheckCircuit { circuit, gate } => {
            let mut c: CheckConfig = load_config(config_path)?;
            set(&mut c.circuit, circuit);
            set(&mut c.gate, gate);
            set(&mut c.tolerance, cli.tol);
            check_circuit_cmd(&c)?
        }
        Command::Evolve { state, unitary, pattern } => {
            let mut c: EvolveConfig = load_config(config_path)?;
            set(&mut c.state, state);
            set(&mut c.unitary, unitary);
            if pattern.is_some() {
                c.pattern = pattern;
            }
            evolve_cmd(&c)?
        }
        Command::EntangledCs { max_before, max_after } => {
            let mut c: EntangledConfig = load_config(config_path)?;
            set(&mut c.tolerance, cli.tol);
            set(&mut c.search.max_before, max_before);
            set(&mut c.search.max_after, max_after);
            entangled_cs_cmd(&c)?
        }
    };
    emit(&report.render(cli.format)?, cli.out.as_deref())?;
    if report.status == Status::ClaimViolated {
        eprintln!("lopsim {}: claim violated, see report status and result", report.command);
    }
    Ok(report.status)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::ClaimViolated) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
