use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rotcav::commands::{run_command, Sweep};
use rotcav::config::RunConfig;

/// Polariton spectra, dark-state censuses, light-induced conical
/// intersections and rotating-frame wavepacket dynamics of atoms and
/// diatomics in a uniformly rotating optical cavity.
///
/// All energies share one unit with hbar = 1; angular velocities are read
/// as the energies hbar*Omega in that unit.
#[derive(Parser)]
#[command(name = "rotcav", version)]
struct Cli {
    /// TOML run configuration
    #[arg(long, global = true, default_value = "rotcav.toml")]
    config: PathBuf,

    /// Directory for the generated CSV/JSON files
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Sweep one parameter: --sweep <omega|g|omega_c> <start:stop:count>
    #[arg(long, global = true, num_args = 2, value_names = ["PARAM", "RANGE"])]
    sweep: Option<Vec<String>>,

    /// Worker threads for scans (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Polariton spectrum: analytic, arrowhead and dense side by side
    Spectrum,
    /// Dark-state census checked against the full-basis dense oracle
    Darkstates,
    /// Adiabatic surfaces over an (r, theta, phi) grid
    Scan,
    /// Locate light-induced conical intersections and their seams
    Lici,
    /// Rotating-frame wavepacket propagation at frozen angles
    Propagate,
    /// Arrowhead-vs-dense eigensolver benchmark
    Bench,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Darkstates => "darkstates",
            Command::Scan => "scan",
            Command::Lici => "lici",
            Command::Propagate => "propagate",
            Command::Bench => "bench",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let sweep = match &cli.sweep {
        None => None,
        Some(args) => match Sweep::parse(&args[0], &args[1]) {
            Ok(s) => Some(s),
            Err(e) => {
                eprintln!("rotcav: {}", e.message());
                return ExitCode::from(e.exit_code() as u8);
            }
        },
    };
    let cfg = match RunConfig::load(&cli.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("rotcav: {e}");
            return ExitCode::from(2);
        }
    };
    match run_command(cli.command.name(), &cfg, &cli.out, sweep.as_ref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rotcav: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
