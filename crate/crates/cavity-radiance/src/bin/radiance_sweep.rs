//! Detuning-sweep command line tool.
//!
//! Composes a sweep from a preset, an optional config file, and flag
//! overrides; runs it in parallel; writes the CSV dataset plus a `.meta`
//! sidecar with windows and run statistics.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver failure (partial
//! results are still flushed), 4 I/O failure.

use cavity_radiance::sweep::{
    emit_csv, parse_with_overrides, run_sweep, CliOverrides, SweepError, PRESET_NAMES,
};
use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "radiance-sweep",
    about = "Sweep a driven two-atom cavity system and tabulate photon statistics",
    after_help = "Precedence: preset < config file < flags. The sidecar <out>.meta lists \
                  detected blockade windows and run statistics."
)]
struct Cli {
    /// Config file (line-oriented `key = value` with [system]/[sweep]/[output] sections)
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Figure-panel parameter bundle
    #[arg(long, value_name = "NAME", value_parser = PRESET_NAMES)]
    preset: Option<String>,

    /// Swept parameter: delta, delta_m, delta_cav, omega_l, phi_z
    #[arg(long, value_name = "AXIS")]
    sweep: Option<String>,

    /// Grid as lo:hi:points, e.g. -40:40:401
    #[arg(long, value_name = "LO:HI:N")]
    range: Option<String>,

    /// Fock cutoff (forces fixed cutoff policy)
    #[arg(long, value_name = "N")]
    ncut: Option<usize>,

    /// Output CSV path
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores)
    #[arg(long, value_name = "N")]
    threads: Option<usize>,

    /// Skip the single-atom reference runs (no radiance witness column)
    #[arg(long)]
    no_r: bool,
}

fn parse_range(text: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(format!("`{text}` is not lo:hi:points"));
    };
    Ok((
        lo.parse().map_err(|_| format!("`{lo}` is not a number"))?,
        hi.parse().map_err(|_| format!("`{hi}` is not a number"))?,
        n.parse().map_err(|_| format!("`{n}` is not a point count"))?,
    ))
}

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_IO: u8 = 4;

fn main() -> ExitCode {
    let cli = Cli::parse();

    let range = match cli.range.as_deref().map(parse_range).transpose() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: bad --range: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let text = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(EXIT_IO);
            }
        },
        None => String::new(),
    };
    let overrides = CliOverrides {
        preset: cli.preset,
        sweep: cli.sweep,
        range,
        ncut: cli.ncut,
        out: cli.out,
        threads: cli.threads,
        no_r: cli.no_r,
    };
    let config = match parse_with_overrides(&text, &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    match run_sweep(&config) {
        Ok(result) => {
            if let Err(e) = emit_csv(&result, &config.output_path) {
                eprintln!("error: writing {}: {e}", config.output_path.display());
                return ExitCode::from(EXIT_IO);
            }
            eprintln!(
                "wrote {} records, {} windows to {} ({}s, Ncut = {})",
                result.records.len(),
                result.windows.len(),
                config.output_path.display(),
                format_args!("{:.1}", result.metadata.wall_time_s),
                result.metadata.ncut_used,
            );
            ExitCode::SUCCESS
        }
        Err(SweepError::Solve { axis, value, message, partial }) => {
            eprintln!("error: solve failed at {axis} = {value}: {message}");
            match emit_csv(&partial, &config.output_path) {
                Ok(()) => eprintln!(
                    "flushed {} completed records to {}",
                    partial.records.len(),
                    config.output_path.display()
                ),
                Err(e) => eprintln!("additionally failed to flush partial results: {e}"),
            }
            ExitCode::from(EXIT_SOLVER)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}
