//! `bkm`: runs Bergman kernel method experiments and writes their tables.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bergman::experiment::{load_config, run_experiment, PRESET_NAMES};
use bergman::Error;
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "bkm", version, about = "Bergman kernel method experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a preset or a config file and write `<name>.csv` and `<name>.txt`.
    Run {
        /// Preset name (see `list-presets`) or path to a config file.
        target: String,
        /// Output directory, created if missing.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Gauss–Legendre points per panel.
        #[arg(long)]
        panel_order: Option<usize>,
        /// Lag of the rate estimators.
        #[arg(long)]
        lag: Option<usize>,
        /// Sample points per boundary arc for the sup error.
        #[arg(long)]
        samples_per_arc: Option<usize>,
    },
    /// Print the built-in preset names.
    ListPresets,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Breakdown { .. } | Error::NonConvergence { .. } | Error::Normalization(_) | Error::Domain { .. } => 2,
        _ => 1,
    }
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' })
        .collect()
}

fn run(
    target: &str,
    out: &Path,
    panel_order: Option<usize>,
    lag: Option<usize>,
    samples_per_arc: Option<usize>,
) -> Result<(), (u8, String)> {
    let fail = |e: Error| (exit_code(&e), e.to_string());
    let mut cfg = load_config(target).map_err(fail)?;
    if let Some(k) = panel_order {
        if k == 0 {
            return Err((1, "--panel-order must be positive".into()));
        }
        cfg.quadrature.order = k;
    }
    if let Some(m) = lag {
        cfg.lag = m;
    }
    if let Some(s) = samples_per_arc {
        if s == 0 {
            return Err((1, "--samples-per-arc must be positive".into()));
        }
        cfg.samples_per_arc = s;
    }
    let output = run_experiment(&cfg).map_err(fail)?;
    std::fs::create_dir_all(out).map_err(|e| (1, format!("cannot create {}: {e}", out.display())))?;
    let stem = file_stem(&cfg.name);
    let text = output.table.to_text();
    for (ext, body) in [("csv", output.table.to_csv()), ("txt", text.clone())] {
        let path = out.join(format!("{stem}.{ext}"));
        std::fs::write(&path, body).map_err(|e| (1, format!("cannot write {}: {e}", path.display())))?;
    }
    print!("{text}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListPresets => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            target,
            out,
            panel_order,
            lag,
            samples_per_arc,
        } => match run(&target, &out, panel_order, lag, samples_per_arc) {
            Ok(()) => ExitCode::SUCCESS,
            Err((code, message)) => {
                eprintln!("error: {message}");
                ExitCode::from(code)
            }
        },
    }
}
