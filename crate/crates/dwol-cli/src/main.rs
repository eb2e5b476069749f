//! `dwol` — atom transport in a moving double-well optical lattice.
//!
//! Subcommands: `design`, `groundstate`, `transport`, `sweep`, `verify`.
//! Exit codes: 0 success, 1 numerical/hard failure, 2 usage or config error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dwol_cli::config::{self};
use dwol_cli::report::{
    diagnostics_lines, ensure_dir, snapshot_path, write_coefficients, write_correction_report,
    write_csv_row, write_gnuplot_script, write_trajectory_table, CsvRow, CSV_COLUMNS,
};
use dwol_cli::run;
use dwol_cli::sweep::run_sweep;
use dwol_cli::verify;
use dwol_core::dynamics::dump_wavefield;

#[derive(Parser)]
#[command(name = "dwol", version, about = "Moving double-well optical-lattice transport toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Configuration file (TOML with unit-tagged quantities).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides [output].directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker bound for concurrent runs; overrides the config.
    #[arg(long)]
    threads: Option<usize>,
    /// Seed override for randomized pieces.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Design the trap trajectory and write its artifacts.
    Design(CommonArgs),
    /// Compute the ground state of the static potential.
    Groundstate(CommonArgs),
    /// One full transport run: ground state, propagation, fidelity.
    Transport {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated fractions of t_f at which to dump snapshots.
        #[arg(long, value_delimiter = ',')]
        snapshot_fractions: Vec<f64>,
    },
    /// Run the configured sweep, one worker per point.
    Sweep(CommonArgs),
    /// Run verification suites (hermite, gnkn, order, harmonic, ite, all).
    Verify {
        /// Suite selector.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Randomized draws for the gnkn suite.
        #[arg(long, default_value_t = 20)]
        draws: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            // configuration/usage problems exit 2, numerical failures 1
            let text = format!("{e:#}");
            if text.contains("config")
                || text.contains("unknown")
                || text.contains("usage")
                || text.contains("rejected")
            {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn load_common(
    common: &CommonArgs,
) -> anyhow::Result<(config::RunConfig, config::Resolved, PathBuf)> {
    let mut cfg = config::load(&common.config)?;
    if let Some(t) = common.threads {
        cfg.threads = t;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    let resolved = config::resolve(&cfg)?;
    let out_dir = common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&resolved.out_dir));
    ensure_dir(&out_dir)?;
    Ok((cfg, resolved, out_dir))
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Design(common) => {
            let (_cfg, resolved, out_dir) = load_common(&common)?;
            let design = run::design(&resolved, resolved.method)?;
            for line in diagnostics_lines(&design.diagnostics) {
                eprintln!("{line}");
            }
            write_trajectory_table(
                &out_dir.join("trajectory.dat"),
                &design.final_traj,
                &resolved.header,
            )?;
            write_coefficients(
                &out_dir.join("coefficients.txt"),
                &design.final_traj,
                design.correction.as_ref(),
                &resolved.header,
            )?;
            if let Some(c) = &design.correction {
                write_correction_report(
                    &out_dir.join("correction.txt"),
                    c,
                    &resolved.model,
                    &resolved.header,
                )?;
            }
            println!("wrote trajectory artifacts to {}", out_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Groundstate(common) => {
            let (_cfg, resolved, out_dir) = load_common(&common)?;
            let gs = run::ground_state(&resolved)?;
            dump_wavefield(&gs.state, &out_dir.join("groundstate.wf"))?;
            let mut summary = resolved.header.clone();
            summary.push(format!(
                "ground state: E0 = {:.12e} (= {:.6} E_R), iterations = {}",
                gs.energy,
                gs.energy / resolved.model.e_r,
                gs.iterations
            ));
            std::fs::write(out_dir.join("groundstate.txt"), summary.join("\n") + "\n")?;
            println!("E0 = {:.12e} ({} iterations)", gs.energy, gs.iterations);
            Ok(ExitCode::SUCCESS)
        }
        Command::Transport { common, snapshot_fractions } => {
            let (_cfg, mut resolved, out_dir) = load_common(&common)?;
            if !snapshot_fractions.is_empty() {
                resolved.snapshot_fractions = snapshot_fractions;
            }
            let outcome = run::transport(&resolved, resolved.method)?;
            for line in diagnostics_lines(&outcome.diagnostics) {
                eprintln!("{line}");
            }
            for (fraction, field) in &outcome.snapshots {
                dump_wavefield(field, &snapshot_path(&out_dir, *fraction))?;
            }
            let mut file =
                std::io::BufWriter::new(std::fs::File::create(out_dir.join("transport.csv"))?);
            use std::io::Write;
            for line in &resolved.header {
                writeln!(file, "# {line}")?;
            }
            writeln!(file, "{CSV_COLUMNS}")?;
            let row = CsvRow {
                index: 0,
                variable: "t_f".into(),
                sweep_value: format!("{:.6}", outcome.t_f_over_tx),
                method: outcome.method,
                outcome: Ok(outcome.clone()),
            };
            write_csv_row(&mut file, &row)?;
            println!(
                "fidelity = {:.8} ({} accepted steps, norm drift {:.2e})",
                outcome.fidelity, outcome.stats.accepted, outcome.stats.norm_drift
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep(common) => {
            let (cfg, resolved, out_dir) = load_common(&common)?;
            let csv_path = out_dir.join("sweep.csv");
            let rows = run_sweep(&cfg, &csv_path, &resolved.header, resolved.threads)?;
            let variable = cfg
                .sweep
                .as_ref()
                .map(|s| s.variable.clone())
                .unwrap_or_else(|| "value".into());
            write_gnuplot_script(&out_dir.join("sweep.gp"), "sweep.csv", &variable)?;
            let failures = rows.iter().filter(|r| r.outcome.is_err()).count();
            println!(
                "sweep finished: {} rows ({} failed) -> {}",
                rows.len(),
                failures,
                csv_path.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, seed, draws } => {
            let checks = match verify::run_suite(&suite, seed, draws) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::from(2));
                }
            };
            let mut failed = 0;
            for c in &checks {
                println!("{}", verify::format_check(c));
                if !c.passed {
                    failed += 1;
                }
            }
            println!("verify {}: {} checks, {} failed", suite, checks.len(), failed);
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}
