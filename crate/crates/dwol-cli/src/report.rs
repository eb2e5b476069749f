//! Output files: trajectory tables, coefficient records, correction
//! reports, sweep CSV and the companion gnuplot script.
//!
//! Every file starts with the fully resolved configuration and the code
//! version, so any row can be reproduced from its own header.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Result;

use dwol_core::diag::Diagnostics;
use dwol_core::esta::{knot_positions, EstaCorrection};
use dwol_core::lattice::HarmonicModel;
use dwol_core::sta::{Axis, Trajectory};

use crate::config::Method;
use crate::run::TransportOutcome;

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

pub fn write_comment_header(w: &mut impl Write, header: &[String]) -> Result<()> {
    for line in header {
        writeln!(w, "# {line}")?;
    }
    Ok(())
}

/// Plain-text trajectory table: scaled time, positions, velocities,
/// accelerations for both axes, 257 rows.
pub fn write_trajectory_table(
    path: &Path,
    traj: &Trajectory,
    header: &[String],
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_comment_header(&mut w, header)?;
    writeln!(w, "# columns: s q0_x q0_y dq0_x dq0_y ddq0_x ddq0_y")?;
    let n = 256;
    for k in 0..=n {
        let s = k as f64 / n as f64;
        let t = s * traj.t_f;
        writeln!(
            w,
            "{:.10e} {:.12e} {:.12e} {:.12e} {:.12e} {:.12e} {:.12e}",
            s,
            traj.position(Axis::X, t),
            traj.position(Axis::Y, t),
            traj.velocity(Axis::X, t),
            traj.velocity(Axis::Y, t),
            traj.acceleration(Axis::X, t),
            traj.acceleration(Axis::Y, t),
        )?;
    }
    Ok(())
}

/// Coefficient record: the STA polynomial coefficients per axis plus any
/// correction data.
pub fn write_coefficients(
    path: &Path,
    traj: &Trajectory,
    correction: Option<&EstaCorrection>,
    header: &[String],
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_comment_header(&mut w, header)?;
    for (axis, name) in [(0usize, "x"), (1, "y")] {
        writeln!(w, "axis {name}: q0(s) = sum_k c_k s^k, c_k =")?;
        for (k, c) in traj.sta_polys()[axis].c.iter().enumerate() {
            writeln!(w, "  c[{k}] = {c:.15e}")?;
        }
    }
    if let Some(c) = correction {
        writeln!(w, "correction cutoff N = {}", c.cutoff)?;
        writeln!(w, "knot positions s_j = {:?}", knot_positions())?;
        for (j, (l0, e)) in c.lambda0.0.iter().zip(&c.epsilon.0).enumerate() {
            let axis = if j < 6 { "x" } else { "y" };
            writeln!(
                w,
                "  knot {axis}[{}]: lambda0 = {l0:.12e}, epsilon = {e:.12e}",
                j % 6 + 1
            )?;
        }
    }
    Ok(())
}

/// Correction report: per-mode |G_n|, ‖K_n‖ and the resulting vector.
pub fn write_correction_report(
    path: &Path,
    correction: &EstaCorrection,
    model: &HarmonicModel,
    header: &[String],
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_comment_header(&mut w, header)?;
    writeln!(w, "cutoff N = {}", correction.cutoff)?;
    writeln!(w, "fidelity estimate 1 - sum|G|^2 = {:.10}", correction.fidelity_estimate)?;
    writeln!(w, "mode |G_n| ||K_n||")?;
    for m in &correction.modes {
        let knorm: f64 = m.k.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        writeln!(w, "{} {:.10e} {:.10e}", m.index, m.g.norm(), knorm)?;
    }
    writeln!(w, "epsilon (x knots then y knots, units of l_x = {:.6e}):", model.l[0])?;
    for (j, e) in correction.epsilon.0.iter().enumerate() {
        writeln!(w, "  eps[{j}] = {e:.12e}")?;
    }
    Ok(())
}

pub const CSV_COLUMNS: &str = "index,variable,sweep_value,method,t_f_over_tx,fidelity,fidelity_estimate,ground_energy,ite_iterations,accepted_steps,rejected_steps,norm_drift,wall_ms,diagnostics,status,error";

#[derive(Debug, Clone)]
pub struct CsvRow {
    pub index: usize,
    pub variable: String,
    pub sweep_value: String,
    pub outcome: std::result::Result<TransportOutcome, String>,
    pub method: Method,
}

pub fn write_csv_row(w: &mut impl Write, row: &CsvRow) -> Result<()> {
    match &row.outcome {
        Ok(o) => {
            let est = o
                .fidelity_estimate
                .map(|v| format!("{v:.10}"))
                .unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{:.6},{:.10},{},{:.10e},{},{},{},{:.3e},{},{},ok,",
                row.index,
                row.variable,
                row.sweep_value,
                row.method.as_str(),
                o.t_f_over_tx,
                o.fidelity,
                est,
                o.ground_energy,
                o.ite_iterations,
                o.stats.accepted,
                o.stats.rejected,
                o.stats.norm_drift,
                o.wall_ms,
                o.diagnostics.codes(),
            )?;
        }
        Err(message) => {
            let clean = message.replace([',', '\n'], ";");
            writeln!(
                w,
                "{},{},{},{},,,,,,,,,,,error,{}",
                row.index, row.variable, row.sweep_value, row.method.as_str(), clean
            )?;
        }
    }
    Ok(())
}

/// Companion gnuplot script for a sweep CSV.
pub fn write_gnuplot_script(path: &Path, csv_name: &str, variable: &str) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# gnuplot script for {csv_name}")?;
    writeln!(w, "set datafile separator ','")?;
    writeln!(w, "set key autotitle columnhead")?;
    writeln!(w, "set xlabel '{variable}'")?;
    writeln!(w, "set ylabel 'fidelity'")?;
    writeln!(w, "set yrange [0:1.05]")?;
    writeln!(w, "set grid")?;
    writeln!(
        w,
        "plot '{csv_name}' using 5:($4 eq 'sta' ? $6 : 1/0) with linespoints title 'STA', \\"
    )?;
    writeln!(
        w,
        "     '{csv_name}' using 5:($4 eq 'esta' ? $6 : 1/0) with linespoints title 'eSTA'"
    )?;
    Ok(())
}

pub fn snapshot_path(dir: &Path, fraction: f64) -> PathBuf {
    dir.join(format!("psi_f{fraction:.3}.wf"))
}

pub fn diagnostics_lines(diag: &Diagnostics) -> Vec<String> {
    diag.entries().iter().map(|d| d.to_string()).collect()
}
