//! Parameter sweeps: isolated workers per sweep point, ordered incremental
//! CSV output.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::sync::mpsc;
use std::sync::Mutex;

use anyhow::{anyhow, bail, Result};

use crate::config::{resolve, Method, RunConfig};
use crate::report::{write_csv_row, CsvRow, CSV_COLUMNS};
use crate::run::transport;
use crate::units::Quantity;

/// One task of a sweep: the config with the swept value substituted.
#[derive(Clone)]
struct Task {
    index: usize,
    cfg: RunConfig,
    method: Method,
    variable: String,
    display: String,
}

fn substituted(cfg: &RunConfig, variable: &str, value: &Quantity) -> Result<RunConfig> {
    let mut out = cfg.clone();
    let t = out
        .transport
        .as_mut()
        .ok_or_else(|| anyhow!("sweep needs a [transport] block"))?;
    match variable {
        "t_f" => t.t_f = value.clone(),
        "distance" => t.distance = value.clone(),
        "depth" => out.lattice.depth = value.clone(),
        other => bail!("unknown sweep variable '{other}'"),
    }
    Ok(out)
}

/// Run the sweep, writing CSV rows incrementally in sweep order so partial
/// results survive interruption. Per-point failures land in the error
/// column and the sweep continues.
pub fn run_sweep(cfg: &RunConfig, csv_path: &Path, header: &[String], threads: usize) -> Result<Vec<CsvRow>> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| anyhow!("config has no [sweep] block"))?;

    // resolve each value once to order rows by sweep value
    let mut values: Vec<(f64, Quantity)> = Vec::new();
    for q in &sweep.values {
        let probe = substituted(cfg, &sweep.variable, q)?;
        let r = resolve(&probe)?;
        let numeric = match sweep.variable.as_str() {
            "t_f" => r.transport.unwrap().t_f,
            "distance" => r.transport.unwrap().distance,
            "depth" => r.params.u_d0,
            _ => unreachable!(),
        };
        values.push((numeric, q.clone()));
    }
    values.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let methods: Vec<Method> = sweep
        .methods
        .iter()
        .map(|m| Method::parse(m))
        .collect::<Result<_>>()?;

    let mut tasks = Vec::new();
    for (_, q) in &values {
        for &method in &methods {
            tasks.push(Task {
                index: tasks.len(),
                cfg: substituted(cfg, &sweep.variable, q)?,
                method,
                variable: sweep.variable.clone(),
                display: format!("{} {}", q.value, q.unit).trim().to_string(),
            });
        }
    }

    let worker_count = if threads == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        threads
    }
    .min(tasks.len().max(1));

    let mut file = std::io::BufWriter::new(std::fs::File::create(csv_path)?);
    for line in header {
        writeln!(file, "# {line}")?;
    }
    writeln!(file, "{CSV_COLUMNS}")?;
    file.flush()?;

    let queue: Mutex<std::vec::IntoIter<Task>> = Mutex::new(tasks.clone().into_iter());
    let (tx, rx) = mpsc::channel::<CsvRow>();

    let mut rows: Vec<CsvRow> = Vec::with_capacity(tasks.len());
    std::thread::scope(|scope| -> Result<()> {
        for _ in 0..worker_count {
            let tx = tx.clone();
            let queue = &queue;
            scope.spawn(move || {
                loop {
                    let task = { queue.lock().unwrap().next() };
                    let Some(task) = task else { break };
                    let outcome = resolve(&task.cfg)
                        .and_then(|r| transport(&r, task.method))
                        .map_err(|e| e.to_string());
                    let _ = tx.send(CsvRow {
                        index: task.index,
                        variable: task.variable,
                        sweep_value: task.display,
                        outcome,
                        method: task.method,
                    });
                }
            });
        }
        drop(tx);

        // collect in order, flushing each completed prefix row immediately
        let mut pending: BTreeMap<usize, CsvRow> = BTreeMap::new();
        let mut next = 0usize;
        for row in rx {
            pending.insert(row.index, row);
            while let Some(row) = pending.remove(&next) {
                write_csv_row(&mut file, &row)?;
                file.flush()?;
                rows.push(row);
                next += 1;
            }
        }
        Ok(())
    })?;

    Ok(rows)
}
