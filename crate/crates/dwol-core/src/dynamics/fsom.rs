//! Second-order split-operator stepping in the comoving frame.
//!
//! One step applies the five-factor sequence: half potential phase, position
//! kick `exp[-i m r·δq̇_0]`, forward transform, kinetic phase times momentum
//! kick `exp[-i k·δq̇_0 δt/2]`, inverse transform, half potential phase —
//! with `δq̇_0 = q̇_0(t+δt) − q̇_0(t)` taken from the exact polynomial
//! derivative. Global phase factors are dropped throughout; every factor is
//! a pure phase, so the discrete norm is conserved to rounding.

use std::collections::HashMap;
use std::sync::Arc;

use crate::sta::{Axis, Trajectory};
use crate::{CoreError, Result, C64};

use super::fft::Fft3;
use super::grid::{Frame, GridSpec, WaveField};
use super::potential::Potential;

#[derive(Debug, Clone)]
pub struct PropagationConfig {
    /// Starting step; `None` means `t_f / 64`.
    pub dt_initial: Option<f64>,
    /// Step-doubling acceptance threshold on the L2 difference.
    pub max_rel_error: f64,
    /// Retry cap per step attempt.
    pub max_substeps: usize,
    /// Step-count floor: dt never exceeds `t_f / min_steps`.
    pub min_steps: usize,
    pub adaptive: bool,
    /// Boundary-amplitude fraction that triggers the wrap-around guard.
    pub boundary_limit: f64,
    /// Abort on boundary contamination (sweeps may prefer to record it).
    pub boundary_abort: bool,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            dt_initial: None,
            max_rel_error: 1e-4,
            max_substeps: 40,
            min_steps: 20,
            adaptive: true,
            boundary_limit: 1e-6,
            boundary_abort: true,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct PropagationStats {
    pub accepted: usize,
    pub rejected: usize,
    /// `max |‖ψ‖ − 1|` observed over the run.
    pub norm_drift: f64,
    pub min_dt: f64,
    pub max_boundary_fraction: f64,
    pub boundary_contaminated: bool,
}

/// Owns the FFT plans, the sampled potential and the per-`dt` phase caches.
pub struct Propagator {
    grid: GridSpec,
    fft: Fft3,
    potential: Vec<f64>,
    mass: f64,
    k: [Vec<f64>; 3],
    x: [Vec<f64>; 3],
    half_pot_cache: HashMap<u64, Arc<Vec<C64>>>,
    kin_cache: HashMap<u64, [Arc<Vec<C64>>; 3]>,
}

impl Propagator {
    pub fn new(grid: GridSpec, potential: &Potential) -> Result<Self> {
        grid.validate()?;
        let samples = potential.sample(&grid);
        Ok(Self {
            fft: Fft3::new(grid.n),
            potential: samples,
            mass: potential.mass(),
            k: [grid.wavenumbers(0), grid.wavenumbers(1), grid.wavenumbers(2)],
            x: core::array::from_fn(|a| (0..grid.n[a]).map(|i| grid.coord(a, i)).collect()),
            half_pot_cache: HashMap::new(),
            kin_cache: HashMap::new(),
            grid,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn potential_samples(&self) -> &[f64] {
        &self.potential
    }

    fn half_potential_phase(&mut self, dt: f64) -> Arc<Vec<C64>> {
        let key = dt.to_bits();
        if let Some(hit) = self.half_pot_cache.get(&key) {
            return hit.clone();
        }
        let table: Vec<C64> = self
            .potential
            .iter()
            .map(|&u| C64::new(0.0, -0.5 * u * dt).exp())
            .collect();
        let table = Arc::new(table);
        self.half_pot_cache.insert(key, table.clone());
        table
    }

    fn kinetic_phase(&mut self, dt: f64) -> [Arc<Vec<C64>>; 3] {
        let key = dt.to_bits();
        if let Some(hit) = self.kin_cache.get(&key) {
            return hit.clone();
        }
        let mass = self.mass;
        let made: [Arc<Vec<C64>>; 3] = core::array::from_fn(|a| {
            Arc::new(
                self.k[a]
                    .iter()
                    .map(|&k| C64::new(0.0, -k * k * dt / (2.0 * mass)).exp())
                    .collect(),
            )
        });
        self.kin_cache.insert(key, made.clone());
        made
    }

    fn apply_table(&self, data: &mut [C64], table: &[C64]) {
        for (c, t) in data.iter_mut().zip(table) {
            *c *= t;
        }
    }

    fn apply_separable(&self, data: &mut [C64], ax: &[C64], ay: &[C64], az: &[C64]) {
        let [nx, ny, nz] = self.grid.n;
        let mut idx = 0;
        for k in 0..nz {
            let fz = az[k];
            for j in 0..ny {
                let fyz = fz * ay[j];
                for i in 0..nx {
                    data[idx] *= fyz * ax[i];
                    idx += 1;
                }
            }
        }
    }

    /// One second-order step `t → t + dt`. Updates the field in place and
    /// stamps the new time.
    pub fn step(&mut self, field: &mut WaveField, traj: &Trajectory, t: f64, dt: f64) -> Result<()> {
        if field.frame != Frame::Comoving {
            return Err(CoreError::FrameMismatch {
                expected: Frame::Comoving.as_str(),
                found: field.frame.as_str(),
            });
        }
        let dvx = traj.velocity(Axis::X, t + dt) - traj.velocity(Axis::X, t);
        let dvy = traj.velocity(Axis::Y, t + dt) - traj.velocity(Axis::Y, t);

        let half_pot = self.half_potential_phase(dt);
        let kin = self.kinetic_phase(dt);

        self.apply_table(&mut field.data, &half_pot);

        // position kick, separable over x and y
        let m = self.mass;
        let kick_x: Vec<C64> =
            self.x[0].iter().map(|&x| C64::new(0.0, -m * x * dvx).exp()).collect();
        let kick_y: Vec<C64> =
            self.x[1].iter().map(|&y| C64::new(0.0, -m * y * dvy).exp()).collect();
        let ones_z = vec![C64::new(1.0, 0.0); self.grid.n[2]];
        self.apply_separable(&mut field.data, &kick_x, &kick_y, &ones_z);

        self.fft.forward(&mut field.data);

        // kinetic phase and momentum kick in one separable pass
        let mom_x: Vec<C64> = self.k[0]
            .iter()
            .zip(kin[0].iter())
            .map(|(&k, f)| f * C64::new(0.0, -0.5 * k * dvx * dt).exp())
            .collect();
        let mom_y: Vec<C64> = self.k[1]
            .iter()
            .zip(kin[1].iter())
            .map(|(&k, f)| f * C64::new(0.0, -0.5 * k * dvy * dt).exp())
            .collect();
        let mom_z: Vec<C64> = kin[2].to_vec();
        self.apply_separable(&mut field.data, &mom_x, &mom_y, &mom_z);

        self.fft.inverse(&mut field.data);
        self.apply_table(&mut field.data, &half_pot);

        field.time = t + dt;
        Ok(())
    }
}

/// Single-step convenience wrapper returning the stepped field.
pub fn fsom_step(
    prop: &mut Propagator,
    field: &WaveField,
    traj: &Trajectory,
    t: f64,
    dt: f64,
) -> Result<WaveField> {
    let mut out = field.clone();
    prop.step(&mut out, traj, t, dt)?;
    Ok(out)
}

fn l2_diff(a: &WaveField, b: &WaveField) -> f64 {
    let dv = a.grid.cell_volume();
    (a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        * dv)
        .sqrt()
}

/// Propagate from the field's time stamp to `t_f` with step-doubling
/// adaptivity: a full step is compared against two half steps, accepted when
/// the relative L2 difference stays below `max_rel_error` (the finer result
/// is kept), halved otherwise.
pub fn propagate(
    prop: &mut Propagator,
    phi0: &WaveField,
    traj: &Trajectory,
    cfg: &PropagationConfig,
) -> Result<(WaveField, PropagationStats)> {
    propagate_to(prop, phi0, traj, cfg, traj.t_f)
}

/// [`propagate`] with an explicit end time (snapshots, staged runs).
pub fn propagate_to(
    prop: &mut Propagator,
    phi0: &WaveField,
    traj: &Trajectory,
    cfg: &PropagationConfig,
    t_end: f64,
) -> Result<(WaveField, PropagationStats)> {
    if phi0.frame != Frame::Comoving {
        return Err(CoreError::FrameMismatch {
            expected: Frame::Comoving.as_str(),
            found: phi0.frame.as_str(),
        });
    }
    if (phi0.norm() - 1.0).abs() > 1e-6 {
        return Err(CoreError::InvalidParams(format!(
            "initial state not normalized: |psi| = {}",
            phi0.norm()
        )));
    }
    let t_f = t_end.min(traj.t_f);
    let floor = traj.t_f / (1u64 << 20) as f64;
    let dt_max = traj.t_f / cfg.min_steps as f64;
    let mut dt = cfg.dt_initial.unwrap_or(traj.t_f / 64.0).clamp(floor, dt_max);
    let mut state = phi0.clone();
    let mut t = phi0.time;
    let mut stats = PropagationStats { min_dt: dt, ..Default::default() };

    while t < t_f - 1e-12 * traj.t_f {
        let step_dt = dt.min(t_f - t);
        if !cfg.adaptive {
            prop.step(&mut state, traj, t, step_dt)?;
            t += step_dt;
            stats.accepted += 1;
            stats.min_dt = stats.min_dt.min(step_dt);
            check_state(&state, t, cfg, &mut stats)?;
            continue;
        }

        let mut substeps = 0;
        loop {
            let attempt_dt = dt.min(t_f - t);
            let mut full = state.clone();
            prop.step(&mut full, traj, t, attempt_dt)?;
            let mut half = state.clone();
            prop.step(&mut half, traj, t, 0.5 * attempt_dt)?;
            prop.step(&mut half, traj, t + 0.5 * attempt_dt, 0.5 * attempt_dt)?;
            let err = l2_diff(&full, &half);
            if err <= cfg.max_rel_error {
                state = half;
                t += attempt_dt;
                stats.accepted += 1;
                stats.min_dt = stats.min_dt.min(attempt_dt);
                if err < 0.06 * cfg.max_rel_error {
                    dt = (dt * 2.0).min(dt_max);
                }
                break;
            }
            stats.rejected += 1;
            substeps += 1;
            dt *= 0.5;
            if dt < floor {
                return Err(CoreError::StepUnderflow { dt, floor });
            }
            if substeps > cfg.max_substeps {
                return Err(CoreError::StepUnderflow { dt, floor });
            }
        }
        check_state(&state, t, cfg, &mut stats)?;
    }
    Ok((state, stats))
}

fn check_state(
    state: &WaveField,
    t: f64,
    cfg: &PropagationConfig,
    stats: &mut PropagationStats,
) -> Result<()> {
    if !state.is_finite() {
        return Err(CoreError::NonFiniteAmplitude { t });
    }
    stats.norm_drift = stats.norm_drift.max((state.norm() - 1.0).abs());
    let frac = state.boundary_fraction();
    stats.max_boundary_fraction = stats.max_boundary_fraction.max(frac);
    if frac > cfg.boundary_limit {
        stats.boundary_contaminated = true;
        if cfg.boundary_abort {
            return Err(CoreError::BoundaryContamination {
                t,
                fraction: frac,
                limit: cfg.boundary_limit,
            });
        }
    }
    Ok(())
}
