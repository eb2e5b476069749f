//! Orchestration: design → ground state → propagate → fidelity.

use std::f64::consts::PI;
use std::time::Instant;

use anyhow::{anyhow, bail, Result};

use dwol_core::diag::Diagnostics;
use dwol_core::dynamics::{
    ite_ground_state, propagate_to, InitialGuess, Potential, PropagationStats, Propagator,
    WaveField,
};
use dwol_core::esta::{design_esta, CorrectionBasis, EstaCorrection};
use dwol_core::sta::{design_sta, Trajectory};

use crate::config::{Method, PotentialChoice, Resolved};

pub struct DesignOutput {
    pub sta: Trajectory,
    pub final_traj: Trajectory,
    pub correction: Option<EstaCorrection>,
    pub diagnostics: Diagnostics,
}

pub fn basis_for(r: &Resolved) -> Result<CorrectionBasis> {
    if r.basis_exact {
        Ok(CorrectionBasis::exact())
    } else {
        CorrectionBasis::least_squares().map_err(|e| anyhow!("basis construction failed: {e}"))
    }
}

/// Design the trajectory for the configured (or overridden) method.
pub fn design(r: &Resolved, method: Method) -> Result<DesignOutput> {
    let spec = r
        .transport
        .ok_or_else(|| anyhow!("config has no [transport] block"))?;
    let sta = design_sta(&spec, &r.model)?;
    match method {
        Method::Sta => Ok(DesignOutput {
            final_traj: sta.clone(),
            sta,
            correction: None,
            diagnostics: Diagnostics::new(),
        }),
        Method::Esta => {
            let basis = basis_for(r)?;
            let mut diag = Diagnostics::new();
            let (traj, correction) =
                design_esta(&spec, &r.params, &r.model, r.cutoff, &basis, &mut diag)?;
            Ok(DesignOutput { sta, final_traj: traj, correction: Some(correction), diagnostics: diag })
        }
    }
}

/// What a ground state is for: a transported wave packet starts in one
/// well; the variational double-well ground state is the symmetric doublet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundPurpose {
    Transport,
    Spectrum,
}

/// Initial-state seed. With degenerate wells the seed decides which member
/// of the near-degenerate manifold the imaginary-time flow settles on, so
/// transport runs seed a single well (the packet being moved) while the
/// ground-state command seeds the symmetric pair (the bimodal state).
pub fn ground_guess(r: &Resolved, purpose: GroundPurpose) -> InitialGuess {
    let x0 = r.params.expansion_point()[0];
    let l = [
        r.model.l[0],
        r.model.l[1],
        if r.model.l[2].is_finite() { r.model.l[2] } else { 1.0 },
    ];
    let single = InitialGuess::Gaussian {
        center: [x0 - r.model.a_x / r.model.omega_sq[0], 0.0, 0.0],
        widths: l,
    };
    let pair = InitialGuess::GaussianPair {
        centers: [[-PI / (2.0 * r.params.k_l), 0.0, 0.0], [PI / (2.0 * r.params.k_l), 0.0, 0.0]],
        widths: l,
    };
    match (r.potential, r.ite_guess.as_str(), purpose) {
        (_, "gaussian", _) => single,
        (_, "double-well", _) => pair,
        (PotentialChoice::Harmonic, _, _) => single,
        (_, _, GroundPurpose::Transport) => single,
        (_, _, GroundPurpose::Spectrum) => pair,
    }
}

pub fn potential_of(r: &Resolved) -> Potential<'_> {
    match r.potential {
        PotentialChoice::Full => Potential::FullDwol(&r.params),
        PotentialChoice::Frozen => Potential::FrozenDwol(&r.params),
        PotentialChoice::Harmonic => Potential::Harmonic(&r.model),
    }
}

pub struct GroundStateOutput {
    pub state: WaveField,
    pub energy: f64,
    pub iterations: usize,
}

pub fn ground_state(r: &Resolved) -> Result<GroundStateOutput> {
    let grid = r
        .grid
        .clone()
        .ok_or_else(|| anyhow!("config has no [grid] block"))?;
    let pot = potential_of(r);
    let guess = ground_guess(r, GroundPurpose::Spectrum);
    let (state, energy, stats) = ite_ground_state(&pot, &grid, &r.ite, &guess)?;
    Ok(GroundStateOutput { state, energy, iterations: stats.iterations })
}

#[derive(Debug, Clone)]
pub struct TransportOutcome {
    pub method: Method,
    pub t_f_over_tx: f64,
    pub fidelity: f64,
    /// Perturbative estimate for eSTA designs.
    pub fidelity_estimate: Option<f64>,
    pub ground_energy: f64,
    pub ite_iterations: usize,
    pub stats: PropagationStats,
    pub diagnostics: Diagnostics,
    pub wall_ms: u128,
    /// Snapshots at the requested fractions of t_f.
    pub snapshots: Vec<(f64, WaveField)>,
}

/// Full transport run: ITE ground state, comoving propagation, fidelity
/// against the static ground state (legitimate because the trap velocity
/// vanishes at both endpoints).
pub fn transport(r: &Resolved, method: Method) -> Result<TransportOutcome> {
    let start = Instant::now();
    let grid = r
        .grid
        .clone()
        .ok_or_else(|| anyhow!("config has no [grid] block"))?;
    let design = design(r, method)?;
    let mut diagnostics = design.diagnostics.clone();
    diagnostics.extend(r.diagnostics.clone());

    let pot = potential_of(r);
    let guess = ground_guess(r, GroundPurpose::Transport);
    let (ground, energy, ite_stats) = ite_ground_state(&pot, &grid, &r.ite, &guess)?;

    if ground.boundary_fraction() > 1e-8 {
        diagnostics.warn(
            "initial-boundary-amplitude",
            format!(
                "ground-state boundary amplitude fraction {:.3e} above 1e-8; widen the window",
                ground.boundary_fraction()
            ),
        );
    }

    let mut prop = Propagator::new(grid, &pot)?;
    let traj = &design.final_traj;

    let mut fractions = r.snapshot_fractions.clone();
    fractions.sort_by(|a, b| a.partial_cmp(b).unwrap());
    fractions.dedup();
    let mut snapshots = Vec::new();
    let mut state = ground.clone();
    let mut stats_total = PropagationStats::default();
    let merge = |total: &mut PropagationStats, part: PropagationStats| {
        total.accepted += part.accepted;
        total.rejected += part.rejected;
        total.norm_drift = total.norm_drift.max(part.norm_drift);
        total.min_dt = if total.min_dt == 0.0 { part.min_dt } else { total.min_dt.min(part.min_dt) };
        total.max_boundary_fraction = total.max_boundary_fraction.max(part.max_boundary_fraction);
        total.boundary_contaminated |= part.boundary_contaminated;
    };
    for &f in &fractions {
        if f <= 0.0 || f >= 1.0 {
            continue;
        }
        let (next, part) = propagate_to(&mut prop, &state, traj, &r.propagation, f * traj.t_f)?;
        merge(&mut stats_total, part);
        snapshots.push((f, next.clone()));
        state = next;
    }
    let (final_state, part) = propagate_to(&mut prop, &state, traj, &r.propagation, traj.t_f)?;
    merge(&mut stats_total, part);

    let fidelity = ground.fidelity(&final_state)?;
    if fidelity > 1.0 + 1e-9 {
        bail!("fidelity {fidelity} exceeds 1 + 1e-9: numerical failure");
    }
    if stats_total.boundary_contaminated {
        diagnostics.warn(
            "boundary-contamination",
            format!(
                "boundary amplitude fraction reached {:.3e}",
                stats_total.max_boundary_fraction
            ),
        );
    }

    Ok(TransportOutcome {
        method,
        t_f_over_tx: traj.t_f / r.model.t[0],
        fidelity,
        fidelity_estimate: design.correction.as_ref().map(|c| c.fidelity_estimate),
        ground_energy: energy,
        ite_iterations: ite_stats.iterations,
        stats: stats_total,
        diagnostics,
        wall_ms: start.elapsed().as_millis(),
        snapshots,
    })
}
