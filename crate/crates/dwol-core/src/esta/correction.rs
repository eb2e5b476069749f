//! Assembled auxiliary functions `G_n`, `K_n` and the correction vector.
//!
//! The spatial matrix elements of `U_D − V_D` (for `G_n`) and of the trap
//! gradients (for `K_n`) between transport modes reduce to products of the
//! closed-form primitives; only the time integral with the oscillatory phase
//! `exp[i(n_x ω_x + n_y ω_y + n_z ω_z) t]` remains, and is done by adaptive
//! Gauss–Kronrod panels seeded at phase-period boundaries.
//!
//! All mode evaluations are pure functions of the context and may run
//! concurrently; the correction itself is a deterministic reduction.

use std::f64::consts::PI;

use crate::diag::Diagnostics;
use crate::lattice::{HarmonicModel, LatticeParams};
use crate::poly::{ClampedPoly, Poly};
use crate::quad::{integrate_vec, QuadConfig};
use crate::sta::{classical_path, Axis, ClassicalPath, Provenance, Trajectory, TransportSpec};
use crate::{CoreError, Result, C64};

use super::basis::{knot_positions, CorrectionBasis, KNOTS};
use super::modes::{enumerate_modes, ModeIndex};
use super::primitives::*;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Twelve knot displacements: x block then y block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlVector(pub [f64; 12]);

impl ControlVector {
    pub fn zeros() -> Self {
        Self([0.0; 12])
    }

    pub fn block(&self, axis: Axis) -> [f64; KNOTS] {
        let off = axis.index() * KNOTS;
        core::array::from_fn(|j| self.0[off + j])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Per-mode record kept for reports and verification.
#[derive(Debug, Clone)]
pub struct ModeContribution {
    pub index: ModeIndex,
    pub g: C64,
    pub k: [C64; 12],
}

/// The correction vector with its provenance data.
#[derive(Debug, Clone)]
pub struct EstaCorrection {
    pub epsilon: ControlVector,
    pub cutoff: usize,
    pub modes: Vec<ModeContribution>,
    /// STA knot values `λ_0` (x block then y block).
    pub lambda0: ControlVector,
    /// Perturbative estimate `1 − Σ|G_n|²/ħ²`.
    pub fidelity_estimate: f64,
}

/// Everything the correction integrals need, precomputed once.
pub struct EstaContext<'a> {
    pub params: &'a LatticeParams,
    pub model: &'a HarmonicModel,
    pub basis: &'a CorrectionBasis,
    pub quad: QuadConfig,
    /// Cap on individual quantum numbers (pre-condition of the primitives).
    pub max_index: usize,
    traj: Trajectory,
    paths: [ClassicalPath; 2],
}

/// Per-time per-axis shifted displacements entering the primitives.
#[derive(Debug, Clone, Copy)]
struct AxisShift {
    /// `Δ_u = (q̃_c,u − q_0,u)/(√2 l_u)` (mode centre vs trap centre).
    delta: f64,
    /// `Δ'_u = (q_c,u − q_0,u)/(√2 l_u)` (shift-free, for the model rows).
    delta_prime: f64,
}

impl<'a> EstaContext<'a> {
    /// Build from an STA design (a corrected trajectory is reduced to its
    /// STA part — the expansion point of the method).
    pub fn new(
        params: &'a LatticeParams,
        model: &'a HarmonicModel,
        traj: &Trajectory,
        basis: &'a CorrectionBasis,
    ) -> Result<Self> {
        let sta = traj.to_sta();
        let paths = [
            classical_path(&sta, model, Axis::X)?,
            classical_path(&sta, model, Axis::Y)?,
        ];
        Ok(Self {
            params,
            model,
            basis,
            quad: QuadConfig::default(),
            max_index: 8,
            traj: sta,
            paths,
        })
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.traj
    }

    pub fn classical_paths(&self) -> &[ClassicalPath; 2] {
        &self.paths
    }

    pub fn mode_phase_rate(&self, n: ModeIndex) -> f64 {
        let h = self.model;
        n.nx as f64 * h.omega[0] + n.ny as f64 * h.omega[1] + n.nz as f64 * h.omega[2]
    }

    fn check_mode(&self, n: ModeIndex) -> Result<()> {
        for idx in [n.nx, n.ny, n.nz] {
            if idx > self.max_index {
                return Err(CoreError::IndexTooLarge { index: idx, max: self.max_index });
            }
        }
        Ok(())
    }

    fn shifts(&self, t: f64) -> [AxisShift; 2] {
        let h = self.model;
        let shift_x = PI / (2.0 * h.k_l);
        let mut out = [AxisShift { delta: 0.0, delta_prime: 0.0 }; 2];
        for (i, axis) in [Axis::X, Axis::Y].into_iter().enumerate() {
            let q0 = self.traj.sta_position(axis, t);
            let qc = self.paths[i].position(t);
            let l = h.l[i];
            let dp = (qc - q0) / (SQRT2 * l);
            let d = if i == 0 { dp - shift_x / (SQRT2 * l) } else { dp };
            out[i] = AxisShift { delta: d, delta_prime: dp };
        }
        out
    }

    /// Real part of the spatial matrix element of `U_D − V_D` (π-absorbed).
    fn zeta_total(&self, n: ModeIndex, t: f64) -> Result<f64> {
        let p = self.params;
        let h = self.model;
        let k = p.k_l;
        let (lx, ly) = (h.l[0], h.l[1]);
        let [sx, sy] = self.shifts(t);
        let spi = PI.sqrt();
        let cb = (0.5 * p.beta).cos();
        let sb = (0.5 * p.beta).sin();
        let (cb2, sb2) = (cb * cb, sb * sb);
        let (ct, st) = (p.theta.cos(), p.theta.sin());
        let (c2t, s2t) = ((2.0 * p.theta).cos(), (2.0 * p.theta).sin());
        let (dx0, dy0, dz0) = (n.nx == 0, n.ny == 0, n.nz == 0);

        let mut total = 0.0;

        if dz0 {
            let mut par = 0.0;
            if dx0 {
                par += i_trig_cos(n.ny, k, ly, sy.delta)?;
            }
            if dy0 {
                par -= i_trig_cos(n.nx, k, lx, sx.delta)?;
            }
            if dx0 && dy0 {
                par += 2.0 * spi;
            }
            total += cb2 * par;

            let mut perp = 0.0;
            if dx0 && dy0 {
                perp += 2.0 * spi;
            }
            if dx0 {
                perp += i_trig_cos(n.ny, k, ly, sy.delta)?;
            }
            if dy0 {
                perp -= c2t * i_trig_cos(n.nx, k, lx, sx.delta)?
                    + s2t * i_trig_sin(n.nx, k, lx, sx.delta)?;
            }
            perp += 4.0 / spi
                * (st * i_trig_cos(n.nx, 0.5 * k, lx, sx.delta)?
                    - ct * i_trig_sin(n.nx, 0.5 * k, lx, sx.delta)?)
                * i_trig_cos(n.ny, 0.5 * k, ly, sy.delta)?;
            total += sb2 * perp;
        }

        if p.xi_z > 0.0 && n.nz % 2 == 0 {
            let kz_lz = p.k_z * h.l[2];
            let lam = out_of_plane_cos_sq(n.nz, kz_lz);
            if lam != 0.0 {
                total += p.xi_z / spi
                    * i_envelope_sq(n.nx, lx, p.w0x, sx.delta)?
                    * i_envelope_sq(n.ny, ly, p.w0y, sy.delta)?
                    * lam;
            }
            let r1 = out_of_plane_cos(n.nz, kz_lz);
            if r1 != 0.0 {
                let (cph, sph) = ((0.5 * p.phi).cos(), (0.5 * p.phi).sin());
                total += 2.0 * p.xi_z.sqrt() * cb / spi
                    * (cph
                        * i_envelope(n.nx, lx, p.w0x, sx.delta)?
                        * i_envelope_cos(n.ny, k, ly, p.w0y, sy.delta)?
                        - sph
                            * i_envelope_sin(n.nx, k, lx, p.w0x, sx.delta)?
                            * i_envelope(n.ny, ly, p.w0y, sy.delta)?)
                    * r1;
            }
        }

        // Quadratic-model subtraction rows (already divided by U_d0).
        let mut sub = 0.0;
        if dy0 && dz0 {
            sub += SQRT2 * h.mass * h.a_x * lx * i_linear(n.nx, sx.delta_prime)
                + 0.5 * h.omega[0] * i_quadratic(n.nx, sx.delta_prime);
        }
        if dx0 && dz0 {
            sub += 0.5 * h.omega[1] * i_quadratic(n.ny, sy.delta_prime);
        }
        if dx0 && dy0 {
            let zrow = match n.nz {
                0 => 0.5,
                2 => 2.0,
                _ => 0.0,
            };
            sub += 0.5 * h.omega[2] * zrow;
        }
        if dx0 && dy0 && dz0 {
            sub -= h.v_d0;
        }
        total += spi / p.u_d0 * sub;

        Ok(total)
    }

    /// Spatial matrix element of `-∂U_D/∂u` divided by `U_d0` (π-absorbed);
    /// the in-plane trap-gradient factor of `K_n`.
    fn eta(&self, axis: Axis, n: ModeIndex, t: f64) -> Result<f64> {
        let p = self.params;
        let h = self.model;
        let k = p.k_l;
        let (lx, ly) = (h.l[0], h.l[1]);
        let [sx, sy] = self.shifts(t);
        let spi = PI.sqrt();
        let cb = (0.5 * p.beta).cos();
        let sb = (0.5 * p.beta).sin();
        let (cb2, sb2) = (cb * cb, sb * sb);
        let (ct, st) = (p.theta.cos(), p.theta.sin());
        let (c2t, s2t) = ((2.0 * p.theta).cos(), (2.0 * p.theta).sin());
        let (cph, sph) = ((0.5 * p.phi).cos(), (0.5 * p.phi).sin());
        let (dx0, dy0, dz0) = (n.nx == 0, n.ny == 0, n.nz == 0);

        let mut total = 0.0;
        match axis {
            Axis::X => {
                if dz0 {
                    if dy0 {
                        total += cb2 * 2.0 * k * i_trig_sin(n.nx, k, lx, sx.delta)?;
                    }
                    let mut perp = (ct * i_trig_cos(n.nx, 0.5 * k, lx, sx.delta)?
                        + st * i_trig_sin(n.nx, 0.5 * k, lx, sx.delta)?)
                        * i_trig_cos(n.ny, 0.5 * k, ly, sy.delta)?
                        / spi;
                    if dy0 {
                        perp -= 0.5
                            * (c2t * i_trig_sin(n.nx, k, lx, sx.delta)?
                                - s2t * i_trig_cos(n.nx, k, lx, sx.delta)?);
                    }
                    total -= 4.0 * sb2 * k * perp;
                }
                if p.xi_z > 0.0 && n.nz % 2 == 0 {
                    let kz_lz = p.k_z * h.l[2];
                    let lam = out_of_plane_cos_sq(n.nz, kz_lz);
                    let wx2 = p.w0x * p.w0x;
                    if lam != 0.0 {
                        total += -4.0 * SQRT2 * lx / wx2 * p.xi_z / spi
                            * i_envelope_sq_moment(n.nx, lx, p.w0x, sx.delta)?
                            * i_envelope_sq(n.ny, ly, p.w0y, sy.delta)?
                            * lam;
                    }
                    let r1 = out_of_plane_cos(n.nz, kz_lz);
                    if r1 != 0.0 {
                        let env_y = i_envelope(n.ny, ly, p.w0y, sy.delta)?;
                        total += 2.0 * p.xi_z.sqrt() * cb / spi
                            * r1
                            * (-2.0 * SQRT2 * lx / wx2
                                * cph
                                * i_envelope_moment(n.nx, lx, p.w0x, sx.delta)?
                                * i_envelope_cos(n.ny, k, ly, p.w0y, sy.delta)?
                                + 2.0 * SQRT2 * lx / wx2
                                    * sph
                                    * i_envelope_sin_moment(n.nx, k, lx, p.w0x, sx.delta)?
                                    * env_y
                                - k * sph
                                    * i_envelope_cos(n.nx, k, lx, p.w0x, sx.delta)?
                                    * env_y);
                    }
                }
            }
            Axis::Y => {
                if dz0 {
                    if dx0 {
                        total -= cb2 * 2.0 * k * i_trig_sin(n.ny, k, ly, sy.delta)?;
                    }
                    let mut perp = -(ct * i_trig_sin(n.nx, 0.5 * k, lx, sx.delta)?
                        - st * i_trig_cos(n.nx, 0.5 * k, lx, sx.delta)?)
                        * i_trig_sin(n.ny, 0.5 * k, ly, sy.delta)?
                        / spi;
                    if dx0 {
                        perp += 0.5 * i_trig_sin(n.ny, k, ly, sy.delta)?;
                    }
                    total -= 4.0 * sb2 * k * perp;
                }
                if p.xi_z > 0.0 && n.nz % 2 == 0 {
                    let kz_lz = p.k_z * h.l[2];
                    let lam = out_of_plane_cos_sq(n.nz, kz_lz);
                    let wy2 = p.w0y * p.w0y;
                    if lam != 0.0 {
                        total += -4.0 * SQRT2 * ly / wy2 * p.xi_z / spi
                            * i_envelope_sq(n.nx, lx, p.w0x, sx.delta)?
                            * i_envelope_sq_moment(n.ny, ly, p.w0y, sy.delta)?
                            * lam;
                    }
                    let r1 = out_of_plane_cos(n.nz, kz_lz);
                    if r1 != 0.0 {
                        let env_x = i_envelope(n.nx, lx, p.w0x, sx.delta)?;
                        total += 2.0 * p.xi_z.sqrt() * cb / spi
                            * r1
                            * (-2.0 * SQRT2 * ly / wy2
                                * cph
                                * env_x
                                * i_envelope_cos_moment(n.ny, k, ly, p.w0y, sy.delta)?
                                + 2.0 * SQRT2 * ly / wy2
                                    * sph
                                    * i_envelope_sin(n.nx, k, lx, p.w0x, sx.delta)?
                                    * i_envelope_moment(n.ny, ly, p.w0y, sy.delta)?
                                - k * cph * env_x * i_envelope_sin(n.ny, k, ly, p.w0y, sy.delta)?);
                    }
                }
            }
        }
        Ok(total)
    }

    /// Panel seed width: at most two phase periods (≈4π of phase, well
    /// inside what a 15-point panel resolves), at least 16 panels.
    pub(crate) fn initial_break(&self, omega: f64) -> f64 {
        let base = self.traj.t_f / 16.0;
        if omega > 0.0 {
            base.min(4.0 * PI / omega)
        } else {
            base
        }
    }
}

/// Pure arithmetic of the correction formula, factored out for testability:
/// returns `(ε, Σ|G|², degenerate)`.
pub fn epsilon_from(modes: &[ModeContribution]) -> (ControlVector, f64, bool) {
    let sum_g2: f64 = modes.iter().map(|m| m.g.norm_sqr()).sum();
    let mut grad = [0.0_f64; 12];
    for m in modes {
        for j in 0..12 {
            grad[j] += (m.g.conj() * m.k[j]).re;
        }
    }
    let grad_norm_sq: f64 = grad.iter().map(|v| v * v).sum();
    if sum_g2 == 0.0 {
        (ControlVector::zeros(), sum_g2, false)
    } else if grad_norm_sq == 0.0 {
        (ControlVector::zeros(), sum_g2, true)
    } else {
        (ControlVector(core::array::from_fn(|j| -sum_g2 * grad[j] / grad_norm_sq)), sum_g2, false)
    }
}

/// Auxiliary scalar function `G_n` (closed-form spatial part, adaptive time
/// quadrature). Identically zero for odd `n_z` and for out-of-plane modes of
/// an in-plane problem.
pub fn g_n(ctx: &EstaContext, n: ModeIndex) -> Result<C64> {
    ctx.check_mode(n)?;
    if n == ModeIndex::ground() {
        return Err(CoreError::InvalidParams("G_n needs n >= 1".into()));
    }
    if n.nz % 2 == 1 || (ctx.params.xi_z == 0.0 && n.nz > 0) {
        return Ok(C64::new(0.0, 0.0));
    }
    let omega = ctx.mode_phase_rate(n);
    let pref = -ctx.params.u_d0 * mode_norm(n.nx, n.ny, n.nz)?;
    let mut failure = None;
    let value = integrate_vec(
        |t, out| match ctx.zeta_total(n, t) {
            Ok(z) => out[0] = C64::new(0.0, omega * t).exp() * z,
            Err(e) => {
                failure.get_or_insert(e);
                out[0] = C64::new(0.0, 0.0);
            }
        },
        0.0,
        ctx.traj.t_f,
        1,
        ctx.initial_break(omega),
        &ctx.quad,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(pref * value[0])
}

/// Auxiliary vector function `K_n`: twelve components, the x-knot block
/// followed by the y-knot block.
pub fn k_n(ctx: &EstaContext, n: ModeIndex) -> Result<[C64; 12]> {
    ctx.check_mode(n)?;
    if n == ModeIndex::ground() {
        return Err(CoreError::InvalidParams("K_n needs n >= 1".into()));
    }
    let mut out = [C64::new(0.0, 0.0); 12];
    if n.nz % 2 == 1 || (ctx.params.xi_z == 0.0 && n.nz > 0) {
        return Ok(out);
    }
    let omega = ctx.mode_phase_rate(n);
    let pref = ctx.params.u_d0 * mode_norm(n.nx, n.ny, n.nz)?;
    let t_f = ctx.traj.t_f;
    let mut failure = None;
    let value = integrate_vec(
        |t, buf| {
            let phase = C64::new(0.0, omega * t).exp();
            let (ex, ey) = match (ctx.eta(Axis::X, n, t), ctx.eta(Axis::Y, n, t)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    failure.get_or_insert(e);
                    (0.0, 0.0)
                }
            };
            for j in 0..KNOTS {
                let gj = ctx.basis.eval(j, t / t_f);
                buf[j] = phase * (gj * ex);
                buf[KNOTS + j] = phase * (gj * ey);
            }
        },
        0.0,
        t_f,
        12,
        ctx.initial_break(omega),
        &ctx.quad,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    for (o, v) in out.iter_mut().zip(value) {
        *o = pref * v;
    }
    Ok(out)
}

/// Optimal correction vector from all modes with `1 <= n <= cutoff`.
///
/// `ε = −(Σ|G_n|²) Σ Re(G_n* K_n) / ‖Σ Re(G_n* K_n)‖²`; the degenerate
/// gradient direction is reported and mapped to `ε = 0` (the shortcut is
/// already stationary at this order).
pub fn esta_correction(
    ctx: &EstaContext,
    cutoff: usize,
    diag: &mut Diagnostics,
) -> Result<EstaCorrection> {
    if cutoff < 1 {
        return Err(CoreError::InvalidParams("cutoff N must be >= 1".into()));
    }
    let modes: Vec<ModeContribution> = enumerate_modes(cutoff)
        .into_iter()
        .map(|index| -> Result<ModeContribution> {
            Ok(ModeContribution { index, g: g_n(ctx, index)?, k: k_n(ctx, index)? })
        })
        .collect::<Result<_>>()?;

    let (epsilon, sum_g2, degenerate) = epsilon_from(&modes);
    if degenerate {
        diag.warn(
            "degenerate-correction",
            format!("|G|² = {sum_g2:.3e} but the fidelity gradient vanishes; keeping the STA design"),
        );
    }

    let fidelity_estimate = 1.0 - sum_g2;
    if !(fidelity_estimate > 0.0 && fidelity_estimate <= 1.0) {
        diag.warn(
            "fidelity-estimate-out-of-validity",
            format!("perturbative estimate 1 - Σ|G|² = {fidelity_estimate:.6} outside (0, 1]"),
        );
    }

    let knots = knot_positions();
    let mut lambda0 = [0.0; 12];
    for (j, &s) in knots.iter().enumerate() {
        let t = s * ctx.traj.t_f;
        lambda0[j] = ctx.traj.sta_position(Axis::X, t);
        lambda0[KNOTS + j] = ctx.traj.sta_position(Axis::Y, t);
    }

    Ok(EstaCorrection {
        epsilon,
        cutoff,
        modes,
        lambda0: ControlVector(lambda0),
        fidelity_estimate,
    })
}

/// Apply a correction vector to an STA design.
pub fn corrected_trajectory(
    sta: &Trajectory,
    basis: &CorrectionBasis,
    epsilon: &ControlVector,
    cutoff: usize,
) -> Trajectory {
    let clamped = basis.polys[0].clamped;
    let corr: [ClampedPoly; 2] = core::array::from_fn(|axis| {
        let mut acc = Poly::zero();
        for j in 0..KNOTS {
            acc = acc.add(&basis.polys[j].r.scale(epsilon.0[axis * KNOTS + j]));
        }
        ClampedPoly::new(clamped, acc)
    });
    Trajectory::from_parts(
        sta.t_f,
        sta.distance,
        sta.omega,
        sta.sta_polys().clone(),
        corr,
        Provenance::Esta { epsilon: epsilon.0, cutoff },
    )
}

/// Full eSTA design: STA trajectory, correction, corrected trajectory.
pub fn design_esta(
    spec: &TransportSpec,
    params: &LatticeParams,
    model: &HarmonicModel,
    cutoff: usize,
    basis: &CorrectionBasis,
    diag: &mut Diagnostics,
) -> Result<(Trajectory, EstaCorrection)> {
    let sta = crate::sta::design_sta(spec, model)?;
    let ctx = EstaContext::new(params, model, &sta, basis)?;
    let correction = esta_correction(&ctx, cutoff, diag)?;
    let traj = corrected_trajectory(&sta, basis, &correction.epsilon, cutoff);
    Ok((traj, correction))
}
