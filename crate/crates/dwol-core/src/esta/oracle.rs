//! Brute-force quadrature of the defining `G_n` / `K_n` integrals.
//!
//! The oracle never touches the closed-form spatial reductions: it evaluates
//! the mode-product integrand
//!
//! ```text
//! (2ⁿ n_x! n_y! n_z! π³)^{-1/2} H_{n_x}(X_C) H_{n_y}(Y_C) H_{n_z}(Z)
//!     e^{-X_C²-Y_C²-Z²} · W(r, t) · e^{iΩt}
//! ```
//!
//! on a tensor Gauss–Hermite grid and integrates the remaining time axis
//! adaptively. For `G_n` the weight is `W = U_D − V_D`; for `K_n` it is the
//! knot-gradient of the shifted potential, obtained by central finite
//! differences on the shifted argument (chain rule), never from the analytic
//! gradient used by the closed form.

use std::f64::consts::PI;

use crate::quad::{integrate_vec, QuadConfig};
use crate::special::{gauss_hermite, hermite};
use crate::sta::Axis;
use crate::{Result, C64};

use super::basis::KNOTS;
use super::correction::EstaContext;
use super::modes::ModeIndex;
use super::primitives::mode_norm;

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub gh_nodes: usize,
    pub quad: QuadConfig,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            gh_nodes: 32,
            quad: QuadConfig { abs_tol: 1e-12, rel_tol: 1e-7, max_panels: 4096 },
        }
    }
}

struct SpatialGrid {
    nodes: Vec<f64>,
    /// `w_i H_n(u_i)` per axis.
    hw_x: Vec<f64>,
    hw_y: Vec<f64>,
    hw_z: Vec<f64>,
    z_nodes: Vec<f64>,
}

fn spatial_grid(ctx: &EstaContext, n: ModeIndex, gh_nodes: usize) -> SpatialGrid {
    let (u, w) = gauss_hermite(gh_nodes);
    let hw = |m: usize| -> Vec<f64> {
        u.iter().zip(&w).map(|(&ui, &wi)| wi * hermite(m, ui)).collect()
    };
    let (hw_x, hw_y) = (hw(n.nx), hw(n.ny));
    if ctx.params.xi_z > 0.0 {
        let hw_z = hw(n.nz);
        SpatialGrid { nodes: u.clone(), hw_x, hw_y, hw_z, z_nodes: u }
    } else {
        // In-plane reduction: one dummy z node carrying the Gaussian measure.
        SpatialGrid { nodes: u, hw_x, hw_y, hw_z: vec![PI.sqrt()], z_nodes: vec![0.0] }
    }
}

/// Spatial integrals at fixed time: `(S_G, S_dUx, S_dUy)` where `S_G`
/// weights `U_D − V_D` and the others weight the finite-difference x/y
/// gradients of the displaced potential.
fn spatial_integrals(ctx: &EstaContext, grid: &SpatialGrid, t: f64) -> [f64; 3] {
    let p = ctx.params;
    let h = ctx.model;
    let k = p.k_l;
    let (lx, ly, lz) = (h.l[0], h.l[1], h.l[2]);
    let sqrt2 = std::f64::consts::SQRT_2;

    // Displacements of the mode centres against the trap.
    let q0x = ctx.trajectory().sta_position(Axis::X, t);
    let q0y = ctx.trajectory().sta_position(Axis::Y, t);
    let qcx = ctx.classical_paths()[0].position(t);
    let qcy = ctx.classical_paths()[1].position(t);
    let shift = PI / (2.0 * k);
    let dx = (qcx - shift - q0x) / (sqrt2 * lx);
    let dy = (qcy - q0y) / (sqrt2 * ly);
    let dpx = (qcx - q0x) / (sqrt2 * lx);
    let dpy = dy;

    let cb = (0.5 * p.beta).cos();
    let sb = (0.5 * p.beta).sin();
    let (cb2, sb2) = (cb * cb, sb * sb);
    let (cph, sph) = ((0.5 * p.phi).cos(), (0.5 * p.phi).sin());
    let sqxi = p.xi_z.sqrt();
    let fd_h = 1e-4 / k;

    let m = grid.nodes.len();
    let mz = grid.z_nodes.len();

    // Per-axis arrays of every x-, y- and z-dependent factor of the
    // integrand, including the ±h variants for the finite differences.
    let mut xc2 = vec![[0.0f64; 3]; m]; // cos(2k x·) at (x, x+h, x-h)
    let mut xst = vec![[0.0f64; 3]; m]; // sin(k x· - θ)
    let mut xsk = vec![[0.0f64; 3]; m]; // sin(k x·)
    let mut xe2 = vec![[0.0f64; 3]; m]; // exp(-2 x·²/w0x²)
    let mut xe1 = vec![[0.0f64; 3]; m]; // exp(-x·²/w0x²)
    let mut vx = vec![0.0f64; m];
    for (i, &u) in grid.nodes.iter().enumerate() {
        let base = sqrt2 * lx * (u + dx);
        for (s, off) in [(0usize, 0.0), (1, fd_h), (2, -fd_h)] {
            let x = base + off;
            xc2[i][s] = (2.0 * k * x).cos();
            xst[i][s] = (k * x - p.theta).sin();
            xsk[i][s] = (k * x).sin();
            xe2[i][s] = (-2.0 * x * x / (p.w0x * p.w0x)).exp();
            xe1[i][s] = (-x * x / (p.w0x * p.w0x)).exp();
        }
        let xt = sqrt2 * lx * (u + dpx);
        vx[i] = h.mass * h.a_x * xt + 0.5 * h.mass * h.omega_sq[0] * xt * xt;
    }
    let mut yc2 = vec![[0.0f64; 3]; m];
    let mut yck = vec![[0.0f64; 3]; m];
    let mut ye2 = vec![[0.0f64; 3]; m];
    let mut ye1 = vec![[0.0f64; 3]; m];
    let mut vy = vec![0.0f64; m];
    for (j, &v) in grid.nodes.iter().enumerate() {
        let base = sqrt2 * ly * (v + dy);
        for (s, off) in [(0usize, 0.0), (1, fd_h), (2, -fd_h)] {
            let y = base + off;
            yc2[j][s] = (2.0 * k * y).cos();
            yck[j][s] = (k * y).cos();
            ye2[j][s] = (-2.0 * y * y / (p.w0y * p.w0y)).exp();
            ye1[j][s] = (-y * y / (p.w0y * p.w0y)).exp();
        }
        let yt = sqrt2 * ly * (v + dpy);
        vy[j] = 0.5 * h.mass * h.omega_sq[1] * yt * yt;
    }
    let mut zc2 = vec![0.0f64; mz];
    let mut zc1 = vec![0.0f64; mz];
    let mut vz = vec![0.0f64; mz];
    for (kk, &wz) in grid.z_nodes.iter().enumerate() {
        if p.xi_z > 0.0 {
            let z = sqrt2 * lz * wz;
            let c = (p.k_z * z).cos();
            zc1[kk] = c;
            zc2[kk] = c * c;
            vz[kk] = 0.5 * h.mass * h.omega_sq[2] * z * z;
        }
    }

    // U_D (frozen waists) from the per-axis factors at FD slot (sx, sy).
    let u_at = |i: usize, j: usize, kk: usize, sx: usize, sy: usize| -> f64 {
        let par = cb2 * (yc2[j][sy] - xc2[i][sx] + 2.0);
        let well = yck[j][sy] - xst[i][sx];
        let perp = 2.0 * sb2 * well * well;
        let mut tot = par + perp;
        if p.xi_z > 0.0 {
            tot += p.xi_z * zc2[kk] * xe2[i][sx] * ye2[j][sy];
            tot += 2.0 * sqxi * cb
                * xe1[i][sx]
                * ye1[j][sy]
                * zc1[kk]
                * (cph * yck[j][sy] - sph * xsk[i][sx]);
        }
        -p.u_d0 * tot
    };

    let mut s_g = 0.0;
    let mut s_dux = 0.0;
    let mut s_duy = 0.0;
    for kk in 0..mz {
        let hwz = grid.hw_z[kk];
        for j in 0..m {
            let hwzy = hwz * grid.hw_y[j];
            let mut row_g = 0.0;
            let mut row_x = 0.0;
            let mut row_y = 0.0;
            for i in 0..m {
                let hw = grid.hw_x[i];
                let u0 = u_at(i, j, kk, 0, 0);
                let w = u0 - (-h.v_d0 + vx[i] + vy[j] + vz[kk]);
                row_g += hw * w;
                row_x += hw * (u_at(i, j, kk, 1, 0) - u_at(i, j, kk, 2, 0));
                row_y += hw * (u_at(i, j, kk, 0, 1) - u_at(i, j, kk, 0, 2));
            }
            s_g += hwzy * row_g;
            s_dux += hwzy * row_x;
            s_duy += hwzy * row_y;
        }
    }
    [s_g, s_dux / (2.0 * fd_h), s_duy / (2.0 * fd_h)]
}

/// `G_n` and `K_n` by brute force in a single adaptive pass (the spatial
/// tensor work is shared between all thirteen components).
pub fn gk_n_bruteforce(
    ctx: &EstaContext,
    n: ModeIndex,
    cfg: &OracleConfig,
) -> Result<(C64, [C64; 12])> {
    let mut k_out = [C64::new(0.0, 0.0); 12];
    if ctx.params.xi_z == 0.0 && n.nz > 0 {
        return Ok((C64::new(0.0, 0.0), k_out));
    }
    let grid = spatial_grid(ctx, n, cfg.gh_nodes);
    let omega = ctx.mode_phase_rate(n);
    let norm3 = mode_norm(n.nx, n.ny, n.nz)? / PI;
    let t_f = ctx.trajectory().t_f;
    let basis = ctx.basis;
    let value = integrate_vec(
        |t, buf| {
            let s = spatial_integrals(ctx, &grid, t);
            let phase = C64::new(0.0, omega * t).exp();
            buf[0] = phase * s[0];
            for j in 0..KNOTS {
                let gj = basis.eval(j, t / t_f);
                // ∂/∂α_j U_D(r - q_0 - α_j g_j ê_u) |_0 = -g_j ∂_u U_D
                buf[1 + j] = phase * (-gj * s[1]);
                buf[1 + KNOTS + j] = phase * (-gj * s[2]);
            }
        },
        0.0,
        t_f,
        13,
        ctx.initial_break(omega),
        &cfg.quad,
    )?;
    let g_out = norm3 * value[0];
    for (o, v) in k_out.iter_mut().zip(&value[1..]) {
        *o = norm3 * v;
    }
    Ok((g_out, k_out))
}

/// `G_n` by brute force.
pub fn g_n_bruteforce(ctx: &EstaContext, n: ModeIndex, cfg: &OracleConfig) -> Result<C64> {
    Ok(gk_n_bruteforce(ctx, n, cfg)?.0)
}

/// `K_n` by brute force (finite-difference knot gradients).
pub fn k_n_bruteforce(ctx: &EstaContext, n: ModeIndex, cfg: &OracleConfig) -> Result<[C64; 12]> {
    Ok(gk_n_bruteforce(ctx, n, cfg)?.1)
}
