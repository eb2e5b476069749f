//! Transport modes of the driven harmonic model.
//!
//! A transport mode is a harmonic-oscillator eigenfunction that rides on the
//! classical path, dressed with the momentum-boost phase, the kinetic action
//! phase and the eigenenergy phase. The x-axis functions are centred at
//! `q_c,x(t) − π/(2 k_L)` (the well sits a quarter wavelength left of the
//! origin), the y- and z-axis ones carry no static shift.

use std::f64::consts::PI;

use crate::lattice::HarmonicModel;
use crate::special::{factorial, hermite};
use crate::sta::ClassicalPath;
use crate::{CoreError, Result, C64};

/// Three 1D quantum numbers enumerating a 3D mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl ModeIndex {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Self {
        Self { nx, ny, nz }
    }

    /// Total quantum number `n = n_x + n_y + n_z`.
    pub fn total(&self) -> usize {
        self.nx + self.ny + self.nz
    }

    pub fn ground() -> Self {
        Self { nx: 0, ny: 0, nz: 0 }
    }
}

impl std::fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.nx, self.ny, self.nz)
    }
}

/// All modes with `1 <= n_x + n_y + n_z <= cutoff`, in deterministic order.
pub fn enumerate_modes(cutoff: usize) -> Vec<ModeIndex> {
    let mut out = Vec::new();
    for total in 1..=cutoff {
        for nx in (0..=total).rev() {
            for ny in (0..=(total - nx)).rev() {
                let nz = total - nx - ny;
                out.push(ModeIndex { nx, ny, nz });
            }
        }
    }
    out
}

/// Eigenenergy `E_n = Σ ω_u (n_u + 1/2) − m a_x² / (2 ω_x²)`.
pub fn mode_energy(n: ModeIndex, h: &HarmonicModel) -> f64 {
    h.omega[0] * (n.nx as f64 + 0.5) + h.omega[1] * (n.ny as f64 + 0.5)
        + h.omega[2] * (n.nz as f64 + 0.5)
        - h.mass * h.a_x * h.a_x / (2.0 * h.omega_sq[0])
}

fn phi_1d(n: usize, xi: f64, l: f64) -> Result<f64> {
    let norm = 1.0
        / (2f64.powi(n as i32) * factorial(n)?).sqrt()
        / (2.0 * PI * l * l).powf(0.25);
    Ok(norm * hermite(n, xi / (l * std::f64::consts::SQRT_2)) * (-xi * xi / (4.0 * l * l)).exp())
}

/// Complex amplitude `⟨r|Ψ_n(t)⟩` of a transport mode.
///
/// `paths` are the classical paths for the x and y axes of the same STA
/// design. Requires a confined z axis whenever `n_z` participates (3D use).
pub fn transport_mode(
    n: ModeIndex,
    h: &HarmonicModel,
    paths: &[ClassicalPath; 2],
    t: f64,
    r: [f64; 3],
) -> Result<C64> {
    if !(h.omega[2] > 0.0) {
        return Err(CoreError::NonConfining { axis: 'z', omega_sq: h.omega_sq[2] });
    }
    let qcx = paths[0].position(t);
    let qcy = paths[1].position(t);
    let vx = paths[0].velocity(t);
    let vy = paths[1].velocity(t);

    let xi_x = r[0] - qcx + PI / (2.0 * h.k_l);
    let xi_y = r[1] - qcy;
    let xi_z = r[2];

    let spatial = phi_1d(n.nx, xi_x, h.l[0])?
        * phi_1d(n.ny, xi_y, h.l[1])?
        * phi_1d(n.nz, xi_z, h.l[2])?;

    let action = 0.5 * h.mass * (paths[0].kinetic_action(t) + paths[1].kinetic_action(t));
    let energy_phase = -(mode_energy(n, h) * t + action);
    let boost = h.mass * (vx * r[0] + vy * r[1]);
    Ok(spatial * C64::new(0.0, energy_phase + boost).exp())
}
