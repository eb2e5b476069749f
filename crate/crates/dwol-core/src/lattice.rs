//! Double-well optical-lattice potential and its harmonic approximation.
//!
//! The potential is a sum of four dimensionless contributions: the in-plane
//! standing waves (`par`), the perpendicular-polarization double-well term
//! (`perp`), the out-of-plane lattice (`z`) and the in-plane/out-of-plane
//! cross term (`cr`). The harmonic model is the exact second-order Taylor
//! expansion about the well minimum at `x = -π/(2 k_L)`, `y = z = 0`; the
//! leading terms reduce to the usual analytic expressions when the
//! out-of-plane intensity vanishes.

use std::f64::consts::PI;

use crate::diag::Diagnostics;
use crate::{CoreError, Result};

/// In-plane axes that can carry transport.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }
}

/// Physical definition of the lattice. All quantities are in internal units
/// (`ħ = m_unit = 1`); the CLI converts tagged user input once at ingestion.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeParams {
    /// Lattice depth `U_d0` (energy; `u_d0 = depth_in_recoils * e_r`).
    pub u_d0: f64,
    /// Barrier-control angle, `0 <= beta <= π/2`.
    pub beta: f64,
    /// Tilt-control angle, `-π <= theta <= π`.
    pub theta: f64,
    /// Cross-term phase angle.
    pub phi: f64,
    /// Intensity ratio `I_z / I_xy >= 0`.
    pub xi_z: f64,
    /// In-plane laser wave number.
    pub k_l: f64,
    /// Out-of-plane laser wave number.
    pub k_z: f64,
    /// Transverse beam waists of the out-of-plane beam.
    pub w0x: f64,
    pub w0y: f64,
    /// Rayleigh lengths for the z-dependent waists.
    pub z_rx: f64,
    pub z_ry: f64,
    /// Atomic mass in internal units (1 by convention).
    pub mass: f64,
}

impl LatticeParams {
    /// Dimensionless baseline: `k_L = 1`, `m = 1`, depth given in recoil
    /// energies, waists and Rayleigh lengths in units of `1/k_L`.
    pub fn new(depth_recoils: f64, beta: f64, theta: f64, phi: f64, xi_z: f64) -> Self {
        let k_l = 1.0;
        let mass = 1.0;
        let e_r = k_l * k_l / (2.0 * mass);
        let w0 = 600.0 / k_l;
        let k_z = k_l;
        Self {
            u_d0: depth_recoils * e_r,
            beta,
            theta,
            phi,
            xi_z,
            k_l,
            k_z,
            w0x: w0,
            w0y: w0,
            z_rx: 0.5 * k_z * w0 * w0,
            z_ry: 0.5 * k_z * w0 * w0,
            mass,
        }
    }

    /// Recoil energy `ħ² k_L² / (2 m)`.
    pub fn recoil_energy(&self) -> f64 {
        self.k_l * self.k_l / (2.0 * self.mass)
    }

    /// Expansion point of the harmonic approximation.
    pub fn expansion_point(&self) -> [f64; 3] {
        [-PI / (2.0 * self.k_l), 0.0, 0.0]
    }

    /// Hard invariants. Regime warnings that need derived scales are emitted
    /// by [`harmonic_approximation`].
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.u_d0, self.beta, self.theta, self.phi, self.xi_z, self.k_l, self.k_z, self.w0x,
            self.w0y, self.z_rx, self.z_ry, self.mass,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(CoreError::InvalidParams("non-finite parameter".into()));
        }
        if self.u_d0 < 0.0 {
            return Err(CoreError::InvalidParams(format!("u_d0 = {} < 0", self.u_d0)));
        }
        // 1e-12 slack absorbs roundoff from expressions like PI/2 * (k/n).
        if self.beta < -1e-12 || self.beta > PI / 2.0 + 1e-12 {
            return Err(CoreError::InvalidParams(format!("beta = {} outside [0, π/2]", self.beta)));
        }
        if self.theta < -PI - 1e-12 || self.theta > PI + 1e-12 {
            return Err(CoreError::InvalidParams(format!("theta = {} outside [-π, π]", self.theta)));
        }
        if self.xi_z < 0.0 {
            return Err(CoreError::InvalidParams(format!("xi_z = {} < 0", self.xi_z)));
        }
        for (name, v) in [
            ("k_l", self.k_l),
            ("k_z", self.k_z),
            ("w0x", self.w0x),
            ("w0y", self.w0y),
            ("z_rx", self.z_rx),
            ("z_ry", self.z_ry),
            ("mass", self.mass),
        ] {
            if v <= 0.0 {
                return Err(CoreError::InvalidParams(format!("{name} = {v} must be > 0")));
            }
        }
        Ok(())
    }
}

/// z-dependent waists `w_u(z) = w_{u,0} √(1 + (z/Z_{R,u})²)`.
fn waists_at(p: &LatticeParams, z: f64) -> (f64, f64) {
    let wx = p.w0x * (1.0 + (z / p.z_rx).powi(2)).sqrt();
    let wy = p.w0y * (1.0 + (z / p.z_ry).powi(2)).sqrt();
    (wx, wy)
}

fn terms_with_waists(r: [f64; 3], p: &LatticeParams, wx: f64, wy: f64) -> [f64; 4] {
    let [x, y, z] = r;
    let cb = (0.5 * p.beta).cos();
    let sb = (0.5 * p.beta).sin();

    let u_par = cb * cb * ((2.0 * p.k_l * y).cos() - (2.0 * p.k_l * x).cos() + 2.0);

    let well = (p.k_l * y).cos() - (p.k_l * x - p.theta).sin();
    let u_perp = 2.0 * sb * sb * well * well;

    if p.xi_z == 0.0 {
        return [u_par, u_perp, 0.0, 0.0];
    }

    let ratio = p.w0x * p.w0y / (wx * wy);
    let gauss2 = (-2.0 * (x * x / (wx * wx) + y * y / (wy * wy))).exp();
    let cz = (p.k_z * z).cos();
    let u_z = p.xi_z * ratio * cz * cz * gauss2;

    let gauss1 = (-(x * x / (wx * wx) + y * y / (wy * wy))).exp();
    let trig = (0.5 * p.phi).cos() * (p.k_l * y).cos() - (0.5 * p.phi).sin() * (p.k_l * x).sin();
    let u_cr = 2.0 * p.xi_z.sqrt() * cb * ratio.sqrt() * gauss1 * cz * trig;

    [u_par, u_perp, u_z, u_cr]
}

/// The four dimensionless contributions `(Ũ_par, Ũ_perp, Ũ_z, Ũ_cr)`.
pub fn evaluate_potential_terms(r: [f64; 3], p: &LatticeParams) -> [f64; 4] {
    let (wx, wy) = waists_at(p, r[2]);
    terms_with_waists(r, p, wx, wy)
}

/// Full potential `U_D(r) = -U_d0 [Ũ_par + Ũ_perp + Ũ_z + Ũ_cr]`.
pub fn evaluate_potential(r: [f64; 3], p: &LatticeParams) -> f64 {
    let t = evaluate_potential_terms(r, p);
    -p.u_d0 * (t[0] + t[1] + t[2] + t[3])
}

/// Same potential with the waists frozen at their z = 0 values. This is the
/// form the correction integrals use; the difference is O((l_z/Z_R)²).
pub fn evaluate_potential_frozen(r: [f64; 3], p: &LatticeParams) -> f64 {
    let t = terms_with_waists(r, p, p.w0x, p.w0y);
    -p.u_d0 * (t[0] + t[1] + t[2] + t[3])
}

/// Quadratic model about the expansion point plus every derived scale the
/// rest of the toolkit needs.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicModel {
    /// Well depth `V_d0` of the quadratic model (leading order, positive).
    pub v_d0: f64,
    /// Trap frequencies (rad / time); `omega[2] = 0` when `xi_z = 0`.
    pub omega: [f64; 3],
    pub omega_sq: [f64; 3],
    /// Linear-term acceleration along x.
    pub a_x: f64,
    /// Zero-point lengths `l_u = √(ħ / 2 m ω_u)`; infinite on a free axis.
    pub l: [f64; 3],
    /// Oscillation periods `2π/ω_u`.
    pub t: [f64; 3],
    /// Recoil energy.
    pub e_r: f64,
    /// Copies used downstream.
    pub k_l: f64,
    pub mass: f64,
}

impl HarmonicModel {
    /// Quadratic-model potential (lab frame, trap at rest).
    pub fn potential(&self, r: [f64; 3]) -> f64 {
        let xt = r[0] + PI / (2.0 * self.k_l);
        -self.v_d0
            + self.mass * self.a_x * xt
            + 0.5
                * self.mass
                * (self.omega_sq[0] * xt * xt
                    + self.omega_sq[1] * r[1] * r[1]
                    + self.omega_sq[2] * r[2] * r[2])
    }
}

/// Exact first and second derivatives of `U_D` at the expansion point.
/// Off-diagonal second derivatives vanish there by symmetry.
fn expansion_derivatives(p: &LatticeParams) -> ([f64; 3], [f64; 3]) {
    let k = p.k_l;
    let x0 = -PI / (2.0 * k);
    let cb = (0.5 * p.beta).cos();
    let sb = (0.5 * p.beta).sin();
    let ct = p.theta.cos();
    let st = p.theta.sin();
    let c2t = (2.0 * p.theta).cos();
    let cph = (0.5 * p.phi).cos();
    let sph = (0.5 * p.phi).sin();
    let sqxi = p.xi_z.sqrt();
    let b0 = cph + sph;
    let e2 = (-2.0 * x0 * x0 / (p.w0x * p.w0x)).exp();
    let e1 = (-x0 * x0 / (p.w0x * p.w0x)).exp();
    let wx2 = p.w0x * p.w0x;
    let wy2 = p.w0y * p.w0y;

    // d/dx of the dimensionless terms at r0 (par contributes zero there).
    let d_perp = 4.0 * sb * sb * k * (1.0 + ct) * st;
    let d_z = p.xi_z * e2 * (-4.0 * x0 / wx2);
    let d_cr = 2.0 * sqxi * cb * b0 * e1 * (-2.0 * x0 / wx2);
    let grad_x = -p.u_d0 * (d_perp + d_z + d_cr);

    // d²/dx².
    let dxx_par = -4.0 * k * k * cb * cb;
    let dxx_perp = -4.0 * sb * sb * k * k * (ct + c2t);
    let dxx_z = p.xi_z * e2 * (16.0 * x0 * x0 / (wx2 * wx2) - 4.0 / wx2);
    let dxx_cr =
        2.0 * sqxi * cb * e1 * ((4.0 * x0 * x0 / (wx2 * wx2) - 2.0 / wx2) * b0 - sph * k * k);
    let hxx = -p.u_d0 * (dxx_par + dxx_perp + dxx_z + dxx_cr);

    // d²/dy².
    let dyy_par = -4.0 * k * k * cb * cb;
    let dyy_perp = -4.0 * sb * sb * k * k * (1.0 + ct);
    let dyy_z = p.xi_z * e2 * (-4.0 / wy2);
    let dyy_cr = 2.0 * sqxi * cb * e1 * (-2.0 * b0 / wy2 - cph * k * k);
    let hyy = -p.u_d0 * (dyy_par + dyy_perp + dyy_z + dyy_cr);

    // d²/dz² (the z curvature comes only from the out-of-plane terms).
    let ray = 1.0 / (p.z_rx * p.z_rx) + 1.0 / (p.z_ry * p.z_ry);
    let envz = x0 * x0 / (wx2 * p.z_rx * p.z_rx);
    let dzz_z = p.xi_z * e2 * (-2.0 * p.k_z * p.k_z - ray + 4.0 * envz);
    let dzz_cr = 2.0 * sqxi * cb * b0 * e1 * (-p.k_z * p.k_z - 0.5 * ray + 2.0 * envz);
    let hzz = -p.u_d0 * (dzz_z + dzz_cr);

    ([grad_x, 0.0, 0.0], [hxx, hyy, hzz])
}

/// Build the harmonic model, rejecting inverted wells.
///
/// With `xi_z = 0` the z axis is free (`ω_z = 0`); that is accepted so the
/// in-plane reductions keep working, and any 3D use must check `omega[2]`.
pub fn harmonic_approximation(p: &LatticeParams, diag: &mut Diagnostics) -> Result<HarmonicModel> {
    p.validate()?;
    let (grad, hess) = expansion_derivatives(p);
    let omega_sq = [hess[0] / p.mass, hess[1] / p.mass, hess[2] / p.mass];

    for (axis, &w2) in ['x', 'y'].iter().zip(&omega_sq) {
        if w2 <= 0.0 {
            return Err(CoreError::NonConfining { axis: *axis, omega_sq: w2 });
        }
    }
    if p.xi_z > 0.0 && omega_sq[2] <= 0.0 {
        return Err(CoreError::NonConfining { axis: 'z', omega_sq: omega_sq[2] });
    }

    let omega = [omega_sq[0].sqrt(), omega_sq[1].sqrt(), omega_sq[2].max(0.0).sqrt()];
    let l = [
        1.0 / (2.0 * p.mass * omega[0]).sqrt(),
        1.0 / (2.0 * p.mass * omega[1]).sqrt(),
        if omega[2] > 0.0 { 1.0 / (2.0 * p.mass * omega[2]).sqrt() } else { f64::INFINITY },
    ];
    let t = [
        2.0 * PI / omega[0],
        2.0 * PI / omega[1],
        if omega[2] > 0.0 { 2.0 * PI / omega[2] } else { f64::INFINITY },
    ];

    let cb = (0.5 * p.beta).cos();
    let sb = (0.5 * p.beta).sin();
    let ct2 = (0.5 * p.theta).cos();
    let v_d0 = 4.0 * p.u_d0 * (cb * cb + 2.0 * ct2.powi(4) * sb * sb);

    // Regime warnings now that the zero-point lengths exist.
    let ratio = (p.w0x / l[0]).min(p.w0y / l[1]);
    if p.xi_z > 0.05 * ratio {
        diag.warn(
            "xi-z-large",
            format!("xi_z = {:.3e} not small against w0/l = {:.3e}; cross term is not a small disturbance", p.xi_z, ratio),
        );
    }
    if p.w0x * p.k_z < 10.0 || p.w0y * p.k_z < 10.0 {
        diag.warn(
            "paraxial",
            format!("waists ({:.3e}, {:.3e}) not large against 1/k_z = {:.3e}", p.w0x, p.w0y, 1.0 / p.k_z),
        );
    }

    Ok(HarmonicModel {
        v_d0,
        omega,
        omega_sq,
        a_x: grad[0] / p.mass,
        l,
        t,
        e_r: p.recoil_energy(),
        k_l: p.k_l,
        mass: p.mass,
    })
}

/// Largest tilt acceleration `a` for which `U_D + m a r_axis` still has a
/// local minimum on a line scan through the expansion point. Bisection over
/// `a` with a dense scan over two lattice periods.
pub fn critical_acceleration(p: &LatticeParams, axis: Axis) -> f64 {
    if p.u_d0 == 0.0 {
        return 0.0;
    }
    let r0 = p.expansion_point();
    let period = 2.0 * PI / p.k_l;
    let n = 4097;
    let has_min = |a: f64| -> bool {
        let mut prev2 = f64::NAN;
        let mut prev = f64::NAN;
        for i in 0..n {
            let s = -period + 2.0 * period * i as f64 / (n - 1) as f64;
            let mut r = r0;
            r[axis.index()] += s;
            let g = evaluate_potential(r, p) + p.mass * a * s;
            if i >= 2 && prev < prev2 && prev < g {
                return true;
            }
            prev2 = prev;
            prev = g;
        }
        false
    };

    let mut lo = 0.0;
    let mut hi = p.u_d0 * p.k_l / p.mass;
    let mut guard = 0;
    while has_min(hi) {
        lo = hi;
        hi *= 2.0;
        guard += 1;
        if guard > 60 {
            return hi;
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if has_min(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
