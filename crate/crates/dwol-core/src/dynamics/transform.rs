//! Generalized Galilean transformation between lab and comoving frames.
//!
//! The comoving field is the lab field shifted by the trap position (a
//! momentum-space phase ramp) and boosted by the trap velocity (a
//! position-space phase). At the trajectory endpoints the boost vanishes
//! and the transform reduces to the shift alone.

use crate::sta::{Axis, Trajectory};
use crate::{CoreError, Result, C64};

use super::fft::Fft3;
use super::grid::{Frame, WaveField};

fn shift_and_boost(field: &WaveField, q0: [f64; 2], v0: [f64; 2], to: Frame) -> WaveField {
    let mut out = field.clone();
    let grid = &out.grid;
    let mut fft = Fft3::new(grid.n);

    // coordinate shift: ψ(r) → ψ(r + q0)
    fft.forward(&mut out.data);
    let kx = grid.wavenumbers(0);
    let ky = grid.wavenumbers(1);
    let [nx, ny, nz] = grid.n;
    let ramp_x: Vec<C64> = kx.iter().map(|&k| C64::new(0.0, k * q0[0]).exp()).collect();
    let ramp_y: Vec<C64> = ky.iter().map(|&k| C64::new(0.0, k * q0[1]).exp()).collect();
    let mut idx = 0;
    for _k in 0..nz {
        for j in 0..ny {
            let fy = ramp_y[j];
            for i in 0..nx {
                out.data[idx] *= fy * ramp_x[i];
                idx += 1;
            }
        }
    }
    fft.inverse(&mut out.data);

    // velocity boost: × exp(-i m r·v0)
    let mass = 1.0; // internal units; the mass enters through v0 scaling by callers
    let bx: Vec<C64> = (0..nx)
        .map(|i| C64::new(0.0, -mass * grid.coord(0, i) * v0[0]).exp())
        .collect();
    let by: Vec<C64> = (0..ny)
        .map(|j| C64::new(0.0, -mass * grid.coord(1, j) * v0[1]).exp())
        .collect();
    let mut idx = 0;
    for _k in 0..nz {
        for j in 0..ny {
            let fy = by[j];
            for i in 0..nx {
                out.data[idx] *= fy * bx[i];
                idx += 1;
            }
        }
    }
    out.frame = to;
    out
}

/// Lab-frame field into the comoving frame at time `t`.
pub fn comoving_transform(psi: &WaveField, traj: &Trajectory, t: f64, mass: f64) -> Result<WaveField> {
    if psi.frame != Frame::Lab {
        return Err(CoreError::FrameMismatch {
            expected: Frame::Lab.as_str(),
            found: psi.frame.as_str(),
        });
    }
    let q0 = [traj.position(Axis::X, t), traj.position(Axis::Y, t)];
    let v0 = [
        mass * traj.velocity(Axis::X, t),
        mass * traj.velocity(Axis::Y, t),
    ];
    Ok(shift_and_boost(psi, q0, v0, Frame::Comoving))
}

/// Inverse transform back to the lab frame.
pub fn lab_transform(phi: &WaveField, traj: &Trajectory, t: f64, mass: f64) -> Result<WaveField> {
    if phi.frame != Frame::Comoving {
        return Err(CoreError::FrameMismatch {
            expected: Frame::Comoving.as_str(),
            found: phi.frame.as_str(),
        });
    }
    let q0 = [traj.position(Axis::X, t), traj.position(Axis::Y, t)];
    let v0 = [
        mass * traj.velocity(Axis::X, t),
        mass * traj.velocity(Axis::Y, t),
    ];
    // undo the boost, then shift back
    let unboosted = shift_and_boost(phi, [0.0, 0.0], [-v0[0], -v0[1]], Frame::Comoving);
    let mut out = shift_and_boost(&unboosted, [-q0[0], -q0[1]], [0.0, 0.0], Frame::Lab);
    out.time = phi.time;
    Ok(out)
}
