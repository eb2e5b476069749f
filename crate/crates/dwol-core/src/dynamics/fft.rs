//! Strided 3D FFT on a flat x-fastest buffer, built on rustfft.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::C64;

pub struct Fft3 {
    n: [usize; 3],
    fwd: [Option<Arc<dyn Fft<f64>>>; 3],
    inv: [Option<Arc<dyn Fft<f64>>>; 3],
    scratch: Vec<C64>,
    line: Vec<C64>,
}

impl Fft3 {
    pub fn new(n: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let plan = |planner: &mut FftPlanner<f64>, len: usize, forward: bool| {
            if len > 1 {
                Some(if forward {
                    planner.plan_fft_forward(len)
                } else {
                    planner.plan_fft_inverse(len)
                })
            } else {
                None
            }
        };
        let fwd = [
            plan(&mut planner, n[0], true),
            plan(&mut planner, n[1], true),
            plan(&mut planner, n[2], true),
        ];
        let inv = [
            plan(&mut planner, n[0], false),
            plan(&mut planner, n[1], false),
            plan(&mut planner, n[2], false),
        ];
        let max_scratch = fwd
            .iter()
            .chain(inv.iter())
            .flatten()
            .map(|p| p.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        let max_line = n.iter().copied().max().unwrap_or(1);
        Self {
            n,
            fwd,
            inv,
            scratch: vec![C64::new(0.0, 0.0); max_scratch],
            line: vec![C64::new(0.0, 0.0); max_line],
        }
    }

    fn apply_axis(&mut self, data: &mut [C64], axis: usize, forward: bool) {
        let plan = if forward { self.fwd[axis].clone() } else { self.inv[axis].clone() };
        let Some(plan) = plan else { return };
        let [nx, ny, nz] = self.n;
        match axis {
            0 => {
                // contiguous lines
                plan.process_with_scratch(data, &mut self.scratch);
            }
            1 => {
                let line = &mut self.line[..ny];
                for k in 0..nz {
                    for i in 0..nx {
                        let base = i + nx * ny * k;
                        for (j, l) in line.iter_mut().enumerate() {
                            *l = data[base + nx * j];
                        }
                        plan.process_with_scratch(line, &mut self.scratch);
                        for (j, l) in line.iter().enumerate() {
                            data[base + nx * j] = *l;
                        }
                    }
                }
            }
            _ => {
                let line = &mut self.line[..nz];
                let stride = nx * ny;
                for j in 0..ny {
                    for i in 0..nx {
                        let base = i + nx * j;
                        for (k, l) in line.iter_mut().enumerate() {
                            *l = data[base + stride * k];
                        }
                        plan.process_with_scratch(line, &mut self.scratch);
                        for (k, l) in line.iter().enumerate() {
                            data[base + stride * k] = *l;
                        }
                    }
                }
            }
        }
    }

    pub fn forward(&mut self, data: &mut [C64]) {
        for axis in 0..3 {
            self.apply_axis(data, axis, true);
        }
    }

    /// Inverse transform, normalized so `inverse(forward(x)) == x`.
    pub fn inverse(&mut self, data: &mut [C64]) {
        for axis in 0..3 {
            self.apply_axis(data, axis, false);
        }
        let scale = 1.0 / (self.n[0] * self.n[1] * self.n[2]) as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let n = [8, 6, 4];
        let mut fft = Fft3::new(n);
        let mut data: Vec<C64> = (0..(8 * 6 * 4))
            .map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let orig = data.clone();
        fft.forward(&mut data);
        fft.inverse(&mut data);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn plane_wave_is_single_bin() {
        let n = [16, 1, 1];
        let mut fft = Fft3::new(n);
        // e^{+2πi 3 x/L} lands in forward bin 3 with the rustfft sign
        // convention (forward = e^{-ikx}).
        let mut data: Vec<C64> = (0..16)
            .map(|i| C64::new(0.0, 2.0 * std::f64::consts::PI * 3.0 * i as f64 / 16.0).exp())
            .collect();
        fft.forward(&mut data);
        for (i, c) in data.iter().enumerate() {
            if i == 3 {
                assert!((c.norm() - 16.0).abs() < 1e-10);
            } else {
                assert!(c.norm() < 1e-10, "bin {i} = {c}");
            }
        }
    }
}
