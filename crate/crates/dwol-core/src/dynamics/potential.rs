//! Potentials the propagator and the ground-state solver can run on.

use crate::lattice::{evaluate_potential, evaluate_potential_frozen, HarmonicModel, LatticeParams};

use super::grid::GridSpec;

/// Static potential evaluated in the comoving frame (the trap motion enters
/// through the kick factors, never through this table).
pub enum Potential<'a> {
    /// Full optical potential with z-dependent waists.
    FullDwol(&'a LatticeParams),
    /// Full optical potential with waists frozen at z = 0.
    FrozenDwol(&'a LatticeParams),
    /// The quadratic model (for the exactness checks of the shortcut).
    Harmonic(&'a HarmonicModel),
    /// Arbitrary user potential.
    Custom(&'a dyn Fn([f64; 3]) -> f64),
}

impl Potential<'_> {
    pub fn at(&self, r: [f64; 3]) -> f64 {
        match self {
            Potential::FullDwol(p) => evaluate_potential(r, p),
            Potential::FrozenDwol(p) => evaluate_potential_frozen(r, p),
            Potential::Harmonic(h) => h.potential(r),
            Potential::Custom(f) => f(r),
        }
    }

    pub fn mass(&self) -> f64 {
        match self {
            Potential::FullDwol(p) | Potential::FrozenDwol(p) => p.mass,
            Potential::Harmonic(h) => h.mass,
            Potential::Custom(_) => 1.0,
        }
    }

    /// Sample onto the grid in x-fastest order.
    pub fn sample(&self, grid: &GridSpec) -> Vec<f64> {
        let n = grid.n;
        let mut out = Vec::with_capacity(grid.len());
        for k in 0..n[2] {
            let z = grid.coord(2, k);
            for j in 0..n[1] {
                let y = grid.coord(1, j);
                for i in 0..n[0] {
                    let x = grid.coord(0, i);
                    out.push(self.at([x, y, z]));
                }
            }
        }
        out
    }
}
