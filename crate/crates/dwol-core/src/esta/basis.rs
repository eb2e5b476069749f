//! Cardinal basis for the trajectory correction.
//!
//! The correction to the trap path is expanded over six per-axis basis
//! polynomials `g_j(s)` pinned at the knots `s_j = j/7` and clamped at both
//! endpoints (value and derivatives 1..4 vanish). Sixteen conditions make
//! the degree-11 ansatz overdetermined; the default basis solves the exactly
//! determined degree-15 system through the factorization
//! `g_j(s) = s⁵ (1-s)⁵ L_j(s)` with `L_j` the Lagrange cardinal polynomial on
//! the knots, rescaled so `g_j(s_k) = δ_jk`. A least-squares degree-11 mode
//! is kept for comparison.

use crate::poly::{ClampedPoly, Poly};
use crate::{CoreError, Result};

pub const KNOTS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Exactly determined, degree 15.
    Exact15,
    /// Least-squares fit of the printed degree-11 ansatz.
    LeastSquares11,
}

#[derive(Debug, Clone)]
pub struct CorrectionBasis {
    pub kind: BasisKind,
    pub degree: usize,
    /// Cardinal polynomials in `s = t/t_f`.
    pub polys: [ClampedPoly; KNOTS],
    /// Largest stored coefficient magnitude (conditioning record).
    pub coefficient_scale: f64,
}

/// Knot positions `j/7`, `j = 1..6`.
pub fn knot_positions() -> [f64; KNOTS] {
    core::array::from_fn(|j| (j as f64 + 1.0) / 7.0)
}

impl CorrectionBasis {
    pub fn exact() -> Self {
        let s = knot_positions();
        let clamp = |x: f64| x.powi(5) * (1.0 - x).powi(5);
        let mut polys: [ClampedPoly; KNOTS] = core::array::from_fn(|_| ClampedPoly::zero());
        for j in 0..KNOTS {
            let others: Vec<f64> = (0..KNOTS).filter(|&k| k != j).map(|k| s[k]).collect();
            let mut lagrange = Poly::from_roots(&others);
            let denom: f64 = others.iter().map(|&sk| s[j] - sk).product();
            lagrange = lagrange.scale(1.0 / (denom * clamp(s[j])));
            polys[j] = ClampedPoly::new(true, lagrange);
        }
        let coefficient_scale = polys
            .iter()
            .flat_map(|p| p.r.c.iter())
            .fold(0.0_f64, |m, &c| m.max(c.abs()));
        Self { kind: BasisKind::Exact15, degree: 15, polys, coefficient_scale }
    }

    /// Least-squares degree-11 variant.
    ///
    /// The ten homogeneous boundary conditions are kept exact through the
    /// `s⁵(1-s)⁵` factor; that leaves `g_j = s⁵(1-s)⁵ (a_j + b_j s)` with two
    /// parameters against six knot conditions, fitted in least squares. The
    /// knot residual this leaves behind is the point of the comparison with
    /// the exactly determined degree-15 basis.
    pub fn least_squares() -> Result<Self> {
        let degree = 11;
        let s = knot_positions();
        let clamp = |x: f64| x.powi(5) * (1.0 - x).powi(5);
        let mut polys: [ClampedPoly; KNOTS] = core::array::from_fn(|_| ClampedPoly::zero());
        for j in 0..KNOTS {
            // min Σ_k [clamp(s_k)(a + b s_k) − δ_jk]²
            let mut ata = [[0.0f64; 2]; 2];
            let mut atb = [0.0f64; 2];
            for (k, &sk) in s.iter().enumerate() {
                let c = clamp(sk);
                let row = [c, c * sk];
                let y = if k == j { 1.0 } else { 0.0 };
                for p in 0..2 {
                    atb[p] += row[p] * y;
                    for q in 0..2 {
                        ata[p][q] += row[p] * row[q];
                    }
                }
            }
            let det = ata[0][0] * ata[1][1] - ata[0][1] * ata[1][0];
            if det.abs() < 1e-30 {
                return Err(CoreError::SingularSystem { degree });
            }
            let a = (atb[0] * ata[1][1] - atb[1] * ata[0][1]) / det;
            let b = (ata[0][0] * atb[1] - ata[1][0] * atb[0]) / det;
            polys[j] = ClampedPoly::new(true, Poly::new(vec![a, b]));
        }
        let coefficient_scale = polys
            .iter()
            .flat_map(|p| p.r.c.iter())
            .fold(0.0_f64, |m, &c| m.max(c.abs()));
        Ok(Self { kind: BasisKind::LeastSquares11, degree, polys, coefficient_scale })
    }

    pub fn eval(&self, j: usize, s: f64) -> f64 {
        self.polys[j].value(s)
    }
}
