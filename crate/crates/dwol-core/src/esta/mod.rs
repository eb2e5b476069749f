//! Enhanced-STA correction: transport modes, closed-form Hermite–Gauss
//! integrals, the auxiliary functions `G_n` / `K_n`, the optimal correction
//! vector and the corrected trajectory. The [`oracle`] submodule carries the
//! brute-force quadrature route used to verify the closed forms.

pub mod basis;
pub mod correction;
pub mod modes;
pub mod oracle;
pub mod primitives;

pub use basis::{knot_positions, BasisKind, CorrectionBasis, KNOTS};
pub use correction::{
    corrected_trajectory, design_esta, epsilon_from, esta_correction, g_n, k_n, ControlVector,
    EstaContext, EstaCorrection, ModeContribution,
};
pub use modes::{enumerate_modes, mode_energy, transport_mode, ModeIndex};

#[cfg(test)]
mod tests {
    use super::oracle::{g_n_bruteforce, k_n_bruteforce, OracleConfig};
    use super::*;
    use crate::diag::Diagnostics;
    use crate::lattice::{harmonic_approximation, HarmonicModel, LatticeParams};
    use crate::quad::QuadConfig;
    use crate::sta::{design_sta, Axis, Direction, Trajectory, TransportSpec};
    use crate::C64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn setup(
        depth: f64,
        xi_z: f64,
        tfs: f64,
    ) -> (LatticeParams, HarmonicModel, Trajectory, CorrectionBasis) {
        let p = LatticeParams::new(depth, 3.0 * PI / 20.0, PI / 2.0, PI / 2.0, xi_z);
        let h = harmonic_approximation(&p, &mut Diagnostics::new()).unwrap();
        let spec = TransportSpec {
            direction: Direction::X,
            distance: 158.0 * h.l[0],
            t_f: tfs * h.t[0],
        };
        let traj = design_sta(&spec, &h).unwrap();
        let basis = CorrectionBasis::exact();
        (p, h, traj, basis)
    }

    #[test]
    fn selection_rules() {
        // No out-of-plane lattice: every mode with n_z > 0 decouples.
        let (p, h, traj, basis) = setup(300.0, 0.0, 4.0);
        let ctx = EstaContext::new(&p, &h, &traj, &basis).unwrap();
        for nz in [1usize, 2, 3] {
            let g = g_n(&ctx, ModeIndex::new(0, 0, nz)).unwrap();
            assert_eq!(g, C64::new(0.0, 0.0));
        }
        // With the lattice on, odd n_z is still parity-forbidden.
        let (p, h, traj, basis) = setup(300.0, 0.05, 4.0);
        let ctx = EstaContext::new(&p, &h, &traj, &basis).unwrap();
        for (nx, nz) in [(0usize, 1usize), (1, 1), (0, 3)] {
            let g = g_n(&ctx, ModeIndex::new(nx, 0, nz)).unwrap();
            assert!(g.norm() < 1e-12, "G({nx},0,{nz}) = {g}");
            let k = k_n(&ctx, ModeIndex::new(nx, 0, nz)).unwrap();
            assert!(k.iter().all(|c| c.norm() < 1e-12));
        }
    }

    #[test]
    fn epsilon_arithmetic() {
        // Synthetic single mode: G = 1, K = (1, 0, ..., 0) → ε = (-1, 0, ...).
        let mut k = [C64::new(0.0, 0.0); 12];
        k[0] = C64::new(1.0, 0.0);
        let modes = vec![ModeContribution {
            index: ModeIndex::new(1, 0, 0),
            g: C64::new(1.0, 0.0),
            k,
        }];
        let (eps, sum_g2, degenerate) = epsilon_from(&modes);
        assert!(!degenerate);
        assert_eq!(sum_g2, 1.0);
        assert!((eps.0[0] + 1.0).abs() < 1e-15);
        assert!(eps.0[1..].iter().all(|&v| v == 0.0));

        // All G = 0 → ε = 0 (0/0 convention).
        let modes = vec![ModeContribution {
            index: ModeIndex::new(1, 0, 0),
            g: C64::new(0.0, 0.0),
            k,
        }];
        let (eps, _, degenerate) = epsilon_from(&modes);
        assert!(!degenerate);
        assert_eq!(eps.0, [0.0; 12]);

        // Nonzero G with vanishing gradient is the degenerate case.
        let modes = vec![ModeContribution {
            index: ModeIndex::new(1, 0, 0),
            g: C64::new(0.5, 0.0),
            k: [C64::new(0.0, 0.0); 12],
        }];
        let (eps, _, degenerate) = epsilon_from(&modes);
        assert!(degenerate);
        assert_eq!(eps.0, [0.0; 12]);
    }

    /// The decisive correctness property: closed-form G and K against the
    /// brute-force quadrature of their defining integrals. The full random
    /// sweep lives in the acceptance suite; this is the standard point.
    #[test]
    fn oracle_equivalence_standard_point() {
        let (p, h, traj, basis) = setup(300.0, 0.05, 4.0);
        let mut ctx = EstaContext::new(&p, &h, &traj, &basis).unwrap();
        ctx.quad = QuadConfig { abs_tol: 1e-13, rel_tol: 1e-11, max_panels: 1 << 15 };
        let oracle_cfg = OracleConfig::default();

        for n in [ModeIndex::new(1, 0, 0), ModeIndex::new(0, 1, 0), ModeIndex::new(0, 0, 2)] {
            let g_closed = g_n(&ctx, n).unwrap();
            let g_oracle = g_n_bruteforce(&ctx, n, &oracle_cfg).unwrap();
            let tol = 1e-5 * g_oracle.norm().max(1e-9 * p.u_d0);
            assert!(
                (g_closed - g_oracle).norm() <= tol,
                "G{n}: closed {g_closed} vs oracle {g_oracle}"
            );

            let k_closed = k_n(&ctx, n).unwrap();
            let k_oracle = k_n_bruteforce(&ctx, n, &oracle_cfg).unwrap();
            let scale = k_oracle.iter().map(|c| c.norm()).fold(0.0, f64::max);
            for j in 0..12 {
                let tol = 1e-5 * k_oracle[j].norm().max(1e-4 * scale);
                assert!(
                    (k_closed[j] - k_oracle[j]).norm() <= tol,
                    "K{n}[{j}]: closed {} vs oracle {}",
                    k_closed[j],
                    k_oracle[j]
                );
            }
        }
    }

    #[test]
    fn corrected_trajectory_preserves_endpoints() {
        let (_p, h, traj, basis) = setup(300.0, 0.05, 4.0);
        let _ = h;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t_f = traj.t_f;
        for _ in 0..25 {
            let eps = ControlVector(core::array::from_fn(|_| rng.gen_range(-0.5..0.5)));
            let corrected = corrected_trajectory(&traj, &basis, &eps, 2);
            let d = corrected.distance[0];
            assert!(corrected.position(Axis::X, 0.0).abs() <= 1e-12 * d);
            assert!((corrected.position(Axis::X, t_f) - d).abs() <= 1e-12 * d);
            assert!(corrected.velocity(Axis::X, 0.0).abs() <= 1e-11 * d / t_f);
            assert!(corrected.velocity(Axis::X, t_f).abs() <= 1e-11 * d / t_f);
            assert!(corrected.acceleration(Axis::X, 0.0).abs() <= 1e-10 * d / (t_f * t_f));
            assert!(corrected.acceleration(Axis::X, t_f).abs() <= 1e-10 * d / (t_f * t_f));
            // knot-value semantics: q(s_j) = q_sta(s_j) + ε_j
            for (j, &s) in knot_positions().iter().enumerate() {
                let want = traj.position(Axis::X, s * t_f) + eps.0[j];
                let got = corrected.position(Axis::X, s * t_f);
                assert!((got - want).abs() <= 1e-9 * (1.0 + d), "knot {j}");
            }
        }
    }

    #[test]
    fn zero_correction_is_identity() {
        let (_p, _h, traj, basis) = setup(300.0, 0.05, 4.0);
        let corrected = corrected_trajectory(&traj, &basis, &ControlVector::zeros(), 2);
        for k in 0..=40 {
            let t = traj.t_f * k as f64 / 40.0;
            assert_eq!(corrected.position(Axis::X, t), traj.position(Axis::X, t));
            assert_eq!(corrected.velocity(Axis::X, t), traj.velocity(Axis::X, t));
        }
    }

    /// Cut-off stability: N = 1 already carries most of the correction.
    #[test]
    fn cutoff_comparison() {
        let (p, h, traj, basis) = setup(1500.0, 0.05, 3.0);
        let ctx = EstaContext::new(&p, &h, &traj, &basis).unwrap();
        let mut diag = Diagnostics::new();
        let c1 = esta_correction(&ctx, 1, &mut diag).unwrap();
        let c2 = esta_correction(&ctx, 2, &mut diag).unwrap();
        let n1 = c1.epsilon.norm();
        let n2 = c2.epsilon.norm();
        assert!(n2 > 0.0);
        let diff: f64 = c1
            .epsilon
            .0
            .iter()
            .zip(&c2.epsilon.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        println!("|eps(N=1)| = {n1:.6e}, |eps(N=2)| = {n2:.6e}, rel diff = {:.3e}", diff / n2);
        assert!(diff <= 0.5 * n2, "N=1 and N=2 corrections disagree badly");
    }
}
