//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers. Run with `cargo test --test acceptance -- --nocapture`.

use std::f64::consts::PI;

use dwol_cli::verify::{self, model_of, standard_params};
use dwol_core::diag::Diagnostics;
use dwol_core::dynamics::{
    ite_ground_state, propagate, GridSpec, InitialGuess, IteConfig, Potential,
    PropagationConfig, Propagator, WaveField,
};
use dwol_core::esta::{corrected_trajectory, design_esta, ControlVector, CorrectionBasis};
use dwol_core::lattice::HarmonicModel;
use dwol_core::sta::{classical_path, design_sta, Axis, Direction, TransportSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(criterion: &str, passed: bool, detail: &str) {
    println!("criterion {criterion}: {} — {detail}", if passed { "PASS" } else { "FAIL" });
    assert!(passed, "criterion {criterion} failed: {detail}");
}

/// Criterion 1 — LRI exactness: harmonic potential + STA trajectory on a
/// 512-point 1D grid returns the ground state at every transport time.
/// Criterion 5 (norm drift <= 1e-10) is checked on the same runs.
#[test]
fn criterion_1_lri_exactness_and_5_norm_drift() {
    let checks = verify::harmonic_suite().expect("harmonic suite");
    for c in &checks {
        println!("  {}", verify::format_check(c));
    }
    let all = checks.iter().all(|c| c.passed);
    report("1 (LRI exactness)", all, "fidelity >= 1 - 1e-4 at t_f in {2,4,8} T_x, <= 10 s per case");
    let drift_ok = checks
        .iter()
        .filter(|c| c.name.starts_with("norm_drift"))
        .all(|c| c.passed);
    report("5 (norm conservation)", drift_ok, "cumulative norm drift <= 1e-10 on full transport runs");
}

/// Criterion 2 — closed-form G_n/K_n against brute-force space-time
/// quadrature (relative 1e-5) and the 1D Hermite primitives against 1D
/// quadrature (relative 1e-8).
#[test]
fn criterion_2_appendix_correctness() {
    let t0 = std::time::Instant::now();
    let hermite = verify::hermite_suite(7).expect("hermite suite");
    for c in &hermite {
        println!("  {}", verify::format_check(c));
    }
    let gnkn = verify::gnkn_suite(7, 20).expect("gnkn suite");
    for c in &gnkn {
        println!("  {}", verify::format_check(c));
    }
    let wall = t0.elapsed().as_secs_f64();
    let all = hermite.iter().chain(&gnkn).all(|c| c.passed);
    report(
        "2 (appendix integrals)",
        all && wall < 1200.0,
        &format!("20 randomized draws x 9 modes, wall = {wall:.0}s (budget 1200s)"),
    );
}

/// Criterion 3 — global-error order of the stepping scheme in [1.8, 2.2].
#[test]
fn criterion_3_scheme_order() {
    let t0 = std::time::Instant::now();
    let checks = verify::order_suite().expect("order suite");
    for c in &checks {
        println!("  {}", verify::format_check(c));
    }
    let wall = t0.elapsed().as_secs_f64();
    report(
        "3 (second-order scheme)",
        checks.iter().all(|c| c.passed) && wall < 120.0,
        &format!("order = {:.3}, wall = {wall:.0}s (budget 120s)", checks[0].value),
    );
}

/// Criterion 4 — ITE energies: harmonic + linear on 128³ to relative 1e-6,
/// and the bimodal double-well density at 300 E_R.
#[test]
fn criterion_4_ite_energy_and_bimodality() {
    let t0 = std::time::Instant::now();
    let checks = verify::ite_suite().expect("ite suite");
    for c in &checks {
        println!("  {}", verify::format_check(c));
    }
    let wall = t0.elapsed().as_secs_f64();
    report(
        "4 (ITE ground states)",
        checks.iter().all(|c| c.passed) && wall < 600.0,
        &format!("wall = {wall:.0}s (budget 600s)"),
    );
}

fn transport_fidelity(
    ground: &WaveField,
    prop: &mut Propagator,
    traj: &dwol_core::sta::Trajectory,
) -> (f64, f64) {
    let cfg = PropagationConfig { boundary_abort: false, ..Default::default() };
    let (fin, stats) = propagate(prop, ground, traj, &cfg).expect("propagation");
    (ground.fidelity(&fin).expect("fidelity"), stats.norm_drift)
}

/// Shared 2D reduction at depth `u` (recoils): grid, potential and the
/// single-well initial packet the transport moves.
fn reduction_2d(
    depth: f64,
    x_window_lx: f64,
) -> (dwol_core::lattice::LatticeParams, HarmonicModel, GridSpec, WaveField) {
    let p = standard_params(depth, 0.0);
    let h = model_of(&p).unwrap();
    let x0 = p.expansion_point()[0];
    let grid = GridSpec::centered(
        [x0, 0.0, 0.0],
        [x_window_lx * h.l[0], 60.0 * h.l[1], 1.0],
        [256, 256, 1],
    );
    let pot = Potential::FullDwol(&p);
    let guess = InitialGuess::Gaussian {
        center: [x0 - h.a_x / h.omega_sq[0], 0.0, 0.0],
        widths: [h.l[0], h.l[1], 1.0],
    };
    let ite = IteConfig { tol_energy: 1e-9, ..Default::default() };
    let (ground, _, _) = ite_ground_state(&pot, &grid, &ite, &guess).expect("ITE");
    (p, h, grid, ground)
}

/// Breakdown onset: first upward crossing of fidelity through 0.5 on the
/// t_f grid, linearly interpolated; `None` when fidelity never collapses.
fn onset_from_scan(tfs: &[f64], fids: &[f64]) -> Option<f64> {
    for w in 0..tfs.len() - 1 {
        if fids[w] < 0.5 && fids[w + 1] >= 0.5 {
            let frac = (0.5 - fids[w]) / (fids[w + 1] - fids[w]);
            return Some(tfs[w] + frac * (tfs[w + 1] - tfs[w]));
        }
    }
    None
}

/// Criterion 6 — reduced-grid fidelity trend: collapse below 0.5 at the
/// short end, and the deeper lattice breaks down at smaller t_f (paper
/// onsets 3.8 and 3.3 T_x, ±0.5 tolerance).
#[test]
fn criterion_6_breakdown_trend() {
    let t0 = std::time::Instant::now();
    let tf_grid: Vec<f64> = (0..8).map(|k| 3.0 + 2.0 * k as f64 / 7.0).collect();
    let mut onsets = Vec::new();
    let mut short_end = Vec::new();
    for depth in [50.0, 150.0] {
        let (p, h, grid, ground) = reduction_2d(depth, 140.0);
        let pot = Potential::FullDwol(&p);
        let mut fids = Vec::new();
        for &tfs in &tf_grid {
            let spec = TransportSpec {
                direction: Direction::X,
                distance: 158.0 * h.l[0],
                t_f: tfs * h.t[0],
            };
            let traj = design_sta(&spec, &h).expect("design");
            let mut prop = Propagator::new(grid.clone(), &pot).expect("propagator");
            let (f, _) = transport_fidelity(&ground, &mut prop, &traj);
            println!("  U = {depth} E_R, t_f = {tfs:.3} T_x: F = {f:.4}");
            fids.push(f);
        }
        short_end.push(fids[0]);
        onsets.push(onset_from_scan(&tf_grid, &fids));
    }
    let wall = t0.elapsed().as_secs_f64();
    let collapse = short_end.iter().all(|&f| f < 0.5);
    report(
        "6a (short-end collapse)",
        collapse,
        &format!("F(3 T_x) = {short_end:?} (both < 0.5)"),
    );
    let (Some(o50), Some(o150)) = (onsets[0], onsets[1]) else {
        report("6b (onset ordering)", false, &format!("missing onset: {onsets:?}"));
        return;
    };
    let ordered = o150 < o50;
    let located = (o50 - 3.8).abs() <= 0.5 && (o150 - 3.3).abs() <= 0.5;
    report(
        "6b (onset ordering)",
        ordered && located && wall < 2700.0,
        &format!(
            "onset(50 E_R) = {o50:.2} T_x (paper ~3.8), onset(150 E_R) = {o150:.2} T_x (paper ~3.3), wall = {wall:.0}s"
        ),
    );
}

/// Criterion 7 — eSTA superiority at depth: ordering at t_f in {3.0, 3.25}
/// T_x and the margin at the point where STA drops below 0.9.
#[test]
fn criterion_7_esta_superiority() {
    let t0 = std::time::Instant::now();
    let (p, h, grid, ground) = reduction_2d(1500.0, 160.0);
    let pot = Potential::FullDwol(&p);
    let basis = CorrectionBasis::exact();
    let mut rows = Vec::new();
    for tfs in [3.0f64, 3.25] {
        let spec = TransportSpec {
            direction: Direction::X,
            distance: 158.0 * h.l[0],
            t_f: tfs * h.t[0],
        };
        let sta = design_sta(&spec, &h).expect("design");
        let mut diag = Diagnostics::new();
        let (esta, corr) =
            design_esta(&spec, &p, &h, 2, &basis, &mut diag).expect("esta design");
        let mut prop = Propagator::new(grid.clone(), &pot).expect("propagator");
        let (f_sta, _) = transport_fidelity(&ground, &mut prop, &sta);
        let (f_esta, _) = transport_fidelity(&ground, &mut prop, &esta);
        println!(
            "  t_f = {tfs} T_x: F_sta = {f_sta:.5}, F_esta = {f_esta:.5} (estimate {:.4})",
            corr.fidelity_estimate
        );
        rows.push((tfs, f_sta, f_esta));
    }
    let wall = t0.elapsed().as_secs_f64();
    let ordering = rows.iter().all(|&(_, s, e)| e >= s);
    report(
        "7a (eSTA >= STA ordering)",
        ordering,
        &format!("{rows:?}, wall = {wall:.0}s"),
    );
    // the margin applies at t_f = 3.25 T_x, the point where STA has dropped
    // below 0.9 while the correction still rescues the transport
    let (_, f_sta, f_esta) = rows.iter().cloned().find(|&(t, _, _)| t == 3.25).unwrap();
    report(
        "7b (margin where STA falls below 0.9)",
        f_esta >= 0.85 && f_sta <= f_esta - 0.02,
        &format!("F_esta = {f_esta:.4} (>= 0.85), F_sta = {f_sta:.4} (<= F_esta - 0.02)"),
    );
}

/// Criterion 8 — trajectory contracts: endpoint conditions exact, the
/// forced-oscillator residual at the 1e-10 scale, and corrections that
/// preserve every endpoint condition; 1000 randomized draws.
#[test]
fn criterion_8_trajectory_contracts() {
    let t0 = std::time::Instant::now();
    let p = standard_params(300.0, 0.05);
    let h = model_of(&p).unwrap();
    let basis = CorrectionBasis::exact();
    let mut rng = ChaCha8Rng::seed_from_u64(987);
    let mut worst_endpoint = 0.0f64;
    let mut worst_residual = 0.0f64;
    for _ in 0..1000 {
        // random scale-free draw: omega through a random depth-like factor
        let t_f = rng.gen_range(0.3..10.0) * h.t[0];
        let d = rng.gen_range(0.5..400.0);
        let spec = TransportSpec { direction: Direction::X, distance: d, t_f };
        let traj = design_sta(&spec, &h).unwrap();

        let e0 = traj.position(Axis::X, 0.0).abs() / d;
        let e1 = (traj.position(Axis::X, t_f) - d).abs() / d;
        let v0 = traj.velocity(Axis::X, 0.0).abs() * t_f / d;
        let v1 = traj.velocity(Axis::X, t_f).abs() * t_f / d;
        let a0 = traj.acceleration(Axis::X, 0.0).abs() * t_f * t_f / d;
        let a1 = traj.acceleration(Axis::X, t_f).abs() * t_f * t_f / d;
        worst_endpoint = worst_endpoint.max(e0).max(e1).max(v0).max(v1).max(a0).max(a1);

        let qc = classical_path(&traj, &h, Axis::X).unwrap();
        for k in 0..=50 {
            let t = t_f * k as f64 / 50.0;
            let res = qc.acceleration(t) + h.omega_sq[0] * (qc.position(t) - traj.position(Axis::X, t))
                + h.a_x;
            worst_residual = worst_residual.max(res.abs() / (d * h.omega_sq[0]));
        }

        // corrected trajectories keep the endpoint conditions bit-exactly
        let eps = ControlVector(core::array::from_fn(|_| rng.gen_range(-0.2..0.2) * d * 0.01));
        let corrected = corrected_trajectory(&traj, &basis, &eps, 2);
        let c0 = corrected.position(Axis::X, 0.0).abs() / d;
        let c1 = (corrected.position(Axis::X, t_f) - d).abs() / d;
        let cv = corrected.velocity(Axis::X, 0.0).abs() * t_f / d;
        let cv1 = corrected.velocity(Axis::X, t_f).abs() * t_f / d;
        let ca = corrected.acceleration(Axis::X, 0.0).abs() * t_f * t_f / d;
        let ca1 = corrected.acceleration(Axis::X, t_f).abs() * t_f * t_f / d;
        worst_endpoint = worst_endpoint.max(c0).max(c1).max(cv).max(cv1).max(ca).max(ca1);
    }
    let wall = t0.elapsed().as_secs_f64();
    report(
        "8 (trajectory contracts)",
        worst_endpoint <= 1e-12 && worst_residual <= 1e-10 && wall < 5.0,
        &format!(
            "worst scaled endpoint deviation {worst_endpoint:.2e} (<= 1e-12), worst residual {worst_residual:.2e} (<= 1e-10), wall = {wall:.2}s"
        ),
    );
}
