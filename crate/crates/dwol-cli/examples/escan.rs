// breakdown-onset scan, fixed-step propagation
use dwol_cli::verify::{model_of, standard_params};
use dwol_core::dynamics::{
    ite_ground_state, propagate, GridSpec, InitialGuess, IteConfig, Potential,
    PropagationConfig, Propagator,
};
use dwol_core::sta::{design_sta, Direction, TransportSpec};

fn main() -> anyhow::Result<()> {
    let steps: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2048);
    for depth in [50.0, 150.0] {
        let p = standard_params(depth, 0.0);
        let h = model_of(&p)?;
        let x0 = p.expansion_point()[0];
        let grid = GridSpec::centered([x0, 0.0, 0.0], [140.0 * h.l[0], 60.0 * h.l[1], 1.0], [256, 256, 1]);
        let pot = Potential::FullDwol(&p);
        let guess = InitialGuess::Gaussian {
            center: [x0 - h.a_x / h.omega_sq[0], 0.0, 0.0],
            widths: [h.l[0], h.l[1], 1.0],
        };
        let ite = IteConfig { tol_energy: 1e-9, ..Default::default() };
        let (ground, _, _) = ite_ground_state(&pot, &grid, &ite, &guess)?;
        for k in 0..8 {
            let tfs = 3.0 + 2.0 * k as f64 / 7.0;
            let spec = TransportSpec { direction: Direction::X, distance: 158.0 * h.l[0], t_f: tfs * h.t[0] };
            let traj = design_sta(&spec, &h)?;
            let mut prop = Propagator::new(grid.clone(), &pot)?;
            let pc = PropagationConfig {
                adaptive: false,
                dt_initial: Some(traj.t_f / steps as f64),
                boundary_abort: false,
                ..Default::default()
            };
            let t0 = std::time::Instant::now();
            let (fin, stats) = propagate(&mut prop, &ground, &traj, &pc)?;
            println!(
                "U = {depth:>5} E_R  t_f = {tfs:.3} T_x  F = {:.5}  ({} steps, bnd {:.1e}, {:.1}s)",
                ground.fidelity(&fin)?, stats.accepted, stats.max_boundary_fraction, t0.elapsed().as_secs_f64()
            );
        }
    }
    Ok(())
}
