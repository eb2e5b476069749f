use dwol_cli::verify::{model_of, standard_params};
use dwol_core::esta::oracle::{gk_n_bruteforce, OracleConfig};
use dwol_core::esta::{g_n, k_n, CorrectionBasis, EstaContext, ModeIndex};
use dwol_core::quad::QuadConfig;
use dwol_core::sta::{design_sta, Direction, TransportSpec};

fn main() -> anyhow::Result<()> {
    let p = standard_params(800.0, 0.05);
    let h = model_of(&p)?;
    let spec = TransportSpec { direction: Direction::X, distance: 120.0 * h.l[0], t_f: 4.0 * h.t[0] };
    let traj = design_sta(&spec, &h)?;
    let basis = CorrectionBasis::exact();
    let mut ctx = EstaContext::new(&p, &h, &traj, &basis)?;
    ctx.quad = QuadConfig { abs_tol: 1e-13, rel_tol: 1e-11, max_panels: 1 << 15 };
    for (gh, rel) in [(40usize, 3e-8), (32, 1e-7), (24, 3e-7)] {
        let cfg = OracleConfig { gh_nodes: gh, quad: QuadConfig { abs_tol: 1e-12, rel_tol: rel, max_panels: 4096 } };
        let t0 = std::time::Instant::now();
        let n = ModeIndex::new(1, 0, 0);
        let (g_o, k_o) = gk_n_bruteforce(&ctx, n, &cfg)?;
        let dt = t0.elapsed().as_secs_f64();
        let g_c = g_n(&ctx, n)?;
        let k_c = k_n(&ctx, n)?;
        let gerr = (g_c - g_o).norm() / g_o.norm();
        let kerr = (0..12).map(|j| (k_c[j] - k_o[j]).norm() / k_o[j].norm().max(1e-12)).fold(0.0f64, f64::max);
        println!("gh={gh} rel={rel:.0e}: wall {dt:.2}s for one mode, gerr {gerr:.2e}, kerr {kerr:.2e}");
    }
    Ok(())
}
