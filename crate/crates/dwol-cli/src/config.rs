//! Configuration file schema and its resolution into core types.
//!
//! The file is TOML with explicit unit tags on every physical quantity.
//! Unknown keys are rejected — a typo must fail loudly, not silently fall
//! back to a default.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use dwol_core::diag::Diagnostics;
use dwol_core::dynamics::{GridSpec, IteConfig, PropagationConfig};
use dwol_core::lattice::{harmonic_approximation, HarmonicModel, LatticeParams};
use dwol_core::sta::{Direction, TransportSpec};

use crate::units::{angle, Quantity, Scales, SiAnchors};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: LatticeBlock,
    pub transport: Option<TransportBlock>,
    pub grid: Option<GridBlock>,
    #[serde(default)]
    pub propagation: PropagationBlock,
    #[serde(default)]
    pub ite: IteBlock,
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Worker bound for sweeps; 0 means one per available core.
    #[serde(default)]
    pub threads: usize,
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeBlock {
    pub depth: Quantity,
    pub beta: Quantity,
    pub theta: Quantity,
    pub phi: Quantity,
    #[serde(default)]
    pub xi_z: f64,
    /// Out-of-plane wave number; defaults to `1 k_L`.
    pub k_z: Option<Quantity>,
    /// Transverse waists; default `4200 l_x`.
    pub waist_x: Option<Quantity>,
    pub waist_y: Option<Quantity>,
    /// `"auto"` (Gaussian-beam `k_z w²/2`) or an explicit length.
    pub rayleigh: Option<String>,
    /// SI anchors (optional): laser wave number and atomic mass.
    pub k_l_si: Option<Quantity>,
    pub mass_si: Option<Quantity>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportBlock {
    pub direction: String,
    pub distance: Quantity,
    pub t_f: Quantity,
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,
    /// Degree policy for the correction basis: "exact15" | "ls11".
    #[serde(default = "default_basis")]
    pub basis: String,
    /// Length unit for diagonal distances (never defined by the model).
    pub l_r: Option<Quantity>,
}

fn default_method() -> String {
    "sta".into()
}

fn default_cutoff() -> usize {
    2
}

fn default_basis() -> String {
    "exact15".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub points: [usize; 3],
    pub extents: [Quantity; 3],
    /// "expansion" (default) centres the window on the trap minimum.
    pub center: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct PropagationBlock {
    pub dt_initial: Option<Quantity>,
    pub max_rel_error: Option<f64>,
    pub max_substeps: Option<usize>,
    pub adaptive: Option<bool>,
    /// "full" | "frozen" | "harmonic"
    pub potential: Option<String>,
    pub boundary_abort: Option<bool>,
    #[serde(default)]
    pub snapshot_fractions: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct IteBlock {
    pub tol_energy: Option<f64>,
    pub max_iters: Option<usize>,
    /// "auto" | "gaussian" | "double-well"
    pub guess: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    /// Exactly one sweep axis: "t_f" | "depth" | "distance".
    pub variable: String,
    pub values: Vec<Quantity>,
    /// Methods to run per sweep point.
    #[serde(default = "default_methods")]
    pub methods: Vec<String>,
}

fn default_methods() -> Vec<String> {
    vec!["sta".into()]
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub directory: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Sta,
    Esta,
}

impl Method {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sta" => Ok(Method::Sta),
            "esta" => Ok(Method::Esta),
            other => bail!("unknown method '{other}' (use sta or esta)"),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Sta => "sta",
            Method::Esta => "esta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialChoice {
    Full,
    Frozen,
    Harmonic,
}

/// Everything resolved into internal units, ready to run.
pub struct Resolved {
    pub params: LatticeParams,
    pub model: HarmonicModel,
    pub scales: Scales,
    pub transport: Option<TransportSpec>,
    pub method: Method,
    pub cutoff: usize,
    pub basis_exact: bool,
    pub grid: Option<GridSpec>,
    pub propagation: PropagationConfig,
    pub potential: PotentialChoice,
    pub snapshot_fractions: Vec<f64>,
    pub ite: IteConfig,
    pub ite_guess: String,
    pub seed: u64,
    pub threads: usize,
    pub out_dir: String,
    pub diagnostics: Diagnostics,
    /// Pretty-printed resolved configuration for output headers.
    pub header: Vec<String>,
}

pub fn load(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let cfg: RunConfig = toml::from_str(&text)
        .map_err(|e| anyhow!("config error in {}: {e}", path.display()))?;
    Ok(cfg)
}

fn build_lattice(block: &LatticeBlock, scales: &Scales) -> Result<LatticeParams> {
    let mut p = LatticeParams::new(0.0, 0.0, 0.0, 0.0, block.xi_z);
    p.k_l = scales.k_l;
    p.mass = 1.0;
    p.u_d0 = scales.energy(&block.depth)?;
    p.beta = angle(&block.beta)?;
    p.theta = angle(&block.theta)?;
    p.phi = angle(&block.phi)?;
    p.k_z = match &block.k_z {
        Some(q) => scales.wave_number(q)?,
        None => scales.k_l,
    };
    Ok(p)
}

/// Resolve the config: waists tagged in `l_x` need the model, which needs
/// the waists — only through envelope corrections of relative size
/// `(l/w)² ~ 1e-7`, so a short fixpoint iteration converges to rounding.
pub fn resolve(cfg: &RunConfig) -> Result<Resolved> {
    let si = match (&cfg.lattice.k_l_si, &cfg.lattice.mass_si) {
        (Some(k), Some(m)) => {
            if k.unit != "1/m" || m.unit != "kg" {
                bail!("SI anchors need k_l_si in '1/m' and mass_si in 'kg'");
            }
            Some(SiAnchors::from_laser(k.value, m.value))
        }
        (None, None) => None,
        _ => bail!("k_l_si and mass_si must be given together"),
    };
    let mut scales = Scales::bare(1.0, 0.5, si);
    let mut diagnostics = Diagnostics::new();

    // fixpoint for the waist units
    let mut params = build_lattice(&cfg.lattice, &scales)?;
    params.w0x = 1e9;
    params.w0y = 1e9;
    params.z_rx = 0.5 * params.k_z * 1e18;
    params.z_ry = params.z_rx;
    let mut model = harmonic_approximation(&params, &mut Diagnostics::new())
        .map_err(|e| anyhow!("lattice rejected: {e}"))?;
    for last in [false, false, true] {
        scales.l = model.l;
        scales.t = model.t;
        let wx = match &cfg.lattice.waist_x {
            Some(q) => scales.length(q)?,
            None => 4200.0 * model.l[0],
        };
        let wy = match &cfg.lattice.waist_y {
            Some(q) => scales.length(q)?,
            None => wx,
        };
        params.w0x = wx;
        params.w0y = wy;
        match cfg.lattice.rayleigh.as_deref() {
            None | Some("auto") => {
                params.z_rx = 0.5 * params.k_z * wx * wx;
                params.z_ry = 0.5 * params.k_z * wy * wy;
            }
            Some(text) => {
                let q: Quantity = text.parse()?;
                let z = scales.length(&q)?;
                params.z_rx = z;
                params.z_ry = z;
            }
        }
        let mut diag = Diagnostics::new();
        model = harmonic_approximation(&params, &mut diag)
            .map_err(|e| anyhow!("lattice rejected: {e}"))?;
        if last {
            diagnostics.extend(diag);
        }
    }
    scales.l = model.l;
    scales.t = model.t;

    // transport
    let mut transport = None;
    let mut method = Method::Sta;
    let mut cutoff = default_cutoff();
    let mut basis_exact = true;
    if let Some(tb) = &cfg.transport {
        if let Some(lr) = &tb.l_r {
            scales.l_r = Some(scales.length(lr)?);
        }
        let direction = match tb.direction.to_ascii_lowercase().as_str() {
            "x" => Direction::X,
            "y" => Direction::Y,
            "diagonal" | "r" => Direction::Diagonal,
            other => bail!("unknown transport direction '{other}'"),
        };
        let distance = scales.length(&tb.distance)?;
        let t_f = scales.time(&tb.t_f)?;
        transport = Some(TransportSpec { direction, distance, t_f });
        method = Method::parse(&tb.method)?;
        cutoff = tb.cutoff;
        basis_exact = match tb.basis.as_str() {
            "exact15" => true,
            "ls11" => false,
            other => bail!("unknown basis policy '{other}' (use exact15 or ls11)"),
        };
        if method == Method::Esta && cutoff < 1 {
            bail!("esta cutoff must be >= 1");
        }
    }

    // grid
    let mut grid = None;
    if let Some(gb) = &cfg.grid {
        let extents = [
            scales.length(&gb.extents[0])?,
            scales.length(&gb.extents[1])?,
            scales.length(&gb.extents[2])?,
        ];
        let center = match gb.center.as_deref() {
            None | Some("expansion") => params.expansion_point(),
            Some("origin") => [0.0; 3],
            Some("midwell") => [0.0, 0.0, 0.0],
            Some(other) => bail!("unknown grid center '{other}'"),
        };
        let g = GridSpec::centered(center, extents, gb.points);
        g.validate().map_err(|e| anyhow!("grid rejected: {e}"))?;
        if g.worst_prime_factor() > 13 {
            diagnostics.warn(
                "grid-prime-factor",
                format!("point counts {:?} contain a large prime factor; transforms degrade", gb.points),
            );
        }
        if gb.points[2] > 1 && params.xi_z == 0.0 {
            bail!("3D grid requires xi_z > 0 for z confinement");
        }
        grid = Some(g);
    }

    // propagation
    let pb = &cfg.propagation;
    let mut propagation = PropagationConfig::default();
    if let Some(q) = &pb.dt_initial {
        propagation.dt_initial = Some(scales.time(q)?);
    }
    if let Some(v) = pb.max_rel_error {
        if !(v > 0.0) {
            bail!("max_rel_error must be > 0");
        }
        propagation.max_rel_error = v;
    }
    if let Some(v) = pb.max_substeps {
        propagation.max_substeps = v;
    }
    if let Some(v) = pb.adaptive {
        propagation.adaptive = v;
    }
    if let Some(v) = pb.boundary_abort {
        propagation.boundary_abort = v;
    }
    let potential = match pb.potential.as_deref() {
        None | Some("full") => PotentialChoice::Full,
        Some("frozen") => PotentialChoice::Frozen,
        Some("harmonic") => PotentialChoice::Harmonic,
        Some(other) => bail!("unknown potential choice '{other}'"),
    };
    for &f in &pb.snapshot_fractions {
        if !(0.0..=1.0).contains(&f) {
            bail!("snapshot fraction {f} outside [0, 1]");
        }
    }

    // ite
    let ib = &cfg.ite;
    let mut ite = IteConfig::default();
    if let Some(v) = ib.tol_energy {
        ite.tol_energy = v;
    }
    if let Some(v) = ib.max_iters {
        ite.max_iters = v;
    }
    let ite_guess = ib.guess.clone().unwrap_or_else(|| "auto".into());

    if let Some(sw) = &cfg.sweep {
        if sw.values.is_empty() {
            bail!("sweep.values must not be empty");
        }
        match sw.variable.as_str() {
            "t_f" | "depth" | "distance" => {}
            other => bail!("unknown sweep variable '{other}'"),
        }
        for m in &sw.methods {
            Method::parse(m)?;
        }
    }

    let out_dir = cfg.output.directory.clone().unwrap_or_else(|| "out".into());

    let mut header = vec![format!("dwol v{}", env!("CARGO_PKG_VERSION"))];
    header.push(format!(
        "lattice: depth = {:.6e} (= {:.3} E_R), beta = {:.6}, theta = {:.6}, phi = {:.6}, xi_z = {:.4e}, k_z = {:.6}, waists = ({:.4e}, {:.4e}), rayleigh = ({:.4e}, {:.4e})",
        params.u_d0,
        params.u_d0 / model.e_r,
        params.beta,
        params.theta,
        params.phi,
        params.xi_z,
        params.k_z,
        params.w0x,
        params.w0y,
        params.z_rx,
        params.z_ry,
    ));
    header.push(format!(
        "model: omega = ({:.6e}, {:.6e}, {:.6e}), a_x = {:.6e}, l = ({:.6e}, {:.6e}, {:.6e}), T_x = {:.6e}, V_d0 = {:.6e}",
        model.omega[0], model.omega[1], model.omega[2], model.a_x, model.l[0], model.l[1], model.l[2], model.t[0], model.v_d0,
    ));
    if let Some(t) = &transport {
        header.push(format!(
            "transport: direction = {:?}, distance = {:.6e} (= {:.2} l_x), t_f = {:.6e} (= {:.4} T_x), method = {}, cutoff = {}, basis = {}",
            t.direction,
            t.distance,
            t.distance / model.l[0],
            t.t_f,
            t.t_f / model.t[0],
            method.as_str(),
            cutoff,
            if basis_exact { "exact15" } else { "ls11" },
        ));
        if let Some(lr) = scales.l_r {
            header.push(format!("transport: l_r unit = {lr:.6e} (configuration-supplied)"));
        }
    }
    if let Some(g) = &grid {
        header.push(format!(
            "grid: points = {:?}, extents = ({:.4e}, {:.4e}, {:.4e}), origin = ({:.4e}, {:.4e}, {:.4e})",
            g.n, g.extent[0], g.extent[1], g.extent[2], g.origin[0], g.origin[1], g.origin[2]
        ));
    }
    header.push(format!(
        "propagation: max_rel_error = {:.2e}, adaptive = {}, potential = {:?}; ite: tol = {:.2e}; seed = {}",
        propagation.max_rel_error, propagation.adaptive, potential, ite.tol_energy, cfg.seed
    ));

    Ok(Resolved {
        params,
        model,
        scales,
        transport,
        method,
        cutoff,
        basis_exact,
        grid,
        propagation,
        potential,
        snapshot_fractions: pb.snapshot_fractions.clone(),
        ite,
        ite_guess,
        seed: cfg.seed,
        threads: cfg.threads,
        out_dir,
        diagnostics,
        header,
    })
}
