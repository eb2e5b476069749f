//! Adaptive Gauss–Kronrod quadrature for complex, vector-valued integrands.
//!
//! A 7/15-point Kronrod pair drives panel bisection. Oscillatory integrands
//! are handled by seeding the panel list with one panel per phase period
//! before adaptivity starts.

use crate::{CoreError, Result, C64};

/// Kronrod-15 abscissae on [-1, 1] (positive half; symmetric).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// Kronrod-15 weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss-7 weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-9, rel_tol: 1e-9, max_panels: 1 << 15 }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Vec<C64>,
    error: f64,
}

fn gk15<F: FnMut(f64, &mut [C64])>(f: &mut F, a: f64, b: f64, dim: usize) -> (Vec<C64>, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = vec![C64::new(0.0, 0.0); dim];
    let mut gauss = vec![C64::new(0.0, 0.0); dim];
    let mut buf = vec![C64::new(0.0, 0.0); dim];
    for (j, &x) in XGK.iter().enumerate() {
        let nodes: &[f64] = if j == 7 { &[0.0] } else { &[-x, x] };
        for &xn in nodes {
            f(c + h * xn, &mut buf);
            for (k, v) in buf.iter().enumerate() {
                kron[k] += WGK[j] * v;
                if j % 2 == 1 {
                    gauss[k] += WG[j / 2] * v;
                }
            }
        }
    }
    for v in kron.iter_mut() {
        *v *= h;
    }
    let mut err = 0.0_f64;
    for k in 0..dim {
        err = err.max((kron[k] - h * gauss[k]).norm());
    }
    (kron, err)
}

/// Integrate a complex vector integrand over `[a, b]`.
///
/// `initial_break` > 0 seeds panels of at most that width (used to split at
/// phase-period boundaries of oscillatory integrands).
pub fn integrate_vec<F>(
    mut f: F,
    a: f64,
    b: f64,
    dim: usize,
    initial_break: f64,
    cfg: &QuadConfig,
) -> Result<Vec<C64>>
where
    F: FnMut(f64, &mut [C64]),
{
    if a == b {
        return Ok(vec![C64::new(0.0, 0.0); dim]);
    }
    let mut panels: Vec<Panel> = Vec::new();
    let mut edges = vec![a];
    if initial_break > 0.0 && (b - a).abs() / initial_break <= 4096.0 {
        let n = ((b - a).abs() / initial_break).ceil().max(1.0) as usize;
        for k in 1..n {
            edges.push(a + (b - a) * k as f64 / n as f64);
        }
    }
    edges.push(b);
    for w in edges.windows(2) {
        let (value, error) = gk15(&mut f, w[0], w[1], dim);
        panels.push(Panel { a: w[0], b: w[1], value, error });
    }

    loop {
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        let mut total = vec![C64::new(0.0, 0.0); dim];
        // Kahan accumulation keeps panel roundoff below the tolerance floor.
        let mut comp = vec![C64::new(0.0, 0.0); dim];
        for p in &panels {
            for k in 0..dim {
                let y = p.value[k] - comp[k];
                let t = total[k] + y;
                comp[k] = (t - total[k]) - y;
                total[k] = t;
            }
        }
        let scale: f64 = total.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let tol = cfg.abs_tol.max(cfg.rel_tol * scale);
        if total_err <= tol {
            return Ok(total);
        }
        if panels.len() >= cfg.max_panels {
            return Err(CoreError::QuadratureFailure {
                achieved: total_err,
                requested: tol,
                panels: panels.len(),
            });
        }
        // Split the worst panel.
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap())
            .unwrap();
        let Panel { a: pa, b: pb, .. } = panels.swap_remove(idx);
        let m = 0.5 * (pa + pb);
        for (lo, hi) in [(pa, m), (m, pb)] {
            let (value, error) = gk15(&mut f, lo, hi, dim);
            panels.push(Panel { a: lo, b: hi, value, error });
        }
    }
}

/// Scalar complex convenience wrapper.
pub fn integrate<F>(mut f: F, a: f64, b: f64, initial_break: f64, cfg: &QuadConfig) -> Result<C64>
where
    F: FnMut(f64) -> C64,
{
    let v = integrate_vec(|t, out| out[0] = f(t), a, b, 1, initial_break, cfg)?;
    Ok(v[0])
}

/// Scalar real convenience wrapper (used by the 1D oracle tests).
pub fn integrate_real<F>(mut f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let v = integrate(|t| C64::new(f(t), 0.0), a, b, 0.0, cfg)?;
    Ok(v.re)
}
