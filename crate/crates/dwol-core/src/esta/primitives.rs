//! Closed-form Hermite–Gauss integrals.
//!
//! Every in-plane spatial integral of the correction machinery is an
//! instance of one master integral over a Hermite-weighted Gaussian,
//!
//! ```text
//! A_n^{(m)}(a, g, Δ) = ∫ H_n(u) e^{-u²} (u+Δ)^m e^{i a (u+Δ)} e^{-g (u+Δ)²} du
//! ```
//!
//! with `m ∈ {0, 1}`, evaluated exactly through the Gaussian generating
//! function of the Hermite polynomials:
//!
//! ```text
//! ∫ H_n(u) e^{-p u² + q u} du = √(π/p) e^{q²/4p} ρⁿ H_n(q / (2 p ρ)),
//! ρ² = (p-1)/p,
//! ```
//!
//! where the scaled sequence `h_k = ρ^k H_k(q/(2pρ))` is generated without
//! forming `ρ` (see [`crate::special::scaled_hermite_pair`]), so the result
//! stays finite-by-construction even for tiny envelope strengths `g`.
//! Trigonometric integrands are the real/imaginary parts at `g = 0`; the
//! envelope kinds set `a = 0`; the moment kind (`m = 1`) enters the
//! trap-gradient integrals.
//!
//! Out-of-plane integrals reduce to parity-selected closed forms collected
//! in [`out_of_plane_cos`] and [`out_of_plane_cos_sq`].

use std::f64::consts::PI;

use crate::special::{factorial, scaled_hermite_pair, MAX_HERMITE_INDEX};
use crate::{CoreError, Result, C64};

/// Whether the integrand carries a factor `(u + Δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Moment {
    Plain,
    Linear,
}

/// The master integral `A_n^{(m)}(a, g, Δ)`; see the module docs.
///
/// Exact up to rounding for any `g >= 0`. Index capped to keep the
/// recurrences in a sane range.
pub fn hermite_gaussian_integral(
    n: usize,
    a: f64,
    g: f64,
    delta: f64,
    moment: Moment,
) -> Result<C64> {
    if n > MAX_HERMITE_INDEX {
        return Err(CoreError::IndexTooLarge { index: n, max: MAX_HERMITE_INDEX });
    }
    let p = 1.0 + g;
    let q = C64::new(-2.0 * g * delta, a);
    let (hn, hn_m1) = scaled_hermite_pair(n, p, q);
    // √(π/p) e^{-(gΔ² + a²/4)/p} e^{i a Δ / p}
    let scalar = (PI / p).sqrt()
        * C64::new(-(g * delta * delta + 0.25 * a * a) / p, a * delta / p).exp();
    let value = match moment {
        Moment::Plain => scalar * hn,
        Moment::Linear => {
            let poly = q / (2.0 * p) * hn + (n as f64 / p) * hn_m1 + delta * hn;
            scalar * poly
        }
    };
    Ok(value)
}

/// `∫ H_n(X_C) e^{-X_C²} cos[2^{3/2} κ l X_0] dX` with `X_0 = X_C + Δ`.
pub fn i_trig_cos(n: usize, kappa: f64, l: f64, delta: f64) -> Result<f64> {
    let a = 2.0 * std::f64::consts::SQRT_2 * kappa * l;
    Ok(hermite_gaussian_integral(n, a, 0.0, delta, Moment::Plain)?.re)
}

/// Sine counterpart of [`i_trig_cos`].
pub fn i_trig_sin(n: usize, kappa: f64, l: f64, delta: f64) -> Result<f64> {
    let a = 2.0 * std::f64::consts::SQRT_2 * kappa * l;
    Ok(hermite_gaussian_integral(n, a, 0.0, delta, Moment::Plain)?.im)
}

/// Squared-envelope kind: `∫ H_n e^{-X_C²} exp(-4 X_0² l²/w²) dX`.
pub fn i_envelope_sq(n: usize, l: f64, w: f64, delta: f64) -> Result<f64> {
    let g = 4.0 * l * l / (w * w);
    Ok(hermite_gaussian_integral(n, 0.0, g, delta, Moment::Plain)?.re)
}

/// Single-strength envelope: `∫ H_n e^{-X_C²} exp(-2 X_0² l²/w²) dX`.
pub fn i_envelope(n: usize, l: f64, w: f64, delta: f64) -> Result<f64> {
    let g = 2.0 * l * l / (w * w);
    Ok(hermite_gaussian_integral(n, 0.0, g, delta, Moment::Plain)?.re)
}

/// Envelope × cosine: `∫ H_n e^{-X_C²} cos[√2 κ l X_0] exp(-2 X_0² l²/w²) dX`.
pub fn i_envelope_cos(n: usize, kappa: f64, l: f64, w: f64, delta: f64) -> Result<f64> {
    let a = std::f64::consts::SQRT_2 * kappa * l;
    let g = 2.0 * l * l / (w * w);
    Ok(hermite_gaussian_integral(n, a, g, delta, Moment::Plain)?.re)
}

/// Envelope × sine counterpart of [`i_envelope_cos`].
pub fn i_envelope_sin(n: usize, kappa: f64, l: f64, w: f64, delta: f64) -> Result<f64> {
    let a = std::f64::consts::SQRT_2 * kappa * l;
    let g = 2.0 * l * l / (w * w);
    Ok(hermite_gaussian_integral(n, a, g, delta, Moment::Plain)?.im)
}

/// Moment variant of [`i_envelope_sq`] (gradient of the out-of-plane term).
pub fn i_envelope_sq_moment(n: usize, l: f64, w: f64, delta: f64) -> Result<f64> {
    let g = 4.0 * l * l / (w * w);
    Ok(hermite_gaussian_integral(n, 0.0, g, delta, Moment::Linear)?.re)
}

/// Moment variant of [`i_envelope`].
pub fn i_envelope_moment(n: usize, l: f64, w: f64, delta: f64) -> Result<f64> {
    let g = 2.0 * l * l / (w * w);
    Ok(hermite_gaussian_integral(n, 0.0, g, delta, Moment::Linear)?.re)
}

/// Moment variant of [`i_envelope_cos`].
pub fn i_envelope_cos_moment(n: usize, kappa: f64, l: f64, w: f64, delta: f64) -> Result<f64> {
    let a = std::f64::consts::SQRT_2 * kappa * l;
    let g = 2.0 * l * l / (w * w);
    Ok(hermite_gaussian_integral(n, a, g, delta, Moment::Linear)?.re)
}

/// Moment variant of [`i_envelope_sin`].
pub fn i_envelope_sin_moment(n: usize, kappa: f64, l: f64, w: f64, delta: f64) -> Result<f64> {
    let a = std::f64::consts::SQRT_2 * kappa * l;
    let g = 2.0 * l * l / (w * w);
    Ok(hermite_gaussian_integral(n, a, g, delta, Moment::Linear)?.im)
}

/// Harmonic quadratic kind: `(1/√π) ∫ H_n(u) e^{-u²} (u+Δ)² du`,
/// i.e. `(1/2 + Δ²) δ_{n,0} + 2Δ δ_{n,1} + 2 δ_{n,2}`.
pub fn i_quadratic(n: usize, delta: f64) -> f64 {
    match n {
        0 => 0.5 + delta * delta,
        1 => 2.0 * delta,
        2 => 2.0,
        _ => 0.0,
    }
}

/// Linear kind: `(1/√π) ∫ H_n(u) e^{-u²} (u+Δ) du = Δ δ_{n,0} + δ_{n,1}`.
pub fn i_linear(n: usize, delta: f64) -> f64 {
    match n {
        0 => delta,
        1 => 1.0,
        _ => 0.0,
    }
}

/// Out-of-plane cosine factor:
/// `(1/√π) ∫ H_n(Z) e^{-Z²} cos(√2 k_z l_z Z) dZ
///   = (-1)^{n/2} (√2 k_z l_z)^n e^{-(k_z l_z)²/2}` for even `n`, else 0.
pub fn out_of_plane_cos(n: usize, kz_lz: f64) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
    sign * (std::f64::consts::SQRT_2 * kz_lz).powi(n as i32) * (-0.5 * kz_lz * kz_lz).exp()
}

/// Out-of-plane squared-cosine factor:
/// `(1/√π) ∫ H_n(Z) e^{-Z²} cos²(√2 k_z l_z Z) dZ
///   = ½ [δ_{n,0} + (-1)^{n/2} (2√2 k_z l_z)^n e^{-2 (k_z l_z)²}]` for even
/// `n` (both pieces contribute at `n = 0`), else 0.
pub fn out_of_plane_cos_sq(n: usize, kz_lz: f64) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let osc = sign
        * (2.0 * std::f64::consts::SQRT_2 * kz_lz).powi(n as i32)
        * (-2.0 * kz_lz * kz_lz).exp();
    0.5 * (if n == 0 { 1.0 } else { 0.0 } + osc)
}

/// Mode normalization `1/√(2^n n_x! n_y! n_z! π)` shared by the assembled
/// time integrals.
pub fn mode_norm(nx: usize, ny: usize, nz: usize) -> Result<f64> {
    let n = nx + ny + nz;
    Ok(1.0
        / (2f64.powi(n as i32) * factorial(nx)? * factorial(ny)? * factorial(nz)? * PI).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_real, QuadConfig};
    use crate::special::hermite;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quad_tol() -> QuadConfig {
        QuadConfig { abs_tol: 1e-13, rel_tol: 1e-12, max_panels: 1 << 14 }
    }

    /// Reference quadrature of the defining integral on a truncated line.
    fn reference(n: usize, a: f64, g: f64, delta: f64, moment: Moment) -> C64 {
        let lim = 10.0 + n as f64;
        let re = integrate_real(
            |u| {
                let x0 = u + delta;
                let m = if moment == Moment::Linear { x0 } else { 1.0 };
                hermite(n, u) * (-u * u).exp() * m * (a * x0).cos() * (-g * x0 * x0).exp()
            },
            -lim,
            lim,
            &quad_tol(),
        )
        .unwrap();
        let im = integrate_real(
            |u| {
                let x0 = u + delta;
                let m = if moment == Moment::Linear { x0 } else { 1.0 };
                hermite(n, u) * (-u * u).exp() * m * (a * x0).sin() * (-g * x0 * x0).exp()
            },
            -lim,
            lim,
            &quad_tol(),
        )
        .unwrap();
        C64::new(re, im)
    }

    #[test]
    fn trivial_limits() {
        // cos(0·X_0) reduces to Gaussian–Hermite orthogonality.
        assert!((i_trig_cos(0, 0.0, 1.0, 0.7).unwrap() - PI.sqrt()).abs() < 1e-14);
        for n in 1..6 {
            assert!(i_trig_cos(n, 0.0, 1.0, 0.7).unwrap().abs() < 1e-14);
            assert!(i_trig_sin(n, 0.0, 1.0, 0.7).unwrap().abs() < 1e-14);
        }
        // parity selection out of plane
        for n in [1usize, 3, 5, 7] {
            assert_eq!(out_of_plane_cos(n, 0.3), 0.0);
            assert_eq!(out_of_plane_cos_sq(n, 0.3), 0.0);
        }
    }

    /// The decisive check: every kind against adaptive quadrature of its
    /// defining integral, 50 random argument sets, relative 1e-8.
    #[test]
    fn master_integral_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..50 {
            let n = rng.gen_range(0..=6);
            let a = rng.gen_range(0.0..2.5);
            let g = if trial % 3 == 0 { 0.0 } else { 10f64.powf(rng.gen_range(-8.0..-1.0)) };
            let delta = rng.gen_range(-12.0..12.0);
            for moment in [Moment::Plain, Moment::Linear] {
                let got = hermite_gaussian_integral(n, a, g, delta, moment).unwrap();
                let want = reference(n, a, g, delta, moment);
                let scale = want.norm().max(1e-6);
                assert!(
                    (got - want).norm() <= 1e-8 * scale,
                    "trial {trial}: n={n} a={a} g={g} delta={delta} {moment:?}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn out_of_plane_matches_quadrature() {
        let cfg = quad_tol();
        for n in [0usize, 2, 4, 6] {
            for kz_lz in [0.05, 0.21, 0.9] {
                let c1 = integrate_real(
                    |z| {
                        hermite(n, z)
                            * (-z * z).exp()
                            * (std::f64::consts::SQRT_2 * kz_lz * z).cos()
                    },
                    -14.0,
                    14.0,
                    &cfg,
                )
                .unwrap()
                    / PI.sqrt();
                assert!(
                    (c1 - out_of_plane_cos(n, kz_lz)).abs() <= 1e-8 * c1.abs() + 2e-13,
                    "cos n={n} kz_lz={kz_lz}"
                );
                let c2 = integrate_real(
                    |z| {
                        let c = (std::f64::consts::SQRT_2 * kz_lz * z).cos();
                        hermite(n, z) * (-z * z).exp() * c * c
                    },
                    -14.0,
                    14.0,
                    &cfg,
                )
                .unwrap()
                    / PI.sqrt();
                assert!(
                    (c2 - out_of_plane_cos_sq(n, kz_lz)).abs() <= 1e-8 * c2.abs() + 2e-13,
                    "cos² n={n} kz_lz={kz_lz}"
                );
            }
        }
    }

    #[test]
    fn moment_kinds_match_quadrature() {
        let cfg = quad_tol();
        for n in 0..4 {
            let c = integrate_real(
                |u| hermite(n, u) * (-u * u).exp() * (u + 1.3).powi(2),
                -12.0,
                12.0,
                &cfg,
            )
            .unwrap()
                / PI.sqrt();
            assert!((c - i_quadratic(n, 1.3)).abs() < 1e-10);
            let c = integrate_real(
                |u| hermite(n, u) * (-u * u).exp() * (u + 1.3),
                -12.0,
                12.0,
                &cfg,
            )
            .unwrap()
                / PI.sqrt();
            assert!((c - i_linear(n, 1.3)).abs() < 1e-10);
        }
    }

    #[test]
    fn index_cap_enforced() {
        assert!(matches!(
            hermite_gaussian_integral(65, 0.1, 0.0, 0.0, Moment::Plain),
            Err(CoreError::IndexTooLarge { .. })
        ));
    }
}
