//! Invariant-based inverse engineering of moving-trap trajectories.
//!
//! For a rigid harmonic trap the driving path `q_0(t)` that transports the
//! ground state without final excitation is a ninth-degree polynomial in
//! `s = t/t_f` whose coefficients depend on `(t_f ω)⁻²`. The associated
//! classical path `q_c(t)` is the minimal fifth-to-ninth degree polynomial,
//! shifted on the x axis by `-a_x/ω_x²` to absorb the linear potential term.

pub use crate::lattice::Axis;
use crate::lattice::HarmonicModel;
use crate::poly::{ClampedPoly, Poly};
use crate::{CoreError, Result};

/// Transport directions supported by the lattice geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    X,
    Y,
    /// Simultaneous x/y legs with distance components `d_r/√2` each.
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportSpec {
    pub direction: Direction,
    /// Total transport distance (along the axis, or diagonal length).
    pub distance: f64,
    pub t_f: f64,
}

impl TransportSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.distance > 0.0) || !self.distance.is_finite() {
            return Err(CoreError::InvalidParams(format!("distance = {} must be > 0", self.distance)));
        }
        if !(self.t_f > 0.0) || !self.t_f.is_finite() {
            return Err(CoreError::InvalidParams(format!("t_f = {} must be > 0", self.t_f)));
        }
        Ok(())
    }

    /// Per-axis distance components.
    pub fn components(&self) -> [f64; 2] {
        match self.direction {
            Direction::X => [self.distance, 0.0],
            Direction::Y => [0.0, self.distance],
            Direction::Diagonal => {
                let c = self.distance / std::f64::consts::SQRT_2;
                [c, c]
            }
        }
    }
}

/// How a trajectory was produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Sta,
    Esta { epsilon: [f64; 12], cutoff: usize },
}

/// Minimal transport polynomial `126 s⁵ − 420 s⁶ + 540 s⁷ − 315 s⁸ + 70 s⁹`.
pub fn minimal_polynomial() -> Poly {
    Poly::new(vec![0.0, 0.0, 0.0, 0.0, 0.0, 126.0, -420.0, 540.0, -315.0, 70.0])
}

/// The seven trap-trajectory coefficients `b_3 .. b_9` for one axis.
pub fn sta_coefficients(omega: f64, t_f: f64) -> [f64; 7] {
    let g = (t_f * omega).powi(2).recip();
    [
        2520.0 * g,
        -12600.0 * g,
        22680.0 * g + 126.0,
        -17640.0 * g - 420.0,
        5040.0 * g + 540.0,
        -315.0,
        70.0,
    ]
}

/// Moving-trap trajectory: per-axis polynomials in `s = t/t_f`, evaluated by
/// Horner with coefficient-level derivatives (never numerical ones).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t_f: f64,
    pub distance: [f64; 2],
    pub omega: [f64; 2],
    pub provenance: Provenance,
    sta_part: [Poly; 2],
    sta_d1: [Poly; 2],
    sta_d2: [Poly; 2],
    correction: [ClampedPoly; 2],
}

impl Trajectory {
    pub fn from_parts(
        t_f: f64,
        distance: [f64; 2],
        omega: [f64; 2],
        sta_part: [Poly; 2],
        correction: [ClampedPoly; 2],
        provenance: Provenance,
    ) -> Self {
        let sta_d1 = [sta_part[0].derivative(), sta_part[1].derivative()];
        let sta_d2 = [sta_d1[0].derivative(), sta_d1[1].derivative()];
        Self { t_f, distance, omega, provenance, sta_part, sta_d1, sta_d2, correction }
    }

    fn s(&self, t: f64) -> f64 {
        (t / self.t_f).clamp(0.0, 1.0)
    }

    /// Trap position `q_0,u(t)`.
    pub fn position(&self, axis: Axis, t: f64) -> f64 {
        let i = axis.index();
        let s = self.s(t);
        self.sta_part[i].eval(s) + self.correction[i].value(s)
    }

    /// Trap velocity `q̇_0,u(t)`.
    pub fn velocity(&self, axis: Axis, t: f64) -> f64 {
        let i = axis.index();
        let s = self.s(t);
        (self.sta_d1[i].eval(s) + self.correction[i].d1(s)) / self.t_f
    }

    /// Trap acceleration `q̈_0,u(t)`.
    pub fn acceleration(&self, axis: Axis, t: f64) -> f64 {
        let i = axis.index();
        let s = self.s(t);
        (self.sta_d2[i].eval(s) + self.correction[i].d2(s)) / (self.t_f * self.t_f)
    }

    /// Both velocity components at once (hot path of the propagator).
    pub fn velocity_vec(&self, t: f64) -> [f64; 2] {
        [self.velocity(Axis::X, t), self.velocity(Axis::Y, t)]
    }

    /// The STA part of the trajectory (identical to `position` for pure STA).
    pub fn sta_position(&self, axis: Axis, t: f64) -> f64 {
        self.sta_part[axis.index()].eval(self.s(t))
    }

    pub fn sta_polys(&self) -> &[Poly; 2] {
        &self.sta_part
    }

    pub fn correction_polys(&self) -> &[ClampedPoly; 2] {
        &self.correction
    }

    /// Strip any correction, keeping the underlying STA design.
    pub fn to_sta(&self) -> Trajectory {
        Trajectory::from_parts(
            self.t_f,
            self.distance,
            self.omega,
            self.sta_part.clone(),
            [ClampedPoly::zero(), ClampedPoly::zero()],
            Provenance::Sta,
        )
    }
}

/// Assemble the STA trajectory for a transport specification.
pub fn design_sta(spec: &TransportSpec, h: &HarmonicModel) -> Result<Trajectory> {
    spec.validate()?;
    let d = spec.components();
    let mut polys = [Poly::zero(), Poly::zero()];
    for axis in 0..2 {
        if d[axis] == 0.0 {
            continue;
        }
        let b = sta_coefficients(h.omega[axis], spec.t_f);
        let mut c = vec![0.0; 10];
        for (k, bk) in b.iter().enumerate() {
            c[k + 3] = d[axis] * bk;
        }
        polys[axis] = Poly::new(c);
    }
    Ok(Trajectory::from_parts(
        spec.t_f,
        d,
        [h.omega[0], h.omega[1]],
        polys,
        [ClampedPoly::zero(), ClampedPoly::zero()],
        Provenance::Sta,
    ))
}

/// Classical particle path associated with an STA design on one axis.
#[derive(Debug, Clone)]
pub struct ClassicalPath {
    pub t_f: f64,
    poly: Poly,
    d1: Poly,
    d2: Poly,
    /// Antiderivative of `(dq_c/ds)²`, for the action phase.
    action: Poly,
}

impl ClassicalPath {
    pub fn position(&self, t: f64) -> f64 {
        self.poly.eval((t / self.t_f).clamp(0.0, 1.0))
    }

    pub fn velocity(&self, t: f64) -> f64 {
        self.d1.eval((t / self.t_f).clamp(0.0, 1.0)) / self.t_f
    }

    pub fn acceleration(&self, t: f64) -> f64 {
        self.d2.eval((t / self.t_f).clamp(0.0, 1.0)) / (self.t_f * self.t_f)
    }

    /// `∫_0^t q̇_c² dt'` (enters the transport-mode action phase).
    pub fn kinetic_action(&self, t: f64) -> f64 {
        self.action.eval((t / self.t_f).clamp(0.0, 1.0)) / self.t_f
    }
}

/// Classical path for `axis`, from the STA part of `traj`.
///
/// The trajectory must have been designed against the same harmonic model;
/// a retuned trap is rejected as an axis mismatch.
pub fn classical_path(traj: &Trajectory, h: &HarmonicModel, axis: Axis) -> Result<ClassicalPath> {
    let i = axis.index();
    let rel = (traj.omega[i] - h.omega[i]).abs() / h.omega[i].max(1e-300);
    if rel > 1e-12 {
        return Err(CoreError::AxisMismatch {
            axis: if i == 0 { 'x' } else { 'y' },
            expected: traj.omega[i],
            found: h.omega[i],
        });
    }
    let mut poly = minimal_polynomial().scale(traj.distance[i]);
    if axis == Axis::X {
        // Constant shift absorbing the linear potential term.
        if poly.c.is_empty() {
            poly.c.push(0.0);
        }
        poly.c[0] -= h.a_x / h.omega_sq[0];
    }
    let d1 = poly.derivative();
    let d2 = d1.derivative();
    let action = d1.mul(&d1).antiderivative();
    Ok(ClassicalPath { t_f: traj.t_f, poly, d1, d2, action })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::Diagnostics;
    use crate::lattice::{harmonic_approximation, LatticeParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn model() -> HarmonicModel {
        let p = LatticeParams::new(300.0, 3.0 * PI / 20.0, PI / 2.0, PI / 2.0, 0.05);
        harmonic_approximation(&p, &mut Diagnostics::new()).unwrap()
    }

    #[test]
    fn coefficient_identities() {
        let b = sta_coefficients(2.0, 5.0);
        assert!((b[0] - 2520.0 / 100.0).abs() < 1e-12);
        assert_eq!(b[5], -315.0);
        assert_eq!(b[6], 70.0);
        // endpoint condition: Σ b_n = 1 (the (t_f ω)⁻² parts cancel)
        let sum: f64 = b.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert_eq!(126.0 - 420.0 + 540.0 - 315.0 + 70.0, 1.0);
        assert_eq!(2520.0 - 12600.0 + 22680.0 - 17640.0 + 5040.0, 0.0);
    }

    #[test]
    fn b5_example() {
        // t_f ω = 10 → b_5 = 22680/100 + 126 = 352.8
        let b = sta_coefficients(2.0, 5.0);
        assert!((b[2] - 352.8).abs() < 1e-12);
    }

    #[test]
    fn endpoint_conditions_exact() {
        let h = model();
        let spec = TransportSpec { direction: Direction::X, distance: 21.0, t_f: 3.0 * h.t[0] };
        let traj = design_sta(&spec, &h).unwrap();
        assert_eq!(traj.position(Axis::X, 0.0), 0.0);
        assert_eq!(traj.velocity(Axis::X, 0.0), 0.0);
        assert_eq!(traj.acceleration(Axis::X, 0.0), 0.0);
        let d = traj.position(Axis::X, spec.t_f);
        assert!((d - 21.0).abs() < 1e-12 * 21.0);
        assert!(traj.velocity(Axis::X, spec.t_f).abs() < 1e-12 * 21.0 / spec.t_f);
        assert!(traj.acceleration(Axis::X, spec.t_f).abs() < 1e-11 * 21.0 / spec.t_f.powi(2));
        // single-axis transport leaves y untouched
        assert_eq!(traj.position(Axis::Y, 0.7 * spec.t_f), 0.0);
    }

    #[test]
    fn midpoint_symmetry() {
        let h = model();
        let spec = TransportSpec { direction: Direction::Y, distance: 10.0, t_f: 2.0 * h.t[1] };
        let traj = design_sta(&spec, &h).unwrap();
        let q = traj.position(Axis::Y, 0.5 * spec.t_f);
        assert!((q - 5.0).abs() < 1e-12);
        let qc = classical_path(&traj, &h, Axis::Y).unwrap();
        assert!((qc.position(0.5 * spec.t_f) - 5.0).abs() < 1e-12);
        assert!(qc.acceleration(0.5 * spec.t_f).abs() < 1e-10);
    }

    #[test]
    fn diagonal_decomposition() {
        let h = model();
        let spec = TransportSpec { direction: Direction::Diagonal, distance: 12.0, t_f: 1.0 };
        let traj = design_sta(&spec, &h).unwrap();
        let c = 12.0 / std::f64::consts::SQRT_2;
        assert!((traj.position(Axis::X, 1.0) - c).abs() < 1e-12);
        assert!((traj.position(Axis::Y, 1.0) - c).abs() < 1e-12);
    }

    /// The defining STA property: the forced-oscillator residual vanishes.
    #[test]
    fn auxiliary_equation_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = model();
        for _ in 0..40 {
            let t_f = rng.gen_range(0.5..8.0) * h.t[0];
            let d = rng.gen_range(1.0..300.0);
            let spec = TransportSpec { direction: Direction::X, distance: d, t_f };
            let traj = design_sta(&spec, &h).unwrap();
            let qc = classical_path(&traj, &h, Axis::X).unwrap();
            let w2 = h.omega_sq[0];
            for k in 0..=1000 {
                let t = t_f * k as f64 / 1000.0;
                let res = qc.acceleration(t)
                    + w2 * (qc.position(t) - traj.position(Axis::X, t))
                    + h.a_x;
                assert!(res.abs() <= 1e-10 * d * w2, "residual {res} at t = {t}");
            }
        }
    }

    #[test]
    fn scale_equivariance_exact() {
        let h = model();
        let t_f = 2.3 * h.t[0];
        let a = design_sta(&TransportSpec { direction: Direction::X, distance: 5.0, t_f }, &h).unwrap();
        let b = design_sta(&TransportSpec { direction: Direction::X, distance: 15.0, t_f }, &h).unwrap();
        for k in 0..=17 {
            let t = t_f * k as f64 / 17.0;
            let (pa, pb) = (3.0 * a.position(Axis::X, t), b.position(Axis::X, t));
            // exact up to rounding of the scaled coefficients
            assert!((pa - pb).abs() <= 1e-13 * b.distance[0]);
        }
    }

    /// As t_f ω → ∞ the trap path approaches the classical minimal path.
    #[test]
    fn long_time_limit() {
        let h = model();
        let sup = |t_f: f64| {
            let spec = TransportSpec { direction: Direction::Y, distance: 1.0, t_f };
            let traj = design_sta(&spec, &h).unwrap();
            let pc = minimal_polynomial();
            (0..=500)
                .map(|k| {
                    let s = k as f64 / 500.0;
                    (traj.position(Axis::Y, s * t_f) - pc.eval(s)).abs()
                })
                .fold(0.0, f64::max)
        };
        let t1 = 20.0 / h.omega[1];
        let e1 = sup(t1);
        let e2 = sup(2.0 * t1);
        assert!(e1 <= 10.0 / (t1 * h.omega[1]).powi(2));
        assert!(e2 <= e1 / 3.5, "not quadratic: {e1} vs {e2}");
    }

    #[test]
    fn axis_mismatch_detected() {
        let h = model();
        let spec = TransportSpec { direction: Direction::X, distance: 5.0, t_f: 1.0 };
        let traj = design_sta(&spec, &h).unwrap();
        let p2 = LatticeParams::new(700.0, 3.0 * PI / 20.0, PI / 2.0, PI / 2.0, 0.05);
        let h2 = harmonic_approximation(&p2, &mut Diagnostics::new()).unwrap();
        assert!(matches!(
            classical_path(&traj, &h2, Axis::X),
            Err(CoreError::AxisMismatch { .. })
        ));
    }
}
