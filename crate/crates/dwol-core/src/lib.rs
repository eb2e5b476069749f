//! Single-atom transport in a moving double-well optical lattice (DWOL).
//!
//! The crate is organized around the transport workflow:
//!
//! * [`lattice`] — the full 3D optical potential, its harmonic approximation
//!   about a well minimum, and the derived physical scales,
//! * [`sta`] — invariant-based inverse engineering of the moving-trap
//!   trajectory (ninth-degree polynomial shortcut),
//! * [`esta`] — the perturbative correction to the shortcut built from the
//!   auxiliary functions `G_n` / `K_n` (closed-form Hermite–Gauss integrals
//!   plus brute-force quadrature oracles),
//! * [`dynamics`] — Fourier split-operator propagation in the comoving frame,
//!   imaginary-time ground states, overlaps and fidelities.
//!
//! All internal quantities use `ħ = m = 1` with the laser wave number
//! `k_L = 1`, so the recoil energy is `E_R = 1/2` and the unit cell along x
//! is `π`. Conversions from tagged user units happen once at ingestion (see
//! the CLI crate).

pub mod diag;
pub mod dynamics;
pub mod error;
pub mod esta;
pub mod lattice;
pub mod poly;
pub mod quad;
pub mod special;
pub mod sta;

pub use error::CoreError;

/// Shorthand used across the crate.
pub type C64 = num_complex::Complex64;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, CoreError>;
