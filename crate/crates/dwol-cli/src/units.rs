//! Tagged physical quantities in the configuration file.
//!
//! Every physical number in a config carries an explicit unit string, e.g.
//! `"300 E_R"`, `"158 l_x"`, `"4 T_x"`, `"0.5 pi"`, `"27 deg"`. Internally
//! everything lives in `ħ = m = 1`, `k_L = 1` units; SI anchors (a laser
//! wave number in 1/m and a mass in kg) turn metres, seconds and joules into
//! internal numbers when given.

use anyhow::{anyhow, bail, Result};
use serde::Deserialize;

/// Reduced Planck constant, J·s (for SI ingestion only).
pub const HBAR_SI: f64 = 1.054_571_817e-34;

#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub unit: String,
}

impl std::str::FromStr for Quantity {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        let mut parts = trimmed.splitn(2, char::is_whitespace);
        let value: f64 = parts
            .next()
            .ok_or_else(|| anyhow!("empty quantity"))?
            .parse()
            .map_err(|e| anyhow!("bad number in quantity '{trimmed}': {e}"))?;
        let unit = parts.next().unwrap_or("").trim().to_string();
        Ok(Quantity { value, unit })
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// SI anchors fixing the internal unit system against the laboratory.
#[derive(Debug, Clone, Copy)]
pub struct SiAnchors {
    /// metres per internal length unit (= 1/k_L in metres)
    pub length_m: f64,
    /// seconds per internal time unit
    pub time_s: f64,
    /// joules per internal energy unit
    pub energy_j: f64,
}

impl SiAnchors {
    pub fn from_laser(k_l_per_m: f64, mass_kg: f64) -> Self {
        let length_m = 1.0 / k_l_per_m;
        let energy_j = HBAR_SI * HBAR_SI / (mass_kg * length_m * length_m);
        let time_s = HBAR_SI / energy_j;
        Self { length_m, time_s, energy_j }
    }
}

/// Derived scales available once the lattice model exists.
#[derive(Debug, Clone)]
pub struct Scales {
    pub k_l: f64,
    pub e_r: f64,
    /// Zero-point lengths (x, y, z); z may be infinite.
    pub l: [f64; 3],
    /// Oscillation periods (x, y, z).
    pub t: [f64; 3],
    /// Optional diagonal length unit supplied by configuration.
    pub l_r: Option<f64>,
    pub si: Option<SiAnchors>,
}

impl Scales {
    /// Bare scales before the harmonic model exists (angles, depths, wave
    /// numbers only).
    pub fn bare(k_l: f64, e_r: f64, si: Option<SiAnchors>) -> Self {
        Self { k_l, e_r, l: [f64::NAN; 3], t: [f64::NAN; 3], l_r: None, si }
    }

    pub fn energy(&self, q: &Quantity) -> Result<f64> {
        match q.unit.as_str() {
            "E_R" | "Er" | "recoil" => Ok(q.value * self.e_r),
            "J" => {
                let si = self.si.ok_or_else(|| anyhow!("'J' needs SI anchors (k_l, mass)"))?;
                Ok(q.value / si.energy_j)
            }
            "" => Ok(q.value),
            other => bail!("unknown energy unit '{other}' (use E_R or J)"),
        }
    }

    pub fn length(&self, q: &Quantity) -> Result<f64> {
        let scaled = |l: f64, name: &str| -> Result<f64> {
            if !l.is_finite() {
                bail!("unit '{name}' is not defined for this parameter set");
            }
            Ok(q.value * l)
        };
        match q.unit.as_str() {
            "l_x" => scaled(self.l[0], "l_x"),
            "l_y" => scaled(self.l[1], "l_y"),
            "l_z" => scaled(self.l[2], "l_z"),
            "l_r" => {
                let lr = self
                    .l_r
                    .ok_or_else(|| anyhow!("'l_r' used but transport.l_r is not configured"))?;
                Ok(q.value * lr)
            }
            "1/k_L" | "/k_L" | "k_L^-1" => Ok(q.value / self.k_l),
            "m" => {
                let si = self.si.ok_or_else(|| anyhow!("'m' needs SI anchors"))?;
                Ok(q.value / si.length_m)
            }
            "" => Ok(q.value),
            other => bail!("unknown length unit '{other}' (use l_x, l_y, l_z, l_r, 1/k_L or m)"),
        }
    }

    pub fn time(&self, q: &Quantity) -> Result<f64> {
        let scaled = |t: f64, name: &str| -> Result<f64> {
            if !t.is_finite() {
                bail!("unit '{name}' is not defined for this parameter set");
            }
            Ok(q.value * t)
        };
        match q.unit.as_str() {
            "T_x" => scaled(self.t[0], "T_x"),
            "T_y" => scaled(self.t[1], "T_y"),
            "T_z" => scaled(self.t[2], "T_z"),
            "s" => {
                let si = self.si.ok_or_else(|| anyhow!("'s' needs SI anchors"))?;
                Ok(q.value / si.time_s)
            }
            "" => Ok(q.value),
            other => bail!("unknown time unit '{other}' (use T_x, T_y or s)"),
        }
    }

    pub fn wave_number(&self, q: &Quantity) -> Result<f64> {
        match q.unit.as_str() {
            "k_L" => Ok(q.value * self.k_l),
            "1/m" => {
                let si = self.si.ok_or_else(|| anyhow!("'1/m' needs SI anchors"))?;
                Ok(q.value * si.length_m)
            }
            "" => Ok(q.value),
            other => bail!("unknown wave-number unit '{other}' (use k_L or 1/m)"),
        }
    }
}

pub fn angle(q: &Quantity) -> Result<f64> {
    match q.unit.as_str() {
        "rad" | "" => Ok(q.value),
        "deg" => Ok(q.value.to_radians()),
        "pi" => Ok(q.value * std::f64::consts::PI),
        other => bail!("unknown angle unit '{other}' (use rad, deg or pi)"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_resolve() {
        let q: Quantity = "300 E_R".parse().unwrap();
        assert_eq!(q.value, 300.0);
        assert_eq!(q.unit, "E_R");
        let scales = Scales::bare(1.0, 0.5, None);
        assert_eq!(scales.energy(&q).unwrap(), 150.0);
        assert_eq!(angle(&"0.5 pi".parse().unwrap()).unwrap(), std::f64::consts::FRAC_PI_2);
        assert!((angle(&"90 deg".parse().unwrap()).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!(scales.length(&"4 l_x".parse().unwrap()).is_err());
    }

    #[test]
    fn si_round_trip() {
        // Rb-87 in an 814.5 nm lattice
        let k_l = 2.0 * std::f64::consts::PI / 814.5e-9;
        let mass = 1.44316e-25;
        let si = SiAnchors::from_laser(k_l, mass);
        let scales = Scales::bare(1.0, 0.5, Some(si));
        // E_R in joules: ħ²k²/2m — converting it back must give 0.5 internal
        let er_j = HBAR_SI * HBAR_SI * k_l * k_l / (2.0 * mass);
        let internal = scales.energy(&Quantity { value: er_j, unit: "J".into() }).unwrap();
        assert!((internal - 0.5).abs() < 1e-12);
        // one laser wavelength = 2π internal
        let lam = scales
            .length(&Quantity { value: 814.5e-9, unit: "m".into() })
            .unwrap();
        assert!((lam - 2.0 * std::f64::consts::PI).abs() < 1e-10);
    }
}
