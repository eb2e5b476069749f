//! Rectangular grids and complex wave fields, including the binary dump
//! format.
//!
//! Coordinates follow `x_i = origin + i Δx` with `Δx = extent / n` (the grid
//! is periodic, the right edge is the image of the left one). Axes with a
//! single point are inert reductions: they carry no volume weight and no
//! transform.

use std::io::{Read, Write};
use std::path::Path;

use crate::{CoreError, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Lab,
    Comoving,
}

impl Frame {
    pub fn as_str(self) -> &'static str {
        match self {
            Frame::Lab => "lab",
            Frame::Comoving => "comoving",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub n: [usize; 3],
    pub extent: [f64; 3],
    pub origin: [f64; 3],
}

impl GridSpec {
    /// Grid centred on `center`; singleton axes collapse onto the centre.
    pub fn centered(center: [f64; 3], extent: [f64; 3], n: [usize; 3]) -> Self {
        let origin = core::array::from_fn(|a| {
            if n[a] > 1 {
                center[a] - 0.5 * extent[a]
            } else {
                center[a]
            }
        });
        Self { n, extent, origin }
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        if self.n[axis] > 1 {
            self.extent[axis] / self.n[axis] as f64
        } else {
            self.extent[axis]
        }
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        if self.n[axis] > 1 {
            self.origin[axis] + i as f64 * self.spacing(axis)
        } else {
            self.origin[axis]
        }
    }

    /// Integration weight of one cell (active axes only).
    pub fn cell_volume(&self) -> f64 {
        let mut v = 1.0;
        for a in 0..3 {
            if self.n[a] > 1 {
                v *= self.spacing(a);
            }
        }
        v
    }

    /// FFT wave numbers along `axis` in standard DFT ordering.
    pub fn wavenumbers(&self, axis: usize) -> Vec<f64> {
        let n = self.n[axis];
        if n == 1 {
            return vec![0.0];
        }
        let dk = 2.0 * std::f64::consts::PI / self.extent[axis];
        (0..n)
            .map(|i| {
                let f = if i <= n / 2 { i as isize } else { i as isize - n as isize };
                f as f64 * dk
            })
            .collect()
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n[0] * (j + self.n[1] * k)
    }

    pub fn validate(&self) -> Result<()> {
        for a in 0..3 {
            if self.n[a] == 0 {
                return Err(CoreError::InvalidParams(format!("grid axis {a} has zero points")));
            }
            if self.n[a] > 1 && !(self.extent[a] > 0.0) {
                return Err(CoreError::InvalidParams(format!(
                    "grid axis {a}: extent {} must be > 0",
                    self.extent[a]
                )));
            }
        }
        Ok(())
    }

    /// Largest prime factor of the point counts (transform efficiency hint).
    pub fn worst_prime_factor(&self) -> usize {
        let factor = |mut n: usize| -> usize {
            let mut worst = 1;
            let mut p = 2;
            while p * p <= n {
                while n % p == 0 {
                    worst = worst.max(p);
                    n /= p;
                }
                p += 1;
            }
            if n > 1 {
                worst = worst.max(n);
            }
            worst
        };
        self.n.iter().map(|&n| factor(n.max(1))).max().unwrap()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub grid: GridSpec,
    pub data: Vec<C64>,
    pub time: f64,
    pub frame: Frame,
}

impl WaveField {
    pub fn zeros(grid: GridSpec, frame: Frame) -> Self {
        let data = vec![C64::new(0.0, 0.0); grid.len()];
        Self { grid, data, time: 0.0, frame }
    }

    /// Fill from a pointwise function of the coordinates.
    pub fn from_fn(grid: GridSpec, frame: Frame, f: impl Fn([f64; 3]) -> C64) -> Self {
        let mut field = Self::zeros(grid, frame);
        let n = field.grid.n;
        for k in 0..n[2] {
            let z = field.grid.coord(2, k);
            for j in 0..n[1] {
                let y = field.grid.coord(1, j);
                for i in 0..n[0] {
                    let x = field.grid.coord(0, i);
                    let idx = field.grid.index(i, j, k);
                    field.data[idx] = f([x, y, z]);
                }
            }
        }
        field
    }

    pub fn norm_sqr(&self) -> f64 {
        let dv = self.grid.cell_volume();
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>() * dv
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            for c in self.data.iter_mut() {
                *c *= inv;
            }
        }
    }

    fn check_compatible(&self, other: &WaveField) -> Result<()> {
        if self.grid != other.grid {
            return Err(CoreError::GridMismatch);
        }
        if self.frame != other.frame {
            return Err(CoreError::FrameMismatch {
                expected: self.frame.as_str(),
                found: other.frame.as_str(),
            });
        }
        Ok(())
    }

    /// Discrete inner product `⟨self|other⟩` with cell-volume weight.
    pub fn overlap(&self, other: &WaveField) -> Result<C64> {
        self.check_compatible(other)?;
        let dv = self.grid.cell_volume();
        let acc: C64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(acc * dv)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &WaveField) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    /// Largest boundary amplitude relative to the global peak.
    pub fn boundary_fraction(&self) -> f64 {
        let n = self.grid.n;
        let peak = self.data.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        let mut look = |i: usize, j: usize, k: usize| {
            worst = worst.max(self.data[self.grid.index(i, j, k)].norm());
        };
        for a in 0..3 {
            if n[a] <= 1 {
                continue;
            }
            for &edge in &[0usize, n[a] - 1] {
                match a {
                    0 => {
                        for k in 0..n[2] {
                            for j in 0..n[1] {
                                look(edge, j, k);
                            }
                        }
                    }
                    1 => {
                        for k in 0..n[2] {
                            for i in 0..n[0] {
                                look(i, edge, k);
                            }
                        }
                    }
                    _ => {
                        for j in 0..n[1] {
                            for i in 0..n[0] {
                                look(i, j, edge);
                            }
                        }
                    }
                }
            }
        }
        worst / peak
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

const DUMP_MAGIC: &[u8; 8] = b"DWOLWAVE";
const DUMP_VERSION: u32 = 1;

/// Write the binary dump: magic, version, point counts, spacings, origins,
/// frame tag byte, then interleaved re/im f64 pairs in x-fastest order, all
/// little-endian.
pub fn dump_wavefield(field: &WaveField, path: &Path) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    w.write_all(DUMP_MAGIC)?;
    w.write_all(&DUMP_VERSION.to_le_bytes())?;
    for a in 0..3 {
        w.write_all(&(field.grid.n[a] as u64).to_le_bytes())?;
    }
    for a in 0..3 {
        w.write_all(&field.grid.spacing(a).to_le_bytes())?;
    }
    for a in 0..3 {
        w.write_all(&field.grid.origin[a].to_le_bytes())?;
    }
    w.write_all(&[match field.frame {
        Frame::Lab => 0u8,
        Frame::Comoving => 1u8,
    }])?;
    for c in &field.data {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn load_wavefield(path: &Path) -> Result<WaveField> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(CoreError::MalformedDump("bad magic".into()));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    if u32::from_le_bytes(b4) != DUMP_VERSION {
        return Err(CoreError::MalformedDump("unsupported version".into()));
    }
    let mut b8 = [0u8; 8];
    let mut read_u64 = |r: &mut dyn Read| -> Result<u64> {
        r.read_exact(&mut b8)?;
        Ok(u64::from_le_bytes(b8))
    };
    let n: [usize; 3] = [
        read_u64(&mut r)? as usize,
        read_u64(&mut r)? as usize,
        read_u64(&mut r)? as usize,
    ];
    let mut f8 = [0u8; 8];
    let mut read_f64 = |r: &mut dyn Read| -> Result<f64> {
        r.read_exact(&mut f8)?;
        Ok(f64::from_le_bytes(f8))
    };
    let spacing: [f64; 3] =
        [read_f64(&mut r)?, read_f64(&mut r)?, read_f64(&mut r)?];
    let origin: [f64; 3] = [read_f64(&mut r)?, read_f64(&mut r)?, read_f64(&mut r)?];
    let mut tag = [0u8; 1];
    r.read_exact(&mut tag)?;
    let frame = match tag[0] {
        0 => Frame::Lab,
        1 => Frame::Comoving,
        other => return Err(CoreError::MalformedDump(format!("bad frame tag {other}"))),
    };
    let extent = core::array::from_fn(|a| {
        if n[a] > 1 {
            spacing[a] * n[a] as f64
        } else {
            spacing[a]
        }
    });
    let grid = GridSpec { n, extent, origin };
    let total = grid.len();
    if total == 0 || total > (1usize << 32) {
        return Err(CoreError::MalformedDump(format!("implausible size {n:?}")));
    }
    let mut data = Vec::with_capacity(total);
    for _ in 0..total {
        let re = read_f64(&mut r)?;
        let im = read_f64(&mut r)?;
        data.push(C64::new(re, im));
    }
    Ok(WaveField { grid, data, time: 0.0, frame })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_and_volume() {
        let g = GridSpec::centered([0.0, 0.0, 0.0], [10.0, 4.0, 1.0], [10, 4, 1]);
        assert_eq!(g.spacing(0), 1.0);
        assert_eq!(g.coord(0, 0), -5.0);
        assert_eq!(g.coord(0, 9), 4.0);
        assert_eq!(g.coord(2, 0), 0.0);
        assert_eq!(g.cell_volume(), 1.0);
        let k = g.wavenumbers(0);
        assert_eq!(k[0], 0.0);
        assert!(k[6] < 0.0);
        assert_eq!(g.worst_prime_factor(), 5);
    }

    #[test]
    fn norm_and_overlap() {
        let g = GridSpec::centered([0.0; 3], [40.0, 1.0, 1.0], [512, 1, 1]);
        let l = 1.3_f64;
        let mut a = WaveField::from_fn(g.clone(), Frame::Comoving, |r| {
            C64::new((-r[0] * r[0] / (4.0 * l * l)).exp(), 0.0)
        });
        a.normalize();
        assert!((a.norm() - 1.0).abs() < 1e-12);
        assert!((a.fidelity(&a).unwrap() - 1.0).abs() < 1e-12);

        // displaced Gaussian: |<a|b>|² = exp(-δ²/(4 l²))
        let delta = 0.9_f64;
        let mut b = WaveField::from_fn(g, Frame::Comoving, |r| {
            C64::new((-(r[0] - delta) * (r[0] - delta) / (4.0 * l * l)).exp(), 0.0)
        });
        b.normalize();
        let f = a.fidelity(&b).unwrap();
        // |<a|b>| = exp(-δ²/(8l²)) for normalized Gaussians of width l
        let expect = (-delta * delta / (4.0 * l * l)).exp();
        assert!((f - expect).abs() < 1e-10, "{f} vs {expect}");
    }

    #[test]
    fn mismatches_detected() {
        let g1 = GridSpec::centered([0.0; 3], [10.0, 1.0, 1.0], [16, 1, 1]);
        let g2 = GridSpec::centered([0.0; 3], [12.0, 1.0, 1.0], [16, 1, 1]);
        let a = WaveField::zeros(g1.clone(), Frame::Comoving);
        let b = WaveField::zeros(g2, Frame::Comoving);
        assert!(matches!(a.overlap(&b), Err(CoreError::GridMismatch)));
        let c = WaveField::zeros(g1, Frame::Lab);
        assert!(matches!(a.overlap(&c), Err(CoreError::FrameMismatch { .. })));
    }

    #[test]
    fn dump_round_trip() {
        let g = GridSpec::centered([0.5, -1.0, 0.0], [8.0, 6.0, 1.0], [8, 4, 1]);
        let field = WaveField::from_fn(g, Frame::Lab, |r| C64::new(r[0] * 0.1, r[1] - 0.2));
        let dir = std::env::temp_dir().join("dwol-test-dump");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("field.wf");
        dump_wavefield(&field, &path).unwrap();
        let loaded = load_wavefield(&path).unwrap();
        assert_eq!(loaded.frame, field.frame);
        assert_eq!(loaded.grid.n, field.grid.n);
        assert_eq!(loaded.data, field.data);
        for a in 0..3 {
            assert!((loaded.grid.origin[a] - field.grid.origin[a]).abs() < 1e-15);
            assert!((loaded.grid.spacing(a) - field.grid.spacing(a)).abs() < 1e-15);
        }
        std::fs::remove_file(path).ok();
    }
}
