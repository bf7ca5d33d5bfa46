//! Binary checkpoint codec.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic   4 bytes  "HMHD"
//! version u32
//! n       u32
//! t       f64
//! nu      f64
//! mu      f64
//! u       3 * n^3 * (re f64, im f64)   component-major, then storage order
//! b       same as u
//! ```
//!
//! Storage order is the grid's `(i * n + j) * n + l` with FFT indices along
//! x, y, z.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::{DealiasRule, Grid};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"HMHD";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 8 * 3;

#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub t: f64,
    pub nu: f64,
    pub mu: f64,
    pub u: SpectralField,
    pub b: SpectralField,
}

pub fn encode(t: f64, nu: f64, mu: f64, u: &SpectralField, b: &SpectralField) -> Result<Vec<u8>> {
    u.grid().ensure_same(b.grid())?;
    if u.ncomp() != 3 || b.ncomp() != 3 {
        return Err(Error::dim("checkpoint fields must be vectors"));
    }
    let n = u.grid().n();
    let mut out = Vec::with_capacity(HEADER_LEN + 2 * 3 * n * n * n * 16);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    for v in [t, nu, mu] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for field in [u, b] {
        for c in field.components() {
            for z in c {
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
    }
    Ok(out)
}

pub fn decode(bytes: &[u8], rule: DealiasRule) -> std::result::Result<Checkpoint, String> {
    if bytes.len() < HEADER_LEN {
        return Err(format!(
            "file holds {} bytes, header needs {HEADER_LEN}",
            bytes.len()
        ));
    }
    if &bytes[0..4] != MAGIC {
        return Err("bad magic".into());
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(format!("unsupported version {version}"));
    }
    let n = u32_at(8) as usize;
    let grid = Grid::with_rule(n, rule).map_err(|e| e.to_string())?;
    let (t, nu, mu) = (f64_at(12), f64_at(20), f64_at(28));
    let len = n * n * n;
    let expected = HEADER_LEN + 2 * 3 * len * 16;
    if bytes.len() != expected {
        return Err(format!(
            "expected {expected} bytes for n={n}, found {}",
            bytes.len()
        ));
    }
    let mut offset = HEADER_LEN;
    let mut read_field = || {
        let comps = (0..3)
            .map(|_| {
                (0..len)
                    .map(|_| {
                        let z = Complex64::new(f64_at(offset), f64_at(offset + 8));
                        offset += 16;
                        z
                    })
                    .collect()
            })
            .collect();
        SpectralField::from_components(&grid, comps).map_err(|e| e.to_string())
    };
    let u = read_field()?;
    let b = read_field()?;
    Ok(Checkpoint { t, nu, mu, u, b })
}

pub fn write_checkpoint(
    path: &Path,
    t: f64,
    nu: f64,
    mu: f64,
    u: &SpectralField,
    b: &SpectralField,
) -> Result<()> {
    let bytes = encode(t, nu, mu, u, b)?;
    let mut file = fs::File::create(path)?;
    file.write_all(&bytes)?;
    Ok(())
}

pub fn read_checkpoint(path: &Path, rule: DealiasRule) -> Result<Checkpoint> {
    let bytes = fs::read(path).map_err(|e| Error::Checkpoint {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    decode(&bytes, rule).map_err(|reason| Error::Checkpoint {
        path: path.to_path_buf(),
        reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_fixed() {
        let g = Grid::new(8).unwrap();
        let z = SpectralField::zero_vector(&g);
        let bytes = encode(1.5, 0.1, 0.2, &z, &z).unwrap();
        assert_eq!(&bytes[0..4], b"HMHD");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 8);
        assert_eq!(f64::from_le_bytes(bytes[12..20].try_into().unwrap()), 1.5);
        assert_eq!(f64::from_le_bytes(bytes[20..28].try_into().unwrap()), 0.1);
        assert_eq!(f64::from_le_bytes(bytes[28..36].try_into().unwrap()), 0.2);
        assert_eq!(bytes.len(), 36 + 2 * 3 * 512 * 16);
    }

    #[test]
    fn truncated_file_is_rejected() {
        let g = Grid::new(8).unwrap();
        let z = SpectralField::zero_vector(&g);
        let bytes = encode(0.0, 0.1, 0.1, &z, &z).unwrap();
        assert!(decode(&bytes[..bytes.len() - 1], DealiasRule::TwoThirds).is_err());
        assert!(decode(&bytes[..10], DealiasRule::TwoThirds).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode(&bad, DealiasRule::TwoThirds).is_err());
    }

    #[test]
    fn coefficient_order_is_component_major() {
        let g = Grid::new(8).unwrap();
        let mut u = SpectralField::zero_vector(&g);
        u.set_mode(1, [0, 0, 1], Complex64::new(0.25, -0.5))
            .unwrap();
        let z = SpectralField::zero_vector(&g);
        let bytes = encode(0.0, 0.1, 0.1, &u, &z).unwrap();
        let idx = g.index_of([0, 0, 1]).unwrap();
        let off = 36 + (512 + idx) * 16;
        assert_eq!(
            f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap()),
            0.25
        );
        assert_eq!(
            f64::from_le_bytes(bytes[off + 8..off + 16].try_into().unwrap()),
            -0.5
        );
    }
}
