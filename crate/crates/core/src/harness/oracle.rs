//! Brute-force reference evaluations, `O(n^6)`, independent of the FFT path.
//!
//! Only grids with `n <= 8` are accepted.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Grid, PhysicalSamples, SpectralField};

pub const MAX_N: usize = 8;

fn guard(n: usize) -> Result<()> {
    if n > MAX_N {
        return Err(Error::param(format!(
            "oracle refused: n = {n} exceeds {MAX_N}"
        )));
    }
    Ok(())
}

/// Integer phase `k . x` with `x = 2 pi j / n`, reduced mod n.
fn phase_table(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|m| Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64))
        .collect()
}

fn grid_index(n: usize, idx: usize) -> [usize; 3] {
    [idx / (n * n), (idx / n) % n, idx % n]
}

fn dot_mod(n: usize, k: [i64; 3], x: [usize; 3]) -> usize {
    let s: i64 = (0..3).map(|a| k[a] * x[a] as i64).sum();
    s.rem_euclid(n as i64) as usize
}

/// `c(k) = n^-3 sum_x f(x) e^{-i k.x}`, outer loop over k.
pub fn forward_by_mode(grid: &Grid, values: &[f64]) -> Result<Vec<Complex64>> {
    let n = grid.n();
    guard(n)?;
    let ph = phase_table(n);
    let norm = 1.0 / grid.len() as f64;
    Ok((0..grid.len())
        .map(|kidx| {
            let k = grid.wavevector(kidx);
            let mut acc = Complex64::default();
            for (xidx, v) in values.iter().enumerate() {
                acc += ph[dot_mod(n, k, grid_index(n, xidx))].conj() * v;
            }
            acc * norm
        })
        .collect())
}

/// Same sum with the outer loop over points, scattering into every mode.
pub fn forward_by_point(grid: &Grid, values: &[f64]) -> Result<Vec<Complex64>> {
    let n = grid.n();
    guard(n)?;
    let ph = phase_table(n);
    let mut out = vec![Complex64::default(); grid.len()];
    for (xidx, v) in values.iter().enumerate() {
        let x = grid_index(n, xidx);
        for (kidx, c) in out.iter_mut().enumerate() {
            *c += ph[dot_mod(n, grid.wavevector(kidx), x)].conj() * v;
        }
    }
    let norm = 1.0 / grid.len() as f64;
    out.iter_mut().for_each(|c| *c *= norm);
    Ok(out)
}

/// `f(x) = sum_k c(k) e^{i k.x}` at every collocation point (real part).
pub fn inverse(grid: &Grid, coeffs: &[Complex64]) -> Result<Vec<f64>> {
    let n = grid.n();
    guard(n)?;
    let ph = phase_table(n);
    Ok((0..grid.len())
        .map(|xidx| {
            let x = grid_index(n, xidx);
            let mut acc = Complex64::default();
            for (kidx, c) in coeffs.iter().enumerate() {
                acc += ph[dot_mod(n, grid.wavevector(kidx), x)] * c;
            }
            acc.re
        })
        .collect())
}

pub fn to_physical(f: &SpectralField) -> Result<PhysicalSamples> {
    let comps = f
        .components()
        .iter()
        .map(|c| inverse(f.grid(), c))
        .collect::<Result<Vec<_>>>()?;
    PhysicalSamples::new(f.grid().n(), comps)
}

pub fn from_physical(grid: &Grid, samples: &PhysicalSamples) -> Result<SpectralField> {
    let comps = (0..samples.ncomp())
        .map(|c| forward_by_mode(grid, samples.comp(c)))
        .collect::<Result<Vec<_>>>()?;
    SpectralField::from_components(grid, comps)
}

fn ik(grid: &Grid, kidx: usize) -> [Complex64; 3] {
    let k = grid.wavevector(kidx);
    let half = grid.n() as i64 / 2;
    // the n/2 mode has no well-defined derivative on a real grid
    k.map(|c| Complex64::new(0.0, if c == -half { 0.0 } else { c as f64 }))
}

/// `d f / d x_axis` by direct summation of the differentiated series.
pub fn derivative(f: &SpectralField, axis: usize) -> Result<SpectralField> {
    let grid = f.grid();
    let comps = f
        .components()
        .iter()
        .map(|c| {
            let d: Vec<Complex64> = c
                .iter()
                .enumerate()
                .map(|(i, z)| ik(grid, i)[axis] * z)
                .collect();
            forward_by_mode(grid, &inverse(grid, &d)?)
        })
        .collect::<Result<Vec<_>>>()?;
    SpectralField::from_components(grid, comps)
}

/// `P f = f - k (k . f) / |k|^2`, mode by mode.
pub fn leray(f: &SpectralField) -> Result<SpectralField> {
    guard(f.grid().n())?;
    let grid = f.grid();
    let mut comps = vec![vec![Complex64::default(); grid.len()]; 3];
    for kidx in 0..grid.len() {
        let k = ik(grid, kidx).map(|z| z.im);
        let k2: f64 = k.iter().map(|v| v * v).sum();
        let v = [f.comp(0)[kidx], f.comp(1)[kidx], f.comp(2)[kidx]];
        let kv = v[0] * k[0] + v[1] * k[1] + v[2] * k[2];
        for a in 0..3 {
            comps[a][kidx] = if k2 == 0.0 {
                v[a]
            } else {
                v[a] - kv * (k[a] / k2)
            };
        }
    }
    SpectralField::from_components(grid, comps)
}

/// Coefficients of the product `a b` on retained modes by triad sums
/// `sum_{p + q = k} a(p) b(q)` over retained `p`, `q`.
pub fn triad_product(grid: &Grid, a: &[Complex64], b: &[Complex64]) -> Result<Vec<Complex64>> {
    guard(grid.n())?;
    let mut out = vec![Complex64::default(); grid.len()];
    for (kidx, slot) in out.iter_mut().enumerate() {
        if !grid.is_retained(kidx) {
            continue;
        }
        let k = grid.wavevector(kidx);
        let mut acc = Complex64::default();
        for pidx in 0..grid.len() {
            if !grid.is_retained(pidx) || a[pidx] == Complex64::default() {
                continue;
            }
            let p = grid.wavevector(pidx);
            let q = [k[0] - p[0], k[1] - p[1], k[2] - p[2]];
            if let Some(qidx) = grid.index_of(q) {
                if grid.is_retained(qidx) {
                    acc += a[pidx] * b[qidx];
                }
            }
        }
        *slot = acc;
    }
    Ok(out)
}

fn curl_coeffs(grid: &Grid, f: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let mut out = vec![vec![Complex64::default(); grid.len()]; 3];
    for kidx in 0..grid.len() {
        let k = ik(grid, kidx);
        for a in 0..3 {
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            out[a][kidx] = k[b] * f[c][kidx] - k[c] * f[b][kidx];
        }
    }
    out
}

fn cross_coeffs(
    grid: &Grid,
    x: &[Vec<Complex64>],
    y: &[Vec<Complex64>],
) -> Result<Vec<Vec<Complex64>>> {
    (0..3)
        .map(|a| {
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            let p = triad_product(grid, &x[b], &y[c])?;
            let m = triad_product(grid, &x[c], &y[b])?;
            Ok(p.iter().zip(&m).map(|(u, v)| u - v).collect())
        })
        .collect()
}

/// Right-hand side of the Hall-MHD system built from triad sums:
/// `du = -P div(u u - b b)`, `db = curl((u - [curl b]) x b)`.
pub fn rhs(
    u: &SpectralField,
    b: &SpectralField,
    hall_on: bool,
) -> Result<(SpectralField, SpectralField)> {
    let grid = u.grid();
    guard(grid.n())?;
    let (uc, bc) = (u.components(), b.components());
    let mut div = vec![vec![Complex64::default(); grid.len()]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let uu = triad_product(grid, &uc[i], &uc[j])?;
            let bb = triad_product(grid, &bc[i], &bc[j])?;
            for kidx in 0..grid.len() {
                div[i][kidx] += ik(grid, kidx)[j] * (uu[kidx] - bb[kidx]);
            }
        }
    }
    let du = leray(&SpectralField::from_components(grid, div)?)?.scaled(-1.0);
    let mut carrier: Vec<Vec<Complex64>> = uc.to_vec();
    if hall_on {
        let j = curl_coeffs(grid, bc);
        for a in 0..3 {
            for (c, jv) in carrier[a].iter_mut().zip(&j[a]) {
                *c -= jv;
            }
        }
    }
    let emf = cross_coeffs(grid, &carrier, bc)?;
    let db = SpectralField::from_components(grid, curl_coeffs(grid, &emf))?;
    Ok((du, db))
}
