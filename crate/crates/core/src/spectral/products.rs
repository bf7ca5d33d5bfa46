//! Pseudo-spectral products with truncation to the dealiasing radius.
//!
//! Inputs are assumed band-limited to the grid's dealiasing radius; with
//! `3 * cut < n` every retained mode of a quadratic product is then exact.

use super::field::{PhysicalSamples, SpectralField};
use super::grid::Grid;
use crate::error::{Error, Result};

fn check_vector(s: &PhysicalSamples, what: &str) -> Result<()> {
    if s.ncomp() != 3 {
        return Err(Error::dim(format!(
            "{what} needs 3 components, got {}",
            s.ncomp()
        )));
    }
    Ok(())
}

/// Pointwise `a x c`.
pub fn cross_samples(a: &PhysicalSamples, c: &PhysicalSamples) -> Result<PhysicalSamples> {
    check_vector(a, "cross product")?;
    check_vector(c, "cross product")?;
    if a.n() != c.n() {
        return Err(Error::dim("sample grids differ"));
    }
    let len = a.len();
    let (ax, ay, az) = (a.comp(0), a.comp(1), a.comp(2));
    let (cx, cy, cz) = (c.comp(0), c.comp(1), c.comp(2));
    let mut x = vec![0.0; len];
    let mut y = vec![0.0; len];
    let mut z = vec![0.0; len];
    for i in 0..len {
        x[i] = ay[i] * cz[i] - az[i] * cy[i];
        y[i] = az[i] * cx[i] - ax[i] * cz[i];
        z[i] = ax[i] * cy[i] - ay[i] * cx[i];
    }
    PhysicalSamples::new(a.n(), vec![x, y, z])
}

/// Pointwise `(a . grad) g` from samples of `a` and of the gradient tensor
/// of `g` (component `3 * i + j = d_j g_i`).
pub fn dot_grad_samples(a: &PhysicalSamples, grad_g: &PhysicalSamples) -> Result<PhysicalSamples> {
    check_vector(a, "advection")?;
    if grad_g.ncomp() != 9 {
        return Err(Error::dim("advection needs a 9-component gradient tensor"));
    }
    if a.n() != grad_g.n() {
        return Err(Error::dim("sample grids differ"));
    }
    let len = a.len();
    let mut out = vec![vec![0.0; len]; 3];
    for (i, o) in out.iter_mut().enumerate() {
        for j in 0..3 {
            let aj = a.comp(j);
            let gij = grad_g.comp(3 * i + j);
            for (idx, v) in o.iter_mut().enumerate() {
                *v += aj[idx] * gij[idx];
            }
        }
    }
    PhysicalSamples::new(a.n(), out)
}

/// Transform samples back and truncate to the dealiasing radius.
pub fn to_dealiased(grid: &Grid, samples: &PhysicalSamples) -> Result<SpectralField> {
    Ok(SpectralField::from_physical(grid, samples)?.dealiased())
}

/// Dealiased `a x c`.
pub fn cross(a: &SpectralField, c: &SpectralField) -> Result<SpectralField> {
    a.grid().ensure_same(c.grid())?;
    let prod = cross_samples(&a.to_physical(), &c.to_physical())?;
    to_dealiased(a.grid(), &prod)
}

/// Dealiased `(a . grad) g`.
pub fn dot_grad(a: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    a.grid().ensure_same(g.grid())?;
    let prod = dot_grad_samples(&a.to_physical(), &g.gradient_tensor()?.to_physical())?;
    to_dealiased(a.grid(), &prod)
}

/// Dealiased `a x (curl g)`.
pub fn cross_curl(a: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    cross(a, &g.curl()?)
}
