//! Periodic 3D fields in Fourier representation.
//!
//! Derivatives, curl and Leray projection are exact Fourier multipliers.
//! Norms are collocation quadratures on the `n^3` grid; the `L^inf` norm is
//! the maximum over collocation points (optionally on a zero-padded grid),
//! an approximation of the true supremum.

pub mod codec;
mod fft;
mod field;
mod grid;
pub mod products;
pub mod random;

pub use field::{PhysicalSamples, SpectralField, SOLENOIDAL_TOL};
pub use grid::{DealiasRule, Grid};
