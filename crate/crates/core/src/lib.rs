//! Pseudo-spectral solver for 3D incompressible resistive Hall-MHD on the
//! periodic torus, with Littlewood-Paley diagnostics for a low-frequency
//! Besov regularity criterion.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod littlewood_paley;
pub mod monitor;
pub mod paraproduct;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
