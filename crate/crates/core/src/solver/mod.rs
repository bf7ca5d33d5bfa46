//! Pseudo-spectral time stepping of incompressible resistive Hall-MHD.
//!
//! Pressure is removed by Leray projection. Diffusion is integrated exactly
//! with the factors `exp(-nu |k|^2 t)`, `exp(-mu |k|^2 t)`, and the
//! nonlinear terms by classical RK4 in the transformed variables.

pub mod config;
pub mod initial;

use num_complex::Complex64;
use thiserror::Error as ThisError;

use crate::error::{Error, Result};
use crate::spectral::products::cross_samples;
use crate::spectral::{Grid, PhysicalSamples, SpectralField};

pub use config::{InitSpec, RunConfig};
pub use initial::{make_initial, whistler_eigenvalue, Initial};

/// Divergence tolerance for b after a step (b is never re-projected).
pub const DRIFT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SolverState {
    pub t: f64,
    pub u: SpectralField,
    pub b: SpectralField,
    pub step_count: u64,
    /// `int_0^t (nu ||grad u||^2 + mu ||grad b||^2)`, integrated with the
    /// same stages as the fields
    pub dissipated: f64,
}

impl SolverState {
    pub fn new(t: f64, u: SpectralField, b: SpectralField) -> Self {
        SolverState {
            t,
            u,
            b,
            step_count: 0,
            dissipated: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.b.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parameters {
    pub nu: f64,
    pub mu: f64,
    pub dt: f64,
    pub hall_on: bool,
    pub c_adv: f64,
    pub c_whistler: f64,
}

impl Parameters {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Parameters {
            nu: cfg.nu,
            mu: cfg.mu,
            dt: cfg.dt,
            hall_on: cfg.hall_on,
            c_adv: cfg.c_adv,
            c_whistler: cfg.c_whistler,
        }
    }
}

#[derive(Debug, ThisError)]
pub enum StepError {
    #[error("non-finite coefficients detected at t = {t}")]
    BlowUp { t: f64 },
    #[error("dt = {dt} exceeds the stability limit {limit:.6e} at t = {t}")]
    DtGate { t: f64, dt: f64, limit: f64 },
    #[error(transparent)]
    Other(#[from] Error),
}

pub struct Solver {
    grid: Grid,
    params: Parameters,
    half_u: Vec<f64>,
    full_u: Vec<f64>,
    half_b: Vec<f64>,
    full_b: Vec<f64>,
}

impl Solver {
    pub fn new(grid: &Grid, params: Parameters) -> Result<Self> {
        if !(params.dt > 0.0) || !(params.nu >= 0.0) || !(params.mu >= 0.0) {
            return Err(Error::param("need dt > 0 and non-negative diffusivities"));
        }
        let factor = |d: f64, tau: f64| -> Vec<f64> {
            grid.kmags()
                .iter()
                .map(|k| (-d * k * k * tau).exp())
                .collect()
        };
        Ok(Solver {
            grid: grid.clone(),
            params,
            half_u: factor(params.nu, params.dt / 2.0),
            full_u: factor(params.nu, params.dt),
            half_b: factor(params.mu, params.dt / 2.0),
            full_b: factor(params.mu, params.dt),
        })
    }

    pub fn params(&self) -> &Parameters {
        &self.params
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn rhs(
        &self,
        u: &SpectralField,
        b: &SpectralField,
    ) -> Result<(SpectralField, SpectralField)> {
        rhs(u, b, self.params.hall_on)
    }

    /// `min(c_adv / (k_cut max|u|), c_whistler / (k_cut^2 max|b|))`.
    pub fn dt_limit(&self, u: &SpectralField, b: &SpectralField) -> f64 {
        let kc = self.grid.dealias_cut() as f64;
        let (su, sb) = (u.sup_norm(), b.sup_norm());
        let adv = if su > 0.0 {
            self.params.c_adv / (kc * su)
        } else {
            f64::INFINITY
        };
        let whistler = if sb > 0.0 {
            self.params.c_whistler / (kc * kc * sb)
        } else {
            f64::INFINITY
        };
        adv.min(whistler)
    }

    /// `nu ||grad u||^2 + mu ||grad b||^2`.
    pub fn dissipation_rate(&self, u: &SpectralField, b: &SpectralField) -> f64 {
        self.params.nu * u.enstrophy_like() + self.params.mu * b.enstrophy_like()
    }

    pub fn step(&self, state: &SolverState) -> std::result::Result<SolverState, StepError> {
        let dt = self.params.dt;
        if !state.is_finite() {
            return Err(StepError::BlowUp { t: state.t });
        }
        let limit = self.dt_limit(&state.u, &state.b);
        if dt > limit * (1.0 + 1e-12) {
            return Err(StepError::DtGate {
                t: state.t,
                dt,
                limit,
            });
        }
        let (u0, b0) = (&state.u, &state.b);
        let d1 = self.dissipation_rate(u0, b0);
        let (k1u, k1b) = self.rhs(u0, b0)?;

        let stage = |base: &SpectralField, k: &SpectralField, h: f64, f: &[f64]| {
            let mut s = base.clone();
            s.axpy(h, k);
            s.scale_modes(f);
            s
        };
        let u2 = stage(u0, &k1u, dt / 2.0, &self.half_u);
        let b2 = stage(b0, &k1b, dt / 2.0, &self.half_b);
        let d2 = self.dissipation_rate(&u2, &b2);
        let (k2u, k2b) = self.rhs(&u2, &b2)?;

        let damp = |f: &SpectralField, m: &[f64]| {
            let mut s = f.clone();
            s.scale_modes(m);
            s
        };
        let mut u3 = damp(u0, &self.half_u);
        u3.axpy(dt / 2.0, &k2u);
        let mut b3 = damp(b0, &self.half_b);
        b3.axpy(dt / 2.0, &k2b);
        let d3 = self.dissipation_rate(&u3, &b3);
        let (k3u, k3b) = self.rhs(&u3, &b3)?;

        let mut u4 = damp(u0, &self.full_u);
        u4.axpy(dt, &damp(&k3u, &self.half_u));
        let mut b4 = damp(b0, &self.full_b);
        b4.axpy(dt, &damp(&k3b, &self.half_b));
        let d4 = self.dissipation_rate(&u4, &b4);
        let (k4u, k4b) = self.rhs(&u4, &b4)?;

        let combine = |x0: &SpectralField,
                       k1: &SpectralField,
                       k2: &SpectralField,
                       k3: &SpectralField,
                       k4: &SpectralField,
                       half: &[f64],
                       full: &[f64]| {
            let mut mid = k2.clone();
            mid.axpy(1.0, k3);
            mid.scale_modes(half);
            let mut out = damp(x0, full);
            out.axpy(dt / 6.0, &damp(k1, full));
            out.axpy(dt / 3.0, &mid);
            out.axpy(dt / 6.0, k4);
            out
        };
        let u_new = combine(u0, &k1u, &k2u, &k3u, &k4u, &self.half_u, &self.full_u);
        let b_new = combine(b0, &k1b, &k2b, &k3b, &k4b, &self.half_b, &self.full_b);
        let t = state.t + dt;
        if !u_new.is_finite() || !b_new.is_finite() {
            return Err(StepError::BlowUp { t });
        }
        let u_new = u_new.leray_project()?;
        let drift = b_new.divergence_defect();
        if drift > DRIFT_TOL {
            return Err(Error::Invariant(format!("div b drifted to {drift:e} at t = {t}")).into());
        }
        let mut b_new = b_new;
        b_new.refresh_solenoidal();
        Ok(SolverState {
            t,
            u: u_new,
            b: b_new,
            step_count: state.step_count + 1,
            dissipated: state.dissipated + dt / 6.0 * (d1 + 2.0 * d2 + 2.0 * d3 + d4),
        })
    }
}

/// Nonlinear tendencies `du = -P div(u u - b b)` and
/// `db = curl((u - J) x b)` with `J = curl b` (the `J` term only when
/// `hall_on`). Products are dealiased.
pub fn rhs(
    u: &SpectralField,
    b: &SpectralField,
    hall_on: bool,
) -> Result<(SpectralField, SpectralField)> {
    u.grid().ensure_same(b.grid())?;
    u.require_solenoidal("u")?;
    b.require_solenoidal("b")?;
    let grid = u.grid();
    let len = grid.len();
    let up = u.to_physical();
    let bp = b.to_physical();

    // symmetric stress u_i u_j - b_i b_j, stored as diagonal and (01, 02, 12)
    let pairs = [[(0, 0), (1, 1), (2, 2)], [(0, 1), (0, 2), (1, 2)]];
    let mut parts = Vec::with_capacity(2);
    for set in pairs {
        let comps = set
            .iter()
            .map(|&(i, j)| {
                let (ui, uj, bi, bj) = (up.comp(i), up.comp(j), bp.comp(i), bp.comp(j));
                (0..len).map(|x| ui[x] * uj[x] - bi[x] * bj[x]).collect()
            })
            .collect();
        parts.push(
            SpectralField::from_physical(grid, &PhysicalSamples::new(grid.n(), comps)?)?
                .dealiased(),
        );
    }
    let (d, o) = (&parts[0], &parts[1]);
    let i = Complex64::new(0.0, 1.0);
    let mut div = vec![vec![Complex64::default(); len]; 3];
    for idx in 0..len {
        let k = grid.deriv_wavevector(idx);
        let t = [
            [d.comp(0)[idx], o.comp(0)[idx], o.comp(1)[idx]],
            [o.comp(0)[idx], d.comp(1)[idx], o.comp(2)[idx]],
            [o.comp(1)[idx], o.comp(2)[idx], d.comp(2)[idx]],
        ];
        for (r, row) in t.iter().enumerate() {
            div[r][idx] = i * (row[0] * k[0] + row[1] * k[1] + row[2] * k[2]);
        }
    }
    let du = SpectralField::from_components(grid, div)?
        .leray_project()?
        .scaled(-1.0);

    let carrier = if hall_on {
        let jp = b.curl()?.to_physical();
        let comps = (0..3)
            .map(|c| {
                up.comp(c)
                    .iter()
                    .zip(jp.comp(c))
                    .map(|(a, j)| a - j)
                    .collect()
            })
            .collect();
        PhysicalSamples::new(grid.n(), comps)?
    } else {
        up
    };
    let emf = SpectralField::from_physical(grid, &cross_samples(&carrier, &bp)?)?.dealiased();
    let db = emf.curl()?;
    Ok((du, db))
}

/// `||f||_2^2 / 2`.
pub fn energy(f: &SpectralField) -> f64 {
    0.5 * f.inner(f)
}

/// `int A . b` with `A` the divergence-free vector potential.
pub fn magnetic_helicity(b: &SpectralField) -> Result<f64> {
    Ok(b.vector_potential()?.inner(b))
}

/// `int curl((curl b) x b) . b`, zero up to round-off.
pub fn hall_power(b: &SpectralField) -> Result<f64> {
    let j = b.curl()?;
    let force = crate::spectral::products::cross(&j, b)?.curl()?;
    Ok(force.inner(b))
}

#[cfg(test)]
mod tests {
    use super::initial::abc_field;
    use super::*;
    use crate::spectral::random::{random_solenoidal, rng_from_seed, Band};

    fn params(nu: f64, mu: f64, dt: f64) -> Parameters {
        Parameters {
            nu,
            mu,
            dt,
            hall_on: true,
            c_adv: 1.0,
            c_whistler: 1.0,
        }
    }

    #[test]
    fn zero_fields_have_zero_tendency() {
        let grid = Grid::new(8).unwrap();
        let z = SpectralField::zero_vector(&grid);
        let (du, db) = rhs(&z, &z, true).unwrap();
        assert!(du.is_zero() && db.is_zero());
    }

    #[test]
    fn beltrami_b_is_annihilated() {
        let grid = Grid::new(16).unwrap();
        let b = abc_field(&grid, 1.0).unwrap();
        let z = SpectralField::zero_vector(&grid);
        let (du, db) = rhs(&z, &b, true).unwrap();
        assert!(du.sup_norm() <= 1e-11 && db.sup_norm() <= 1e-11);
    }

    #[test]
    fn non_solenoidal_input_is_rejected() {
        let grid = Grid::new(8).unwrap();
        let mut u = SpectralField::zero_vector(&grid);
        u.set_mode(0, [1, 0, 0], Complex64::new(1.0, 0.0)).unwrap();
        let z = SpectralField::zero_vector(&grid);
        assert!(matches!(rhs(&u, &z, true), Err(Error::Precondition(_))));
    }

    #[test]
    fn hall_term_does_no_work() {
        let grid = Grid::new(16).unwrap();
        let b = random_solenoidal(&grid, Band::new(1.0, 5.0).unwrap(), &mut rng_from_seed(8));
        let p = hall_power(&b).unwrap();
        assert!(p.abs() <= 1e-11 * b.inner(&b) * 25.0, "{p}");
    }

    #[test]
    fn beltrami_velocity_decays_exactly() {
        let grid = Grid::new(16).unwrap();
        let u0 = abc_field(&grid, 1.0).unwrap();
        let solver = Solver::new(&grid, params(0.1, 0.1, 0.01)).unwrap();
        let mut state = SolverState::new(0.0, u0.clone(), SpectralField::zero_vector(&grid));
        for _ in 0..100 {
            state = solver.step(&state).unwrap();
        }
        let exact = u0.scaled((-0.1f64).exp());
        let err = (&state.u - &exact).l2_norm() / exact.l2_norm();
        assert!(err <= 1e-8, "{err}");
        assert!(state.b.is_zero());
        assert_eq!(state.step_count, 100);
    }

    #[test]
    fn dt_gate_and_blow_up() {
        let grid = Grid::new(16).unwrap();
        let b = abc_field(&grid, 10.0).unwrap();
        let z = SpectralField::zero_vector(&grid);
        let solver = Solver::new(&grid, params(0.1, 0.1, 0.01)).unwrap();
        let state = SolverState::new(0.0, z.clone(), b);
        assert!(matches!(solver.step(&state), Err(StepError::DtGate { .. })));
        let mut bad = z.clone();
        bad.set_mode(0, [0, 1, 0], Complex64::new(f64::NAN, 0.0))
            .unwrap();
        let state = SolverState::new(0.5, bad, z);
        assert!(matches!(solver.step(&state), Err(StepError::BlowUp { t }) if t == 0.5));
    }
}
