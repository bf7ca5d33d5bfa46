//! Named property suites behind `hallmhd verify`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::oracle;
use crate::error::{Error, Result};
use crate::littlewood_paley::{ChiProfile, LpPartition};
use crate::monitor::{flux_terms, COMPLETENESS_TOL, RESIDUAL_TOL};
use crate::paraproduct::{lemma_report, random_full, LemmaStats};
use crate::solver::initial::abc_field;
use crate::solver::{energy, hall_power, magnetic_helicity, rhs, Parameters, Solver, SolverState};
use crate::spectral::random::{normalize_rms, rng_from_seed};
use crate::spectral::{Grid, SpectralField};

pub const SUITE_GRIDS: [usize; 3] = [8, 16, 32];
pub const LEMMA_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Lp,
    Lemmas,
    Solver,
    Fluxes,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lp" => Ok(Suite::Lp),
            "lemmas" => Ok(Suite::Lemmas),
            "solver" => Ok(Suite::Solver),
            "fluxes" => Ok(Suite::Fluxes),
            "all" => Ok(Suite::All),
            other => Err(Error::param(format!(
                "unknown suite {other:?}; expected lp, lemmas, solver, fluxes or all"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    /// measured quantity compared against `limit`
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub n: usize,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub lemma_stats: Vec<LemmaStats>,
}

struct Collector {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Collector {
    fn at_most(&mut self, name: &str, value: f64, limit: f64) {
        self.checks.push(Check {
            suite: self.suite.into(),
            name: name.into(),
            passed: value <= limit,
            value,
            limit,
        });
    }
}

fn rel_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    let d = (a - b).l2_norm();
    let s = a.l2_norm().max(b.l2_norm());
    if s == 0.0 {
        d
    } else {
        d / s
    }
}

fn suite_lp(lp: &LpPartition, seed: u64, c: &mut Collector) -> Result<()> {
    c.at_most("partition_of_unity", lp.unity_defect(), 1e-12);
    let mut rng = rng_from_seed(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let f = random_full(lp.grid(), &mut rng);
        let mut sum = SpectralField::zero_vector(lp.grid());
        for block in lp.decompose(&f) {
            sum += &block;
        }
        worst = worst.max(rel_diff(&sum, &f));
    }
    c.at_most("reconstruction", worst, 1e-10);
    let f = random_full(lp.grid(), &mut rng);
    for s in [1.0, 2.0, 3.0] {
        let est = lp.sobolev_norms(&f, s);
        let (lo, hi) = lp.sobolev_envelope(s);
        let r = est.dyadic / est.direct;
        let outside = (lo - r).max(r - hi).max(0.0);
        c.at_most(&format!("sobolev_envelope_s{s}"), outside, 1e-12);
    }
    c.at_most(
        "chi_profile_valid",
        ChiProfile::Bridge.validate().map_or(1.0, |_| 0.0),
        0.0,
    );
    Ok(())
}

fn suite_lemmas(lp: &LpPartition, seed: u64, c: &mut Collector) -> Result<Vec<LemmaStats>> {
    let stats = lemma_report(lp, LEMMA_SAMPLES, seed)?;
    for s in &stats {
        let finite = s.max_ratio.is_finite() && s.mean_ratio.is_finite();
        c.at_most(
            &format!("{}_finite", s.lemma),
            if finite { 0.0 } else { 1.0 },
            0.0,
        );
    }
    Ok(stats)
}

fn suite_solver(grid: &Grid, seed: u64, c: &mut Collector) -> Result<()> {
    // Beltrami decay
    let (nu, dt, steps) = (0.05, 0.01, 20);
    let u0 = abc_field(grid, 1.0)?;
    let solver = Solver::new(
        grid,
        Parameters {
            nu,
            mu: nu,
            dt,
            hall_on: true,
            c_adv: 1.0,
            c_whistler: 1.0,
        },
    )?;
    let mut st = SolverState::new(0.0, u0.clone(), SpectralField::zero_vector(grid));
    for _ in 0..steps {
        st = solver
            .step(&st)
            .map_err(|e| Error::Invariant(e.to_string()))?;
    }
    let exact = u0.scaled((-nu * st.t).exp());
    c.at_most("beltrami_decay", rel_diff(&st.u, &exact), 1e-8);

    // structure of the tendencies
    let mut rng = rng_from_seed(seed);
    let u = normalize_rms(&random_full(grid, &mut rng), 0.3);
    let b = normalize_rms(&random_full(grid, &mut rng), 0.3);
    let (du, db) = rhs(&u, &b, true)?;
    c.at_most("du_solenoidal", du.divergence_defect(), 1e-12);
    c.at_most("db_solenoidal", db.divergence_defect(), 1e-12);
    let scale = b.curl()?.l2_norm().powi(2) * b.l2_norm();
    c.at_most(
        "hall_power_zero",
        hall_power(&b)?.abs() / scale.max(f64::MIN_POSITIVE),
        1e-12,
    );
    let power = du.inner(&u) + db.inner(&b);
    let pscale = du.l2_norm() * u.l2_norm() + db.l2_norm() * b.l2_norm();
    c.at_most("nonlinear_energy_neutral", power.abs() / pscale, 1e-12);

    // short ideal run well inside the stability limit
    let ideal_params = |dt| Parameters {
        nu: 0.0,
        mu: 0.0,
        dt,
        hall_on: true,
        c_adv: 1.0,
        c_whistler: 1.0,
    };
    let limit = Solver::new(grid, ideal_params(1.0))?.dt_limit(&u, &b);
    let ideal = Solver::new(grid, ideal_params((0.25 * limit).min(2.5e-3)))?;
    let mut st = SolverState::new(0.0, u.clone(), b.clone());
    let e0 = energy(&u) + energy(&b);
    let h0 = magnetic_helicity(&b)?;
    for _ in 0..10 {
        st = ideal
            .step(&st)
            .map_err(|e| Error::Invariant(e.to_string()))?;
    }
    let e1 = energy(&st.u) + energy(&st.b);
    c.at_most("ideal_energy_drift", (e1 - e0).abs() / e0, 1e-9);
    let h1 = magnetic_helicity(&st.b)?;
    c.at_most(
        "ideal_helicity_drift",
        (h1 - h0).abs() / h0.abs().max(1e-300),
        1e-9,
    );

    if grid.n() <= oracle::MAX_N {
        let (ou, ob) = oracle::rhs(&u, &b, true)?;
        c.at_most("rhs_oracle_u", rel_diff(&du, &ou), 1e-10);
        c.at_most("rhs_oracle_b", rel_diff(&db, &ob), 1e-10);
        let phys = u.to_physical();
        let back = oracle::from_physical(grid, &phys)?;
        c.at_most("transform_oracle", rel_diff(&back, &u), 1e-12);
        let mut worst: f64 = 0.0;
        for (a, bq) in back.components().iter().zip(u.components()) {
            for (x, y) in a.iter().zip(bq) {
                worst = worst.max((x - y).norm());
            }
        }
        c.at_most(
            "transform_oracle_max_coeff",
            worst / u.max_abs_coeff(),
            1e-12,
        );
    }
    Ok(())
}

fn suite_fluxes(lp: &LpPartition, seed: u64, c: &mut Collector) -> Result<()> {
    let mut rng = rng_from_seed(seed);
    let (mut r212, mut r512, mut comp) = (0.0f64, 0.0f64, 0.0f64);
    let mut split_ok = true;
    let samples = if lp.grid().n() >= 32 { 4 } else { 10 };
    for i in 0..samples {
        let u = random_full(lp.grid(), &mut rng);
        let b = random_full(lp.grid(), &mut rng);
        let s = if i % 2 == 0 { 3.0 } else { 2.0 };
        let f = flux_terms(lp, &u, &b, s, (i % (lp.q_max() + 1)).max(0))?;
        r212 = r212.max(f.residual_212_412());
        r512 = r512.max(f.residual_512());
        comp = f.completeness().iter().fold(comp, |m, v| m.max(*v));
        split_ok &= f.split_bounds_hold();
    }
    c.at_most("residual_212_412", r212, RESIDUAL_TOL);
    c.at_most("residual_512", r512, RESIDUAL_TOL);
    c.at_most("completeness", comp, COMPLETENESS_TOL);
    c.at_most(
        "commutator_split_bounds",
        if split_ok { 0.0 } else { 1.0 },
        0.0,
    );
    let z = SpectralField::zero_vector(lp.grid());
    let b = random_full(lp.grid(), &mut rng);
    let f = flux_terms(lp, &z, &b, 3.0, 0)?;
    c.at_most("structural_zero_i1_i3", f.i1.abs() + f.i3.abs(), 0.0);
    Ok(())
}

pub fn run_suite(suite: Suite, n: usize, seed: u64) -> Result<VerifyReport> {
    if !SUITE_GRIDS.contains(&n) {
        return Err(Error::param(format!(
            "verify runs on n in {SUITE_GRIDS:?}, got {n}"
        )));
    }
    let grid = Grid::new(n)?;
    let lp = LpPartition::build(&grid, ChiProfile::Bridge)?;
    let wants = |s: Suite| suite == s || suite == Suite::All;
    let mut checks = Vec::new();
    let mut lemma_stats = Vec::new();
    if wants(Suite::Lp) {
        let mut c = Collector {
            suite: "lp",
            checks: vec![],
        };
        suite_lp(&lp, seed, &mut c)?;
        checks.extend(c.checks);
    }
    if wants(Suite::Lemmas) {
        let mut c = Collector {
            suite: "lemmas",
            checks: vec![],
        };
        lemma_stats = suite_lemmas(&lp, seed, &mut c)?;
        checks.extend(c.checks);
    }
    if wants(Suite::Solver) {
        let mut c = Collector {
            suite: "solver",
            checks: vec![],
        };
        suite_solver(&grid, seed, &mut c)?;
        checks.extend(c.checks);
    }
    if wants(Suite::Fluxes) {
        let mut c = Collector {
            suite: "fluxes",
            checks: vec![],
        };
        suite_fluxes(&lp, seed, &mut c)?;
        checks.extend(c.checks);
    }
    Ok(VerifyReport {
        suite,
        n,
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
        lemma_stats,
    })
}
