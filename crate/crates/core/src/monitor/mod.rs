//! Regularity diagnostics: dissipation wavenumbers, the criterion integrand
//! `f(t)`, frequency-localized production terms, the wavenumber bound,
//! Prodi-Serrin comparison norms and a Gronwall growth surrogate.
//!
//! All `H^s` norms here are the dyadic form
//! `(sum_q lambda_q^{2s} ||Delta_q f||_2^2)^{1/2}`, so that the production
//! terms are exactly the nonlinear part of its time derivative.

mod flux;

pub use flux::{flux_terms, FluxBreakdown, ROUNDOFF_FLOOR};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::{lambda, LpPartition};
use crate::solver::energy;
use crate::spectral::SpectralField;

pub const RESIDUAL_TOL: f64 = 1e-10;
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// relative slack allowed on inequalities that hold exactly in exact arithmetic
const ROUND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wavenumbers {
    pub lambda1: f64,
    pub lambda2: f64,
    pub q1: i32,
    pub q2: i32,
    /// top resolved shell still above threshold: the true wavenumber lies
    /// beyond the grid
    pub under_resolved_u: bool,
    pub under_resolved_b: bool,
    /// `||u_{Q1}||_inf`
    pub sup_u_q1: f64,
    /// `||b_{Q2}||_inf`
    pub sup_b_q2: f64,
    /// `||grad b_{Q2}||_inf`, recorded for the gradient reading of the
    /// lower bound on `Lambda_2`
    pub sup_grad_b_q2: f64,
    pub threshold: f64,
}

impl Wavenumbers {
    /// `||u_{Q1}||_inf >= c0 m Lambda_1` whenever `Lambda_1 > 1`.
    pub fn lower_bound_u(&self) -> bool {
        self.lambda1 <= 1.0 || self.sup_u_q1 >= self.threshold * self.lambda1 * (1.0 - ROUND)
    }

    /// `||b_{Q2}||_inf >= c0 m` whenever `Lambda_2 > 1`.
    pub fn lower_bound_b(&self) -> bool {
        self.lambda2 <= 1.0 || self.sup_b_q2 >= self.threshold * (1.0 - ROUND)
    }

    /// `||grad b_{Q2}||_inf >= c0 m Lambda_2`; reported, never asserted.
    pub fn lower_bound_grad_b(&self) -> bool {
        self.lambda2 <= 1.0 || self.sup_grad_b_q2 >= self.threshold * self.lambda2
    }
}

/// Smallest `q in [0, q_max]` with `metric[p] < threshold` for all
/// `q < p <= q_max`; `metric` is indexed by `p = 0..=q_max`.
fn dissipation_index(metric: &[f64], threshold: f64) -> (i32, bool) {
    let mut q = 0;
    for (p, &v) in metric.iter().enumerate().rev() {
        if v >= threshold {
            q = p as i32;
            break;
        }
    }
    let under = metric.last().is_some_and(|&v| v >= threshold);
    (q, under)
}

pub fn dissipation_wavenumbers(
    lp: &LpPartition,
    u: &SpectralField,
    b: &SpectralField,
    c0: f64,
    m: f64,
) -> Result<Wavenumbers> {
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(Error::param(format!("c0 must be positive, got {c0}")));
    }
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::param(format!("m must be positive, got {m}")));
    }
    lp.grid().ensure_same(u.grid())?;
    lp.grid().ensure_same(b.grid())?;
    let threshold = c0 * m;
    let sup_u: Vec<f64> = (0..=lp.q_max())
        .map(|p| lp.shell_or_zero(u, p).sup_norm())
        .collect();
    let sup_b: Vec<f64> = (0..=lp.q_max())
        .map(|p| lp.shell_or_zero(b, p).sup_norm())
        .collect();
    let metric_u: Vec<f64> = sup_u
        .iter()
        .enumerate()
        .map(|(p, v)| v / lambda(p as i32))
        .collect();
    let (q1, under_resolved_u) = dissipation_index(&metric_u, threshold);
    let (q2, under_resolved_b) = dissipation_index(&sup_b, threshold);
    Ok(Wavenumbers {
        lambda1: lambda(q1),
        lambda2: lambda(q2),
        q1,
        q2,
        under_resolved_u,
        under_resolved_b,
        sup_u_q1: sup_u[q1 as usize],
        sup_b_q2: sup_b[q2 as usize],
        sup_grad_b_q2: lp.shell_or_zero(b, q2).gradient_tensor()?.sup_norm(),
        threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionValue {
    pub f: f64,
    pub besov_u: f64,
    pub besov_nabla_b: f64,
}

/// `f = ||u_{<=Q1}||_{B^1_inf,inf} + ||grad b_{<=Q2}||_{B^1_inf,inf}`.
pub fn criterion_f(
    lp: &LpPartition,
    u: &SpectralField,
    b: &SpectralField,
    q1: i32,
    q2: i32,
) -> Result<CriterionValue> {
    let besov_u = lp.besov_norm(&lp.lowpass(u, q1), 1.0, f64::INFINITY)?;
    let grad_b = lp.lowpass(b, q2).gradient_tensor()?;
    let besov_nabla_b = lp.besov_norm(&grad_b, 1.0, f64::INFINITY)?;
    Ok(CriterionValue {
        f: besov_u + besov_nabla_b,
        besov_u,
        besov_nabla_b,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSide {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`
    pub slack: f64,
    pub holds: bool,
}

impl BoundSide {
    fn new(wavenumber: f64, exponent: f64, rhs: f64) -> Self {
        let lhs = wavenumber.powf(exponent);
        BoundSide {
            lhs,
            rhs,
            slack: rhs - lhs,
            // at Lambda = 1 the bound carries no information
            holds: wavenumber <= 1.0 || lhs <= rhs * (1.0 + ROUND),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub c_b: f64,
    pub u: BoundSide,
    /// only defined for `s > 3/2`
    pub b: Option<BoundSide>,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.u.holds && self.b.is_none_or(|b| b.holds)
    }
}

/// `Lambda_1^{s-1/2} <= C_B (c0 m)^{-1} ||u||_{H^s}` and
/// `Lambda_2^{s-3/2} <= C_B (c0 m)^{-1} ||b||_{H^s}`.
pub fn wavenumber_bound_check(
    lp: &LpPartition,
    u: &SpectralField,
    b: &SpectralField,
    w: &Wavenumbers,
    s: f64,
    c_b: f64,
) -> Result<BoundReport> {
    if s.is_nan() || s <= 0.5 {
        return Err(Error::param(format!(
            "wavenumber bound needs s > 1/2, got {s}"
        )));
    }
    if !(c_b > 0.0 && c_b.is_finite()) {
        return Err(Error::param(format!(
            "Bernstein constant must be positive, got {c_b}"
        )));
    }
    let scale = c_b / w.threshold;
    let hs_u = lp.sobolev_norms(u, s).dyadic;
    let side_b = (s > 1.5)
        .then(|| BoundSide::new(w.lambda2, s - 1.5, scale * lp.sobolev_norms(b, s).dyadic));
    Ok(BoundReport {
        c_b,
        u: BoundSide::new(w.lambda1, s - 0.5, scale * hs_u),
        b: side_b,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConstants {
    pub beta: f64,
    /// `||Delta_q f||_beta <= c_e1 ||f||_beta`
    pub c_e1: f64,
    /// `lambda_q^{-3/beta} ||Delta_q f||_inf <= c_e2 ||Delta_q f||_beta`
    pub c_e2: f64,
}

/// Rigorous constants of the embedding chain on this grid, from the discrete
/// Young and Holder inequalities applied to the shell kernels.
pub fn embedding_constants(lp: &LpPartition, beta: f64) -> Result<EmbeddingConstants> {
    check_beta(beta)?;
    let grid = lp.grid();
    let n3 = grid.len() as f64;
    let beta_conj = beta / (beta - 1.0);
    let kernel = |m: &[f64]| -> Result<Vec<f64>> {
        let mut f = SpectralField::zeros(grid, 1);
        for (z, w) in f.comp_mut(0).iter_mut().zip(m) {
            z.re = *w;
        }
        Ok(f.to_physical().into_comps().remove(0))
    };
    let mut c_e1: f64 = 0.0;
    let mut c_e2: f64 = 0.0;
    for q in lp.shells() {
        let h = kernel(lp.multiplier(q)?)?;
        c_e1 = c_e1.max(h.iter().map(|v| v.abs()).sum::<f64>() / n3);
        let g = kernel(&lp.range_multiplier(q - 1, q + 1))?;
        let g_norm =
            (g.iter().map(|v| v.abs().powf(beta_conj)).sum::<f64>() / n3).powf(1.0 / beta_conj);
        let scale = (lambda(q) * grid.domain()).powf(-3.0 / beta);
        c_e2 = c_e2.max(scale * g_norm);
    }
    Ok(EmbeddingConstants { beta, c_e1, c_e2 })
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 3.0) {
        return Err(Error::param(format!(
            "Prodi-Serrin exponent must exceed 3, got {beta}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProdiSerrin {
    /// `||f||_beta`
    pub lebesgue: f64,
    /// `||f||_{B^0_{beta,inf}}`
    pub besov_zero: f64,
    /// `||f||_{B^{-3/beta}_{inf,inf}}`
    pub besov_negative: f64,
    pub chain_holds: bool,
}

pub fn prodi_serrin_norms(
    lp: &LpPartition,
    f: &SpectralField,
    c: &EmbeddingConstants,
) -> Result<ProdiSerrin> {
    let beta = c.beta;
    check_beta(beta)?;
    let lebesgue = f.lp_norm(beta)?;
    let besov_zero = lp.besov_norm(f, 0.0, beta)?;
    let besov_negative = lp.besov_norm(f, -3.0 / beta, f64::INFINITY)?;
    let chain_holds = besov_zero <= c.c_e1 * lebesgue * (1.0 + ROUND) + f64::MIN_POSITIVE
        && besov_negative <= c.c_e2 * besov_zero * (1.0 + ROUND) + f64::MIN_POSITIVE;
    Ok(ProdiSerrin {
        lebesgue,
        besov_zero,
        besov_negative,
        chain_holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub step: u64,
    pub t: f64,
    pub energy_u: f64,
    pub energy_b: f64,
    pub hs_u: f64,
    pub hs_b: f64,
    pub s: f64,
    pub wavenumbers: Wavenumbers,
    pub f: f64,
    pub besov_u: f64,
    pub besov_nabla_b: f64,
    pub int_f: f64,
    pub flux: Option<FluxBreakdown>,
    pub bound: BoundReport,
    pub ps_u: ProdiSerrin,
    pub ps_grad_b: ProdiSerrin,
    /// names of the checks that failed on this snapshot
    pub violations: Vec<String>,
}

impl DiagnosticsRecord {
    pub const CSV_HEADER: [&'static str; 18] = [
        "t",
        "energy_u",
        "energy_b",
        "hs_u",
        "hs_b",
        "lambda1",
        "lambda2",
        "q1",
        "q2",
        "f",
        "int_f",
        "i1",
        "i2",
        "i3",
        "i4",
        "i5",
        "residual_212_412",
        "residual_512",
    ];

    /// Values in `CSV_HEADER` order; flux columns are NaN when fluxes are off.
    pub fn csv_row(&self) -> [f64; 18] {
        let w = &self.wavenumbers;
        let fl = self.flux;
        let g = |sel: fn(&FluxBreakdown) -> f64| fl.as_ref().map_or(f64::NAN, sel);
        [
            self.t,
            self.energy_u,
            self.energy_b,
            self.hs_u,
            self.hs_b,
            w.lambda1,
            w.lambda2,
            w.q1 as f64,
            w.q2 as f64,
            self.f,
            self.int_f,
            g(|x| x.i1),
            g(|x| x.i2),
            g(|x| x.i3),
            g(|x| x.i4),
            g(|x| x.i5),
            g(|x| x.residual_212_412()),
            g(|x| x.residual_512()),
        ]
    }

    pub fn residual_212_412(&self) -> Option<f64> {
        self.flux.map(|x| x.residual_212_412())
    }

    pub fn residual_512(&self) -> Option<f64> {
        self.flux.map(|x| x.residual_512())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorSettings {
    pub c0: f64,
    pub m: f64,
    pub s: f64,
    pub beta: f64,
    pub c_b: f64,
    pub fluxes: bool,
}

/// Stateful recorder accumulating `int f dt` over successive snapshots.
pub struct Monitor {
    lp: LpPartition,
    settings: MonitorSettings,
    embedding: EmbeddingConstants,
    int_f: f64,
    last: Option<(f64, f64)>,
}

impl Monitor {
    pub fn new(lp: LpPartition, settings: MonitorSettings) -> Result<Self> {
        let embedding = embedding_constants(&lp, settings.beta)?;
        Ok(Monitor {
            lp,
            settings,
            embedding,
            int_f: 0.0,
            last: None,
        })
    }

    /// Continue the trapezoid sum from a previous record.
    pub fn resume_from(&mut self, t: f64, f: f64, int_f: f64) {
        self.last = Some((t, f));
        self.int_f = int_f;
    }

    pub fn partition(&self) -> &LpPartition {
        &self.lp
    }

    pub fn settings(&self) -> &MonitorSettings {
        &self.settings
    }

    pub fn embedding(&self) -> &EmbeddingConstants {
        &self.embedding
    }

    pub fn int_f(&self) -> f64 {
        self.int_f
    }

    pub fn record(
        &mut self,
        step: u64,
        t: f64,
        u: &SpectralField,
        b: &SpectralField,
    ) -> Result<DiagnosticsRecord> {
        let lp = &self.lp;
        let st = self.settings;
        let w = dissipation_wavenumbers(lp, u, b, st.c0, st.m)?;
        let crit = criterion_f(lp, u, b, w.q1, w.q2)?;
        let flux = if st.fluxes {
            Some(flux_terms(lp, u, b, st.s, w.q2)?)
        } else {
            None
        };
        let bound = wavenumber_bound_check(lp, u, b, &w, st.s, st.c_b)?;
        let ps_u = prodi_serrin_norms(lp, u, &self.embedding)?;
        let ps_grad_b = prodi_serrin_norms(lp, &b.gradient_tensor()?, &self.embedding)?;

        if let Some((t0, f0)) = self.last {
            self.int_f += 0.5 * (t - t0) * (f0 + crit.f);
        }
        self.last = Some((t, crit.f));

        let mut violations = Vec::new();
        let mut flag = |ok: bool, name: &str| {
            if !ok {
                violations.push(name.to_string());
            }
        };
        flag(w.lower_bound_u(), "lower_bound_u");
        flag(w.lower_bound_b(), "lower_bound_b");
        flag(bound.u.holds, "wavenumber_bound_u");
        flag(bound.b.is_none_or(|x| x.holds), "wavenumber_bound_b");
        flag(ps_u.chain_holds, "embedding_chain_u");
        flag(ps_grad_b.chain_holds, "embedding_chain_grad_b");
        if let Some(fl) = &flux {
            flag(fl.residual_212_412() <= RESIDUAL_TOL, "residual_212_412");
            flag(fl.residual_512() <= RESIDUAL_TOL, "residual_512");
            flag(
                fl.completeness().iter().all(|&d| d <= COMPLETENESS_TOL),
                "completeness",
            );
            flag(fl.split_bounds_hold(), "commutator_split");
        }

        Ok(DiagnosticsRecord {
            step,
            t,
            energy_u: energy(u),
            energy_b: energy(b),
            hs_u: lp.sobolev_norms(u, st.s).dyadic,
            hs_b: lp.sobolev_norms(b, st.s).dyadic,
            s: st.s,
            wavenumbers: w,
            f: crit.f,
            besov_u: crit.besov_u,
            besov_nabla_b: crit.besov_nabla_b,
            int_f: self.int_f,
            flux,
            bound,
            ps_u,
            ps_grad_b,
            violations,
        })
    }
}

/// Smallest `C >= 0` with
/// `dY/dt <= C f (1 + log+ X) Y`, `Y = hs_u^2 + hs_b^2`, `X = hs_u + hs_b`,
/// at every interior record, `dY/dt` by centered differences.
///
/// Infinite when `Y` grows at a record where `f` vanishes.
pub fn gronwall_check(records: &[DiagnosticsRecord]) -> Result<f64> {
    if records.len() < 3 {
        return Err(Error::param(format!(
            "Gronwall check needs at least 3 records, got {}",
            records.len()
        )));
    }
    let y = |r: &DiagnosticsRecord| r.hs_u * r.hs_u + r.hs_b * r.hs_b;
    let mut c: f64 = 0.0;
    for win in records.windows(3) {
        let (a, mid, z) = (&win[0], &win[1], &win[2]);
        let dt = z.t - a.t;
        if !(dt > 0.0) {
            return Err(Error::param("records must be strictly increasing in t"));
        }
        let dy = (y(z) - y(a)) / dt;
        if dy <= 0.0 {
            continue;
        }
        let x = mid.hs_u + mid.hs_b;
        let rhs = mid.f * (1.0 + x.max(1.0).ln()) * y(mid);
        if rhs == 0.0 {
            return Ok(f64::INFINITY);
        }
        c = c.max(dy / rhs);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::littlewood_paley::ChiProfile;
    use crate::paraproduct::random_full;
    use crate::spectral::random::rng_from_seed;
    use crate::spectral::Grid;
    use num_complex::Complex64;

    fn lp(n: usize) -> LpPartition {
        LpPartition::build(&Grid::new(n).unwrap(), ChiProfile::Bridge).unwrap()
    }

    /// Solenoidal mode along x at `k = (0, 0, kz)` with unit sup norm.
    fn mode_field(grid: &Grid, kz: i64, amp: f64) -> SpectralField {
        let mut u = SpectralField::zero_vector(grid);
        u.set_mode(0, [0, 0, kz], Complex64::new(0.5 * amp, 0.0))
            .unwrap();
        u.set_mode(0, [0, 0, -kz], Complex64::new(0.5 * amp, 0.0))
            .unwrap();
        u.refresh_solenoidal();
        u
    }

    /// Pure block: a field whose only mode sits where `phi_q == 1`.
    fn pure_shell(lp: &LpPartition, q: i32, amp: f64) -> SpectralField {
        let phi = lp.multiplier(q).unwrap();
        let kz = (1..lp.grid().n() as i64 / 2)
            .find(|&k| phi[lp.grid().index_of([0, 0, k]).unwrap()] == 1.0)
            .expect("plateau mode");
        mode_field(lp.grid(), kz, amp)
    }

    #[test]
    fn zero_fields() {
        let lp = lp(16);
        let z = SpectralField::zero_vector(lp.grid());
        let w = dissipation_wavenumbers(&lp, &z, &z, 1.0, 0.01).unwrap();
        assert_eq!((w.lambda1, w.q1, w.lambda2, w.q2), (1.0, 0, 1.0, 0));
        assert_eq!(criterion_f(&lp, &z, &z, 0, 0).unwrap().f, 0.0);
        let rep = wavenumber_bound_check(&lp, &z, &z, &w, 3.0, 0.1).unwrap();
        assert!(rep.holds());
        assert!(dissipation_wavenumbers(&lp, &z, &z, 0.0, 0.01).is_err());
        assert!(dissipation_wavenumbers(&lp, &z, &z, 1.0, 0.0).is_err());
    }

    #[test]
    fn shell_pure_velocity() {
        let lp = lp(32);
        let z = SpectralField::zero_vector(lp.grid());
        let u = pure_shell(&lp, 3, 1.0);
        assert!((u.sup_norm() - 1.0).abs() < 1e-12);
        let w = dissipation_wavenumbers(&lp, &u, &z, 1.0, 0.01).unwrap();
        assert_eq!((w.lambda1, w.q1), (8.0, 3));
        assert!(w.lower_bound_u());
        assert!((w.sup_u_q1 - 1.0).abs() < 1e-12);
        let f = criterion_f(&lp, &u, &z, w.q1, w.q2).unwrap();
        assert!((f.f - 8.0).abs() < 1e-12, "{f:?}");
        assert_eq!(f.f, f.besov_u + f.besov_nabla_b);

        let small = pure_shell(&lp, 3, 0.05);
        let w = dissipation_wavenumbers(&lp, &small, &z, 1.0, 0.01).unwrap();
        assert_eq!(w.lambda1, 1.0);

        // 8^{3/2} against C_B * 100 * ||u||_{H^2}
        let w = dissipation_wavenumbers(&lp, &u, &z, 1.0, 0.01).unwrap();
        let rep = wavenumber_bound_check(&lp, &u, &z, &w, 2.0, 0.05).unwrap();
        let expected = 0.05 * 100.0 * lp.sobolev_norms(&u, 2.0).dyadic;
        assert!((rep.u.rhs - expected).abs() < 1e-9 * expected);
        assert!((rep.u.lhs - 8f64.powf(1.5)).abs() < 1e-12);
        assert!(rep.u.holds);
    }

    #[test]
    fn doubling_c0_never_raises_wavenumbers() {
        let lp = lp(16);
        let mut rng = rng_from_seed(4);
        for _ in 0..5 {
            let u = random_full(lp.grid(), &mut rng);
            let b = random_full(lp.grid(), &mut rng);
            for c0 in [0.01, 0.1, 1.0] {
                let w1 = dissipation_wavenumbers(&lp, &u, &b, c0, 0.5).unwrap();
                let w2 = dissipation_wavenumbers(&lp, &u, &b, 2.0 * c0, 0.5).unwrap();
                assert!(w2.lambda1 <= w1.lambda1 && w2.lambda2 <= w1.lambda2);
                assert!(w1.lower_bound_u() && w1.lower_bound_b());
            }
        }
    }

    #[test]
    fn under_resolved_flag() {
        let lp = lp(16);
        let z = SpectralField::zero_vector(lp.grid());
        let b = pure_shell(&lp, lp.q_max(), 1.0);
        let w = dissipation_wavenumbers(&lp, &z, &b, 1.0, 0.01).unwrap();
        assert!(w.under_resolved_b && !w.under_resolved_u);
        assert_eq!(w.q2, lp.q_max());
    }

    #[test]
    fn single_mode_prodi_serrin_closed_form() {
        // u = cos(4z) e_x, |k| = 4 sits on the plateau of phi_2 at n = 32
        let lp = lp(32);
        let u = mode_field(lp.grid(), 4, 1.0);
        let beta = 6.0;
        let c = embedding_constants(&lp, beta).unwrap();
        let ps = prodi_serrin_norms(&lp, &u, &c).unwrap();
        // ||cos||_6 over (2 pi)^3: (mean cos^6 = 5/16)^{1/6} (2 pi)^{1/2}
        let l6 = (5.0f64 / 16.0).powf(1.0 / 6.0) * (2.0 * std::f64::consts::PI).powf(0.5);
        assert!((ps.lebesgue - l6).abs() < 1e-12 * l6);
        assert!((ps.besov_zero - l6).abs() < 1e-12 * l6);
        assert!((ps.besov_negative - 4f64.powf(-0.5)).abs() < 1e-12);
        assert!(ps.chain_holds);
        assert!(c.c_e1 >= 1.0 && c.c_e1.is_finite());
        let z = SpectralField::zero_vector(lp.grid());
        let ps = prodi_serrin_norms(&lp, &z, &c).unwrap();
        assert_eq!(
            (ps.lebesgue, ps.besov_zero, ps.besov_negative),
            (0.0, 0.0, 0.0)
        );
        assert!(embedding_constants(&lp, 3.0).is_err());
    }

    #[test]
    fn embedding_chain_on_random_fields() {
        let lp = lp(16);
        let c = embedding_constants(&lp, 4.0).unwrap();
        let mut rng = rng_from_seed(9);
        for _ in 0..10 {
            let u = random_full(lp.grid(), &mut rng);
            assert!(prodi_serrin_norms(&lp, &u, &c).unwrap().chain_holds);
        }
    }

    fn rec(t: f64, hs: f64, f: f64) -> DiagnosticsRecord {
        let lp = lp(8);
        let z = SpectralField::zero_vector(lp.grid());
        let mut m = Monitor::new(
            lp,
            MonitorSettings {
                c0: 1.0,
                m: 0.1,
                s: 3.0,
                beta: 4.0,
                c_b: 0.1,
                fluxes: false,
            },
        )
        .unwrap();
        let mut r = m.record(0, t, &z, &z).unwrap();
        r.hs_u = hs;
        r.f = f;
        r
    }

    #[test]
    fn gronwall_surrogate() {
        let decay: Vec<_> = (0..5)
            .map(|i| rec(i as f64, (-(i as f64)).exp(), 0.1))
            .collect();
        assert_eq!(gronwall_check(&decay).unwrap(), 0.0);
        let zero: Vec<_> = (0..4).map(|i| rec(i as f64, 0.0, 0.0)).collect();
        assert_eq!(gronwall_check(&zero).unwrap(), 0.0);
        assert!(gronwall_check(&zero[..2]).is_err());
        // Y = e^{2(t-5)}, X < 1, f = 1: C = (e^2 - e^-2) / 2
        let grow: Vec<_> = (0..3)
            .map(|i| rec(i as f64, (i as f64 - 5.0).exp(), 1.0))
            .collect();
        let c = gronwall_check(&grow).unwrap();
        assert!((c - 2f64.sinh()).abs() < 1e-12, "{c}");
    }

    #[test]
    fn int_f_is_trapezoid() {
        let lp = lp(16);
        let u = pure_shell(&lp, 2, 1.0);
        let z = SpectralField::zero_vector(lp.grid());
        let mut m = Monitor::new(
            lp,
            MonitorSettings {
                c0: 1.0,
                m: 0.01,
                s: 3.0,
                beta: 4.0,
                c_b: 0.1,
                fluxes: true,
            },
        )
        .unwrap();
        let r0 = m.record(0, 0.0, &u, &z).unwrap();
        let r1 = m.record(1, 0.5, &u, &z).unwrap();
        assert_eq!(r0.int_f, 0.0);
        assert!((r1.int_f - 0.5 * r0.f).abs() < 1e-12);
        assert!(r1.violations.is_empty(), "{:?}", r1.violations);
        assert_eq!(DiagnosticsRecord::CSV_HEADER.len(), r1.csv_row().len());
    }
}
