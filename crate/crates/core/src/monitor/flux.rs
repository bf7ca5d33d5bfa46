//! Frequency-localized `H^s` production terms and their paraproduct
//! sub-terms.
//!
//! With `<X>_q = lambda_q^{2s} int Delta_q X . Y_q`:
//!
//! ```text
//! I1 =  sum_q <u.grad u, u>_q      I2 = -sum_q <b.grad b, u>_q
//! I3 =  sum_q <u.grad b, b>_q      I4 = -sum_q <b.grad u, b>_q
//! I5 =  sum_q <b x curl b, curl b>_q
//! ```
//!
//! so that `I1 + ... + I5` is the weighted production of
//! `N_u = u.grad u - b.grad b` against u and
//! `N_b = u.grad b - b.grad u - curl(curl b x b)` against b.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::littlewood_paley::{lambda, LpPartition};
use crate::paraproduct::{advective_commutator, hall_commutator};
use crate::solver::rhs;
use crate::spectral::products::{cross, dot_grad};
use crate::spectral::SpectralField;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FluxBreakdown {
    pub s: f64,
    /// shell splitting the commutator sums into A1..A6
    pub split: i32,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    pub i5: f64,
    pub i211: f64,
    pub i212: f64,
    pub i213: f64,
    pub i22: f64,
    pub i23: f64,
    pub i411: f64,
    pub i412: f64,
    pub i413: f64,
    pub i42: f64,
    pub i43: f64,
    pub i511: f64,
    pub i512: f64,
    pub i513: f64,
    pub i52: f64,
    pub i53: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    pub a6: f64,
    /// weighted production of the full nonlinearities, evaluated from the
    /// solver's right-hand side
    pub direct: f64,
    /// `sum_q lambda_q^{2s} ||Delta_q X||_2 ||Delta_q Y||_2` over the five
    /// pairings: the Cauchy-Schwarz size of the production
    pub magnitude: f64,
}

/// Below this fraction of `magnitude` every sub-term is round-off.
pub const ROUNDOFF_FLOOR: f64 = 1e-6;

fn rel(defect: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        defect.abs()
    } else {
        defect.abs() / scale
    }
}

impl FluxBreakdown {
    pub fn sub_terms(&self) -> [f64; 15] {
        [
            self.i211, self.i212, self.i213, self.i22, self.i23, self.i411, self.i412, self.i413,
            self.i42, self.i43, self.i511, self.i512, self.i513, self.i52, self.i53,
        ]
    }

    pub fn max_sub_term(&self) -> f64 {
        self.sub_terms().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn total(&self) -> f64 {
        self.i1 + self.i2 + self.i3 + self.i4 + self.i5
    }

    /// Reference size for relative defects: the largest sub-term, floored
    /// at a round-off fraction of the production's magnitude.
    pub fn scale(&self) -> f64 {
        self.max_sub_term().max(ROUNDOFF_FLOOR * self.magnitude)
    }

    /// `|I212 + I412|` relative to the largest sub-term.
    pub fn residual_212_412(&self) -> f64 {
        rel(self.i212 + self.i412, self.scale())
    }

    /// `|I512|` relative to the largest sub-term.
    pub fn residual_512(&self) -> f64 {
        rel(self.i512, self.scale())
    }

    /// Relative defects of `I2`, `I4`, `I5` against their sub-term sums and
    /// of `I1 + ... + I5` against the direct production.
    pub fn completeness(&self) -> [f64; 4] {
        let d2 = self.i2 - (self.i211 + self.i212 + self.i213 + self.i22 + self.i23);
        let d4 = self.i4 - (self.i411 + self.i412 + self.i413 + self.i42 + self.i43);
        let d5 = self.i5 - (self.i511 + self.i512 + self.i513 + self.i52 + self.i53);
        let scale = |x: f64| x.abs().max(self.scale());
        let big = [self.i1, self.i2, self.i3, self.i4, self.i5, self.direct]
            .iter()
            .fold(ROUNDOFF_FLOOR * self.magnitude, |m, v| m.max(v.abs()));
        [
            rel(d2, scale(self.i2)),
            rel(d4, scale(self.i4)),
            rel(d5, scale(self.i5)),
            rel(self.total() - self.direct, big),
        ]
    }

    /// `|I211| <= A1 + A2 + A3` and `|I511| <= A4 + A5 + A6` (up to round-off).
    pub fn split_bounds_hold(&self) -> bool {
        let tol = 1e-12
            * self
                .scale()
                .max(self.a1 + self.a2 + self.a3 + self.a4 + self.a5 + self.a6);
        self.i211.abs() <= self.a1 + self.a2 + self.a3 + tol
            && self.i511.abs() <= self.a4 + self.a5 + self.a6 + tol
    }
}

struct Ctx<'a> {
    lp: &'a LpPartition,
    s: f64,
}

impl Ctx<'_> {
    fn weight(&self, q: i32) -> f64 {
        lambda(q).powf(2.0 * self.s)
    }

    /// `lambda_q^{2s} int Delta_q x . y_q`.
    fn pair(&self, q: i32, x: &SpectralField, y: &SpectralField) -> f64 {
        if x.is_zero() || y.is_zero() {
            return 0.0;
        }
        let phi = self.lp.multiplier(q).expect("shell in range");
        let sq: Vec<f64> = phi.iter().map(|p| p * p).collect();
        self.weight(q) * x.inner_weighted(&sq, y)
    }

    /// `lambda_q^{2s} ||Delta_q x||_2 ||Delta_q y||_2`.
    fn pair_size(&self, q: i32, x: &SpectralField, y: &SpectralField) -> f64 {
        if x.is_zero() || y.is_zero() {
            return 0.0;
        }
        let phi = self.lp.multiplier(q).expect("shell in range");
        let sq: Vec<f64> = phi.iter().map(|p| p * p).collect();
        let norm = |f: &SpectralField| f.inner_weighted(&sq, f).max(0.0).sqrt();
        self.weight(q) * norm(x) * norm(y)
    }

    fn near(&self, q: i32) -> impl Iterator<Item = i32> {
        (q - 2).max(-1)..=(q + 2).min(self.lp.q_max())
    }
}

/// `int |x . y| dx` by collocation.
fn abs_pairing(x: &SpectralField, y: &SpectralField) -> f64 {
    if x.is_zero() || y.is_zero() {
        return 0.0;
    }
    let (xp, yp) = (x.to_physical(), y.to_physical());
    let mut sum = 0.0;
    for i in 0..xp.len() {
        let mut d = 0.0;
        for c in 0..xp.ncomp() {
            d += xp.comp(c)[i] * yp.comp(c)[i];
        }
        sum += d.abs();
    }
    sum * x.grid().cell_volume()
}

fn adv(a: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    if a.is_zero() || g.is_zero() {
        return Ok(SpectralField::zero_vector(a.grid()));
    }
    dot_grad(a, g)
}

fn hall(a: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    if a.is_zero() || g.is_zero() {
        return Ok(SpectralField::zero_vector(a.grid()));
    }
    cross(a, &g.curl()?)
}

/// Full breakdown at Sobolev weight `s`; `split` is the shell `Q2` used to
/// separate the commutator sums into A1..A6.
pub fn flux_terms(
    lp: &LpPartition,
    u: &SpectralField,
    b: &SpectralField,
    s: f64,
    split: i32,
) -> Result<FluxBreakdown> {
    lp.grid().ensure_same(u.grid())?;
    lp.grid().ensure_same(b.grid())?;
    u.require_solenoidal("u")?;
    b.require_solenoidal("b")?;
    let ctx = Ctx { lp, s };
    let shells: Vec<i32> = lp.shells().collect();
    let sh = |f: &SpectralField, p: i32| lp.shell_or_zero(f, p);
    let low = |f: &SpectralField, p: i32| lp.lowpass(f, p);
    let curl_b = b.curl()?;
    let mut out = FluxBreakdown {
        s,
        split,
        ..Default::default()
    };

    // whole terms
    let uu = adv(u, u)?;
    let bb = adv(b, b)?;
    let ub = adv(u, b)?;
    let bu = adv(b, u)?;
    let hb = hall(b, b)?;
    for &q in &shells {
        out.i1 += ctx.pair(q, &uu, u);
        out.i2 -= ctx.pair(q, &bb, u);
        out.i3 += ctx.pair(q, &ub, b);
        out.i4 -= ctx.pair(q, &bu, b);
        out.i5 += ctx.pair(q, &hb, &curl_b);
        out.magnitude += ctx.pair_size(q, &uu, u)
            + ctx.pair_size(q, &bb, u)
            + ctx.pair_size(q, &ub, b)
            + ctx.pair_size(q, &bu, b)
            + ctx.pair_size(q, &hb, &curl_b);
    }

    // direct production from the solver tendencies
    let (du, db_hall) = rhs(u, b, true)?;
    let (_, db_plain) = rhs(u, b, false)?;
    let n_u = du.scaled(-1.0);
    let n_b = &db_hall - &db_plain.scaled(2.0);
    for &q in &shells {
        out.direct += ctx.pair(q, &n_u, u) + ctx.pair(q, &n_b, b);
    }

    // per-p paraproduct pieces
    for &p in &shells {
        let (u_p, b_p) = (sh(u, p), sh(b, p));
        let (u_lo, b_lo) = (low(u, p - 2), low(b, p - 2));
        let b_t = lp.tilde(b, p);
        let x22 = adv(&b_p, &b_lo)?;
        let x23 = adv(&b_p, &b_t)?;
        let x42 = adv(&b_p, &u_lo)?;
        let x43 = adv(&b_t, &u_p)?;
        let x52 = hall(&b_p, &b_lo)?;
        let x53 = hall(&b_p, &b_t)?;
        for q in ctx.near(p) {
            out.i22 -= ctx.pair(q, &x22, u);
            out.i42 -= ctx.pair(q, &x42, b);
            out.i52 += ctx.pair(q, &x52, &curl_b);
        }
        for q in -1..=(p + 2).min(lp.q_max()) {
            out.i23 -= ctx.pair(q, &x23, u);
            out.i43 -= ctx.pair(q, &x43, b);
            out.i53 += ctx.pair(q, &x53, &curl_b);
        }
    }

    // commutator splits, per (q, p)
    let b_split = low(b, split);
    for &q in &shells {
        let w = ctx.weight(q);
        let (u_q, b_q) = (sh(u, q), sh(b, q));
        let curl_bq = b_q.curl()?;
        let b_lo_q = low(b, q - 2);
        let near_sum = |f: &SpectralField| -> SpectralField {
            let m: Vec<f64> = {
                let phi_q = lp.multiplier(q).expect("shell in range");
                let around = lp.range_multiplier(q - 2, q + 2);
                phi_q.iter().zip(&around).map(|(a, b)| a * b).collect()
            };
            f.apply_multiplier(&m)
        };
        let sum_b = near_sum(b);
        let sum_u = near_sum(u);
        out.i212 -= w * adv(&b_lo_q, &sum_b)?.inner(&u_q);
        out.i412 -= w * adv(&b_lo_q, &sum_u)?.inner(&b_q);
        out.i512 += w * hall(&b_lo_q, &b_q)?.inner(&curl_bq);
        for p in ctx.near(q) {
            let (u_p, b_p) = (sh(u, p), sh(b, p));
            let b_lo_p = low(b, p - 2);
            let diff = &b_lo_p - &b_lo_q;
            let dq_bp = lp.shell_or_zero(&b_p, q);
            let dq_up = lp.shell_or_zero(&u_p, q);
            out.i213 -= w * adv(&diff, &dq_bp)?.inner(&u_q);
            out.i413 -= w * adv(&diff, &dq_up)?.inner(&b_q);
            out.i513 += w * hall(&diff, &dq_bp)?.inner(&curl_bq);
            if b_lo_p.is_zero() {
                continue;
            }
            let c2 = advective_commutator(lp, &b_lo_p, &b_p, q)?;
            let c4 = advective_commutator(lp, &b_lo_p, &u_p, q)?;
            let c5 = hall_commutator(lp, &b_lo_p, &b_p, q)?;
            out.i211 -= w * c2.inner(&u_q);
            out.i411 -= w * c4.inner(&b_q);
            out.i511 += w * c5.inner(&curl_bq);
            if p < 1 {
                continue;
            }
            if p <= split + 2 {
                out.a1 += w * abs_pairing(&c2, &u_q);
                out.a4 += w * abs_pairing(&c5, &curl_bq);
            } else {
                let mid = lp.bandpass(b, split, p - 2);
                out.a2 += w * abs_pairing(&advective_commutator(lp, &b_split, &b_p, q)?, &u_q);
                out.a3 += w * abs_pairing(&advective_commutator(lp, &mid, &b_p, q)?, &u_q);
                out.a5 += w * abs_pairing(&hall_commutator(lp, &b_split, &b_p, q)?, &curl_bq);
                out.a6 += w * abs_pairing(&hall_commutator(lp, &mid, &b_p, q)?, &curl_bq);
            }
        }
    }
    Ok(out)
}
