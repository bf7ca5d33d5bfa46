//! Dyadic Littlewood-Paley blocks as Fourier multipliers on the grid.
//!
//! `phi_{-1} = chi(|k|)` and `phi_q(|k|) = chi(|k| / 2^{q+1}) - chi(|k| / 2^q)`
//! for `q >= 0`, so the blocks telescope to `chi(|k| / 2^{Q+1})`. Shells whose
//! support starts beyond the dealiasing radius are treated as empty.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

/// Radial cutoff `chi` with `chi = 1` on `[0, 3/4]` and `chi = 0` on `[1, inf)`.
#[derive(Clone, Default)]
pub enum ChiProfile {
    /// `g((1 - r) / (1/4))` with `g(s) = e^{-1/s} / (e^{-1/s} + e^{-1/(1-s)})`; C-infinity.
    #[default]
    Bridge,
    /// Cubic smoothstep on `(3/4, 1)`; only C^1, kept for sensitivity studies.
    Smoothstep,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for ChiProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChiProfile::Bridge => f.write_str("Bridge"),
            ChiProfile::Smoothstep => f.write_str("Smoothstep"),
            ChiProfile::Custom(_) => f.write_str("Custom"),
        }
    }
}

fn bridge(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / s).exp();
    let b = (-1.0 / (1.0 - s)).exp();
    a / (a + b)
}

impl ChiProfile {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            ChiProfile::Bridge => {
                if r <= 0.75 {
                    1.0
                } else if r >= 1.0 {
                    0.0
                } else {
                    bridge((1.0 - r) / 0.25)
                }
            }
            ChiProfile::Smoothstep => {
                if r <= 0.75 {
                    1.0
                } else if r >= 1.0 {
                    0.0
                } else {
                    let s = (1.0 - r) / 0.25;
                    s * s * (3.0 - 2.0 * s)
                }
            }
            ChiProfile::Custom(f) => f(r),
        }
    }

    /// Check plateau, support, range and monotonicity on a fine sample.
    pub fn validate(&self) -> Result<()> {
        const SAMPLES: usize = 4096;
        for i in 0..=SAMPLES {
            let r = 0.75 * i as f64 / SAMPLES as f64;
            if self.eval(r) != 1.0 {
                return Err(Error::param(format!("chi({r}) must equal 1 on [0, 3/4]")));
            }
            let r = 1.0 + 3.0 * i as f64 / SAMPLES as f64;
            if self.eval(r) != 0.0 {
                return Err(Error::param(format!("chi({r}) must vanish on [1, inf)")));
            }
        }
        let mut prev = 1.0;
        for i in 0..=SAMPLES {
            let r = 0.75 + 0.25 * i as f64 / SAMPLES as f64;
            let v = self.eval(r);
            if !(0.0..=1.0).contains(&v) || v > prev {
                return Err(Error::param(format!(
                    "chi must be monotone in [0, 1], fails at r = {r}"
                )));
            }
            prev = v;
        }
        Ok(())
    }
}

/// Profile names accepted in run configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PartitionChoice {
    #[default]
    Bridge,
    Smoothstep,
    /// Indicator annuli `2^{q-1} < |k| <= 2^q`.
    Sharp,
}

#[derive(Debug, Clone)]
pub enum PartitionKind {
    Smooth(ChiProfile),
    Sharp,
}

impl From<PartitionChoice> for PartitionKind {
    fn from(c: PartitionChoice) -> Self {
        match c {
            PartitionChoice::Bridge => PartitionKind::Smooth(ChiProfile::Bridge),
            PartitionChoice::Smoothstep => PartitionKind::Smooth(ChiProfile::Smoothstep),
            PartitionChoice::Sharp => PartitionKind::Sharp,
        }
    }
}

/// `lambda_q = 2^q`, which also gives `lambda_{-1} = 1/2`.
pub fn lambda(q: i32) -> f64 {
    2f64.powi(q)
}

/// Pair of Sobolev estimators returned by [`LpPartition::sobolev_norms`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SobolevEstimates {
    /// `((2 pi)^3 sum_k |k|^{2s} |c(k)|^2)^{1/2}`
    pub direct: f64,
    /// `(sum_q lambda_q^{2s} ||Delta_q f||_2^2)^{1/2}`
    pub dyadic: f64,
}

/// The multiplier family sampled at every grid wavevector.
#[derive(Debug, Clone)]
pub struct LpPartition {
    grid: Grid,
    kind: PartitionKind,
    q_max: i32,
    /// `multipliers[q + 1]` holds `phi_q`
    multipliers: Vec<Vec<f64>>,
    unity_defect: f64,
    unity_radius: f64,
}

pub const UNITY_TOL: f64 = 1e-12;

impl LpPartition {
    /// Smooth partition built from `chi`.
    pub fn build(grid: &Grid, chi: ChiProfile) -> Result<Self> {
        chi.validate()?;
        let cut = grid.dealias_cut() as f64;
        let mut q_max = -1;
        while 0.75 * lambda(q_max + 1) < cut {
            q_max += 1;
        }
        let eval = |q: i32, k: f64| -> f64 {
            if q == -1 {
                chi.eval(k)
            } else {
                chi.eval(k / lambda(q + 1)) - chi.eval(k / lambda(q))
            }
        };
        let multipliers = (-1..=q_max)
            .map(|q| grid.kmags().iter().map(|&k| eval(q, k)).collect())
            .collect();
        Self::finish(grid, PartitionKind::Smooth(chi), q_max, multipliers)
    }

    /// Indicator annuli `2^{q-1} < |k| <= 2^q` (and `|k| <= 1/2` for q = -1).
    pub fn build_sharp(grid: &Grid) -> Result<Self> {
        let cut = grid.dealias_cut() as f64;
        let mut q_max = -1;
        while lambda(q_max) < cut {
            q_max += 1;
        }
        let multipliers = (-1..=q_max)
            .map(|q| {
                grid.kmags()
                    .iter()
                    .map(|&k| {
                        let inside = if q == -1 {
                            k <= 0.5
                        } else {
                            k > lambda(q - 1) && k <= lambda(q)
                        };
                        if inside {
                            1.0
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        Self::finish(grid, PartitionKind::Sharp, q_max, multipliers)
    }

    pub fn from_kind(grid: &Grid, kind: PartitionKind) -> Result<Self> {
        match kind {
            PartitionKind::Smooth(chi) => Self::build(grid, chi),
            PartitionKind::Sharp => Self::build_sharp(grid),
        }
    }

    fn finish(
        grid: &Grid,
        kind: PartitionKind,
        q_max: i32,
        multipliers: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let len = grid.len();
        let defect: Vec<f64> = (0..len)
            .map(|idx| (multipliers.iter().map(|m: &Vec<f64>| m[idx]).sum::<f64>() - 1.0).abs())
            .collect();
        let unity_defect = (0..len)
            .filter(|&idx| grid.is_retained(idx))
            .map(|idx| defect[idx])
            .fold(0.0, f64::max);
        if unity_defect > UNITY_TOL {
            return Err(Error::Invariant(format!(
                "partition of unity fails on retained modes: defect {unity_defect:e}"
            )));
        }
        // largest radius below which every grid mode sums to one
        let mut order: Vec<usize> = (0..len).collect();
        order.sort_by(|&a, &b| grid.kmag(a).total_cmp(&grid.kmag(b)));
        let mut unity_radius = 0.0;
        for &idx in &order {
            if defect[idx] > UNITY_TOL {
                break;
            }
            unity_radius = grid.kmag(idx);
        }
        Ok(LpPartition {
            grid: grid.clone(),
            kind,
            q_max,
            multipliers,
            unity_defect,
            unity_radius,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kind(&self) -> &PartitionKind {
        &self.kind
    }

    pub fn q_min(&self) -> i32 {
        -1
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    pub fn shells(&self) -> impl Iterator<Item = i32> {
        -1..=self.q_max
    }

    /// Max of `|sum_q phi_q - 1|` over retained modes.
    pub fn unity_defect(&self) -> f64 {
        self.unity_defect
    }

    /// Largest grid wavenumber up to which the blocks sum to one.
    pub fn unity_radius(&self) -> f64 {
        self.unity_radius
    }

    fn check_q(&self, q: i32) -> Result<()> {
        if q < -1 || q > self.q_max {
            return Err(Error::param(format!(
                "shell index {q} outside [-1, {}]",
                self.q_max
            )));
        }
        Ok(())
    }

    pub fn multiplier(&self, q: i32) -> Result<&[f64]> {
        self.check_q(q)?;
        Ok(&self.multipliers[(q + 1) as usize])
    }

    /// `sum_{lo <= q <= hi} phi_q`, clipped to the resolved shells.
    pub fn range_multiplier(&self, lo: i32, hi: i32) -> Vec<f64> {
        let lo = lo.max(-1);
        let hi = hi.min(self.q_max);
        let mut m = vec![0.0; self.grid.len()];
        for q in lo..=hi {
            for (a, b) in m.iter_mut().zip(&self.multipliers[(q + 1) as usize]) {
                *a += b;
            }
        }
        m
    }

    /// `Delta_q f`.
    pub fn shell_project(&self, f: &SpectralField, q: i32) -> Result<SpectralField> {
        self.check_q(q)?;
        self.grid.ensure_same(f.grid())?;
        Ok(f.apply_multiplier(&self.multipliers[(q + 1) as usize]))
    }

    /// `Delta_q f`, or zero for indices outside the resolved range.
    pub fn shell_or_zero(&self, f: &SpectralField, q: i32) -> SpectralField {
        if q < -1 || q > self.q_max {
            SpectralField::zeros(f.grid(), f.ncomp()).with_flag_of(f)
        } else {
            f.apply_multiplier(&self.multipliers[(q + 1) as usize])
        }
    }

    /// `f_{<= q} = sum_{p <= q} Delta_p f`.
    pub fn lowpass(&self, f: &SpectralField, q: i32) -> SpectralField {
        if q < -1 {
            return SpectralField::zeros(f.grid(), f.ncomp()).with_flag_of(f);
        }
        f.apply_multiplier(&self.range_multiplier(-1, q))
    }

    /// `f_{(lo, hi]} = sum_{lo < p <= hi} Delta_p f`.
    pub fn bandpass(&self, f: &SpectralField, lo: i32, hi: i32) -> SpectralField {
        if hi <= lo {
            return SpectralField::zeros(f.grid(), f.ncomp()).with_flag_of(f);
        }
        f.apply_multiplier(&self.range_multiplier(lo + 1, hi))
    }

    /// `tilde f_q = sum_{|p - q| <= 1} Delta_p f`.
    pub fn tilde(&self, f: &SpectralField, q: i32) -> SpectralField {
        f.apply_multiplier(&self.range_multiplier(q - 1, q + 1))
    }

    /// All blocks `Delta_q f` for `q = -1 ..= q_max`.
    pub fn decompose(&self, f: &SpectralField) -> Vec<SpectralField> {
        self.multipliers
            .iter()
            .map(|m| f.apply_multiplier(m))
            .collect()
    }

    /// `||f||_{B^s_{p,inf}} = sup_q lambda_q^s ||Delta_q f||_p`.
    pub fn besov_norm(&self, f: &SpectralField, s: f64, p: f64) -> Result<f64> {
        self.besov_norm_oversampled(f, s, p, 1)
    }

    /// Besov norm with `L^p` norms evaluated on a grid refined by `factor`.
    pub fn besov_norm_oversampled(
        &self,
        f: &SpectralField,
        s: f64,
        p: f64,
        factor: usize,
    ) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::param(format!("norm exponent must be >= 1, got {p}")));
        }
        self.grid.ensure_same(f.grid())?;
        let mut best: f64 = 0.0;
        for q in self.shells() {
            let block = f.apply_multiplier(&self.multipliers[(q + 1) as usize]);
            if block.is_zero() {
                continue;
            }
            let norm = block.lp_norm_oversampled(p, factor)?;
            best = best.max(lambda(q).powf(s) * norm);
        }
        Ok(best)
    }

    pub fn sobolev_norms(&self, f: &SpectralField, s: f64) -> SobolevEstimates {
        let direct = f.sobolev_sq(s).sqrt();
        let mut sum = 0.0;
        for q in self.shells() {
            let m = &self.multipliers[(q + 1) as usize];
            let w = lambda(q).powf(2.0 * s);
            let mut shell = 0.0;
            for c in f.components() {
                for (z, phi) in c.iter().zip(m) {
                    if *phi != 0.0 {
                        shell += phi * phi * z.norm_sqr();
                    }
                }
            }
            sum += w * shell;
        }
        SobolevEstimates {
            direct,
            dyadic: (sum * self.grid.volume()).sqrt(),
        }
    }

    /// `[min, max]` over retained `k != 0` of
    /// `(sum_q lambda_q^{2s} phi_q(k)^2 / |k|^{2s})^{1/2}`: the range of
    /// `dyadic / direct` for mean-free fields.
    pub fn sobolev_envelope(&self, s: f64) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for idx in 0..self.grid.len() {
            let k = self.grid.kmag(idx);
            if k == 0.0 || !self.grid.is_retained(idx) {
                continue;
            }
            let sum: f64 = self
                .shells()
                .map(|q| {
                    let phi = self.multipliers[(q + 1) as usize][idx];
                    lambda(q).powf(2.0 * s) * phi * phi
                })
                .sum();
            let c = (sum / k.powf(2.0 * s)).sqrt();
            lo = lo.min(c);
            hi = hi.max(c);
        }
        (lo, hi)
    }

    /// `||Delta_q f||_r / (lambda_q^{3 (1/s - 1/r)} ||Delta_q f||_s)`, or 0 when
    /// the block vanishes.
    pub fn bernstein_ratio(&self, f: &SpectralField, q: i32, r: f64, s_exp: f64) -> Result<f64> {
        if s_exp.is_nan() || s_exp < 1.0 {
            return Err(Error::param(format!(
                "exponent s must be >= 1, got {s_exp}"
            )));
        }
        if r.is_nan() || r < s_exp {
            return Err(Error::param(format!(
                "need r >= s, got r = {r}, s = {s_exp}"
            )));
        }
        let block = self.shell_project(f, q)?;
        let phys = block.to_physical();
        let denom_norm = phys.lp_norm(s_exp)?;
        if denom_norm == 0.0 {
            return Ok(0.0);
        }
        let inv_r = if r.is_infinite() { 0.0 } else { 1.0 / r };
        let scale = lambda(q).powf(3.0 * (1.0 / s_exp - inv_r));
        Ok(phys.lp_norm(r)? / (scale * denom_norm))
    }
}

impl SpectralField {
    fn with_flag_of(self, other: &SpectralField) -> SpectralField {
        if other.is_solenoidal() {
            self.assume_solenoidal()
        } else {
            self
        }
    }
}
