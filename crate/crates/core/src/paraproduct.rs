//! Bony decomposition of `Delta_q (u . grad v)`, the advective and Hall
//! commutators, and seeded sampling of the ratios the commutator and
//! Bernstein estimates bound by absolute constants.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::LpPartition;
use crate::spectral::products::{cross, dot_grad};
use crate::spectral::random::{random_solenoidal, rng_from_seed, Band};
use crate::spectral::{Grid, SpectralField};

/// The three paraproduct pieces of `Delta_q (u . grad v)` for one shell.
#[derive(Debug, Clone)]
pub struct BonyTriple {
    pub q: i32,
    /// `sum_{|q-p|<=2} Delta_q(u_{<=p-2} . grad v_p)`
    pub low_high: SpectralField,
    /// `sum_{|q-p|<=2} Delta_q(u_p . grad v_{<=p-2})`
    pub high_low: SpectralField,
    /// `sum_{p>=q-2} Delta_q(tilde u_p . grad v_p)`
    pub high_high: SpectralField,
}

impl BonyTriple {
    pub fn total(&self) -> SpectralField {
        &(&self.low_high + &self.high_low) + &self.high_high
    }
}

pub fn bony_decompose(
    lp: &LpPartition,
    u: &SpectralField,
    v: &SpectralField,
    q: i32,
) -> Result<BonyTriple> {
    u.require_solenoidal("advecting field")?;
    lp.multiplier(q)?;
    lp.grid().ensure_same(u.grid())?;
    lp.grid().ensure_same(v.grid())?;
    let phi_q = lp.multiplier(q)?;
    let mut low_high = SpectralField::zero_vector(u.grid());
    let mut high_low = SpectralField::zero_vector(u.grid());
    let mut high_high = SpectralField::zero_vector(u.grid());
    for p in (q - 2)..=(q + 2) {
        if p < -1 || p > lp.q_max() {
            continue;
        }
        let u_p = lp.shell_or_zero(u, p);
        let v_p = lp.shell_or_zero(v, p);
        let u_low = lp.lowpass(u, p - 2);
        let v_low = lp.lowpass(v, p - 2);
        if !u_low.is_zero() && !v_p.is_zero() {
            low_high += &dot_grad(&u_low, &v_p)?.apply_multiplier(phi_q);
        }
        if !u_p.is_zero() && !v_low.is_zero() {
            high_low += &dot_grad(&u_p, &v_low)?.apply_multiplier(phi_q);
        }
    }
    for p in (q - 2).max(-1)..=lp.q_max() {
        let u_t = lp.tilde(u, p);
        let v_p = lp.shell_or_zero(v, p);
        if !u_t.is_zero() && !v_p.is_zero() {
            high_high += &dot_grad(&u_t, &v_p)?.apply_multiplier(phi_q);
        }
    }
    Ok(BonyTriple {
        q,
        low_high,
        high_low,
        high_high,
    })
}

/// `[Delta_q, u_low . grad] v = Delta_q(u_low . grad v) - u_low . grad Delta_q v`.
pub fn advective_commutator(
    lp: &LpPartition,
    u_low: &SpectralField,
    v_shell: &SpectralField,
    q: i32,
) -> Result<SpectralField> {
    u_low.require_solenoidal("low-frequency advecting field")?;
    let phi_q = lp.multiplier(q)?;
    let first = dot_grad(u_low, v_shell)?.apply_multiplier(phi_q);
    let second = dot_grad(u_low, &v_shell.apply_multiplier(phi_q))?;
    Ok(&first - &second)
}

/// `[Delta_q, F x curl] G = Delta_q(F x curl G) - F x curl(Delta_q G)`.
pub fn hall_commutator(
    lp: &LpPartition,
    f: &SpectralField,
    g: &SpectralField,
    q: i32,
) -> Result<SpectralField> {
    f.require_solenoidal("F")?;
    let phi_q = lp.multiplier(q)?;
    let first = cross(f, &g.curl()?)?.apply_multiplier(phi_q);
    let second = cross(f, &g.apply_multiplier(phi_q).curl()?)?;
    Ok(&first - &second)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pairing {
    /// `integral of [Delta_q, F x curl] G . curl H`
    pub value: f64,
    /// `||grad^2 F||_inf ||G||_{r1} ||H||_{r2}`
    pub bound: f64,
    /// `|value| / bound`, 0 when the pairing vanishes
    pub ratio: f64,
}

pub fn hall_commutator_pairing(
    lp: &LpPartition,
    f: &SpectralField,
    g: &SpectralField,
    h: &SpectralField,
    q: i32,
    r1: f64,
    r2: f64,
) -> Result<Pairing> {
    if !(r1 > 1.0 && r2 > 1.0 && r1.is_finite() && r2.is_finite())
        || (1.0 / r1 + 1.0 / r2 - 1.0).abs() > 1e-12
    {
        return Err(Error::param(format!(
            "exponents must be conjugate in (1, inf), got {r1}, {r2}"
        )));
    }
    let comm = hall_commutator(lp, f, g, q)?;
    let value = comm.inner(&h.curl()?);
    let bound = hessian_sup(f)? * g.lp_norm(r1)? * h.lp_norm(r2)?;
    let ratio = if value == 0.0 {
        0.0
    } else if bound == 0.0 {
        f64::INFINITY
    } else {
        value.abs() / bound
    };
    Ok(Pairing {
        value,
        bound,
        ratio,
    })
}

/// `sup_x |grad F|` with the Frobenius magnitude of the 3x3 tensor.
pub fn gradient_sup(f: &SpectralField) -> Result<f64> {
    Ok(f.gradient_tensor()?.sup_norm())
}

/// `sup_x |grad^2 F|` with the Frobenius magnitude of the 27 second derivatives.
pub fn hessian_sup(f: &SpectralField) -> Result<f64> {
    let mut sq = vec![0.0; f.grid().len()];
    for a in 0..3 {
        let block = f.derivative(a)?.gradient_tensor()?.to_physical();
        for c in 0..block.ncomp() {
            for (s, v) in sq.iter_mut().zip(block.comp(c)) {
                *s += v * v;
            }
        }
    }
    Ok(sq.into_iter().fold(0.0, f64::max).sqrt())
}

/// Summary of a sampled ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaStats {
    pub lemma: String,
    pub samples: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub grid_n: usize,
    pub seed: u64,
}

impl LemmaStats {
    fn from_ratios(lemma: &str, ratios: &[f64], grid_n: usize, seed: u64) -> Self {
        let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
        let mean_ratio = if ratios.is_empty() {
            0.0
        } else {
            ratios.iter().sum::<f64>() / ratios.len() as f64
        };
        LemmaStats {
            lemma: lemma.to_string(),
            samples: ratios.len(),
            max_ratio,
            mean_ratio,
            grid_n,
            seed,
        }
    }
}

/// `num / den`, with vacuous samples (both zero, e.g. no resolved low
/// frequencies on coarse grids) counted as 0.
fn sample_ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Random divergence-free field filling every retained mode with `|k| >= 1`.
pub fn random_full<R: Rng>(grid: &Grid, rng: &mut R) -> SpectralField {
    let band = Band::new(1.0, grid.dealias_cut() as f64).expect("valid band");
    random_solenoidal(grid, band, rng)
}

/// Shell used for the commutator samples: the top resolved one, so the
/// low-frequency factor `<= q - 2` scales with it.
fn sample_shell(lp: &LpPartition) -> Result<i32> {
    if lp.q_max() < 1 {
        return Err(Error::param("grid too coarse for commutator sampling"));
    }
    Ok(lp.q_max())
}

/// `||Delta_q f||_inf / (lambda_q^{3/2} ||Delta_q f||_2)` over shells `1..=q_max`.
pub fn sample_bernstein(lp: &LpPartition, samples: usize, seed: u64) -> Result<LemmaStats> {
    let q_top = sample_shell(lp)?;
    let mut ratios = Vec::with_capacity(samples);
    for i in 0..samples {
        let mut rng = rng_from_seed(seed.wrapping_add(i as u64));
        let q = 1 + (i as i32) % q_top;
        let f = random_full(lp.grid(), &mut rng);
        ratios.push(lp.bernstein_ratio(&f, q, f64::INFINITY, 2.0)?);
    }
    Ok(LemmaStats::from_ratios(
        "bernstein",
        &ratios,
        lp.grid().n(),
        seed,
    ))
}

/// `||[Delta_q, u_{<=q-2} . grad] v_q||_2 / (||grad u_{<=q-2}||_inf ||v_q||_2)`.
pub fn sample_advective_commutator(
    lp: &LpPartition,
    samples: usize,
    seed: u64,
) -> Result<LemmaStats> {
    let q = sample_shell(lp)?;
    let mut ratios = Vec::with_capacity(samples);
    for i in 0..samples {
        let mut rng = rng_from_seed(seed.wrapping_add(i as u64));
        let u_low = lp.lowpass(&random_full(lp.grid(), &mut rng), q - 2);
        let v = lp.shell_project(&random_full(lp.grid(), &mut rng), q)?;
        let comm = advective_commutator(lp, &u_low, &v, q)?;
        ratios.push(sample_ratio(
            comm.l2_norm(),
            gradient_sup(&u_low)? * v.l2_norm(),
        ));
    }
    Ok(LemmaStats::from_ratios(
        "advective_commutator",
        &ratios,
        lp.grid().n(),
        seed,
    ))
}

/// `||[Delta_q, F x curl] G||_2 / (||grad F||_inf ||G||_2)` with `F` low and `G` at shell q.
pub fn sample_hall_commutator(lp: &LpPartition, samples: usize, seed: u64) -> Result<LemmaStats> {
    let q = sample_shell(lp)?;
    let mut ratios = Vec::with_capacity(samples);
    for i in 0..samples {
        let mut rng = rng_from_seed(seed.wrapping_add(i as u64));
        let f = lp.lowpass(&random_full(lp.grid(), &mut rng), q - 2);
        let g = lp.shell_project(&random_full(lp.grid(), &mut rng), q)?;
        let comm = hall_commutator(lp, &f, &g, q)?;
        ratios.push(sample_ratio(
            comm.l2_norm(),
            gradient_sup(&f)? * g.l2_norm(),
        ));
    }
    Ok(LemmaStats::from_ratios(
        "hall_commutator",
        &ratios,
        lp.grid().n(),
        seed,
    ))
}

/// Pairing ratio with `(r1, r2) = (2, 2)`, `F` low and `G`, `H` at shell q.
pub fn sample_hall_pairing(lp: &LpPartition, samples: usize, seed: u64) -> Result<LemmaStats> {
    let q = sample_shell(lp)?;
    let mut ratios = Vec::with_capacity(samples);
    for i in 0..samples {
        let mut rng = rng_from_seed(seed.wrapping_add(i as u64));
        let f = lp.lowpass(&random_full(lp.grid(), &mut rng), q - 2);
        let g = lp.shell_project(&random_full(lp.grid(), &mut rng), q)?;
        let h = lp.shell_project(&random_full(lp.grid(), &mut rng), q)?;
        ratios.push(hall_commutator_pairing(lp, &f, &g, &h, q, 2.0, 2.0)?.ratio);
    }
    Ok(LemmaStats::from_ratios(
        "hall_pairing",
        &ratios,
        lp.grid().n(),
        seed,
    ))
}

/// All four sampled constants.
pub fn lemma_report(lp: &LpPartition, samples: usize, seed: u64) -> Result<Vec<LemmaStats>> {
    Ok(vec![
        sample_bernstein(lp, samples, seed)?,
        sample_advective_commutator(lp, samples, seed)?,
        sample_hall_commutator(lp, samples, seed)?,
        sample_hall_pairing(lp, samples, seed)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::littlewood_paley::ChiProfile;
    use num_complex::Complex64;

    fn setup(n: usize) -> LpPartition {
        LpPartition::build(&Grid::new(n).unwrap(), ChiProfile::Bridge).unwrap()
    }

    fn constant_vector(grid: &Grid) -> SpectralField {
        let mut f = SpectralField::zero_vector(grid);
        f.set_mode(0, [0, 0, 0], Complex64::new(0.7, 0.0)).unwrap();
        f.set_mode(2, [0, 0, 0], Complex64::new(-0.3, 0.0)).unwrap();
        f.refresh_solenoidal();
        f
    }

    #[test]
    fn constant_v_gives_zero_triple() {
        let lp = setup(16);
        let mut rng = rng_from_seed(1);
        let u = random_full(lp.grid(), &mut rng);
        let v = constant_vector(lp.grid());
        for q in lp.shells() {
            let t = bony_decompose(&lp, &u, &v, q).unwrap();
            assert!(t.total().max_abs_coeff() < 1e-15);
        }
    }

    #[test]
    fn triple_is_complete() {
        let lp = setup(16);
        let mut rng = rng_from_seed(2);
        let u = random_full(lp.grid(), &mut rng);
        let v = random_full(lp.grid(), &mut rng);
        let direct = dot_grad(&u, &v).unwrap();
        for q in lp.shells() {
            let t = bony_decompose(&lp, &u, &v, q).unwrap();
            let reference = lp.shell_project(&direct, q).unwrap();
            let err = (&t.total() - &reference).l2_norm();
            assert!(
                err <= 1e-10 * reference.l2_norm().max(1e-3 * direct.l2_norm()),
                "q={q}"
            );
        }
    }

    #[test]
    fn non_solenoidal_advector_is_rejected() {
        let lp = setup(8);
        let mut u = SpectralField::zero_vector(lp.grid());
        u.set_mode(0, [1, 0, 0], Complex64::new(1.0, 0.0)).unwrap();
        let v = u.clone();
        assert!(matches!(
            bony_decompose(&lp, &u, &v, 0),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            hall_commutator(&lp, &u, &v, 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn constant_factor_commutes() {
        let lp = setup(16);
        let c = constant_vector(lp.grid());
        let mut rng = rng_from_seed(4);
        let g = random_full(lp.grid(), &mut rng);
        for q in lp.shells() {
            assert!(
                advective_commutator(&lp, &c, &g, q)
                    .unwrap()
                    .max_abs_coeff()
                    < 1e-14
            );
            assert!(hall_commutator(&lp, &c, &g, q).unwrap().max_abs_coeff() < 1e-14);
            let h = random_full(lp.grid(), &mut rng);
            let p = hall_commutator_pairing(&lp, &c, &g, &h, q, 2.0, 2.0).unwrap();
            assert!(
                p.value.abs() < 1e-14 * g.l2_norm() * h.curl().unwrap().l2_norm() && p.bound == 0.0,
                "{p:?}"
            );
        }
        let zero = SpectralField::zero_vector(lp.grid());
        assert!(advective_commutator(&lp, &g, &zero, 1).unwrap().is_zero());
    }

    #[test]
    fn pairing_with_zero_h_and_bad_exponents() {
        let lp = setup(16);
        let mut rng = rng_from_seed(5);
        let f = lp.lowpass(&random_full(lp.grid(), &mut rng), 0);
        let g = random_full(lp.grid(), &mut rng);
        let zero = SpectralField::zero_vector(lp.grid());
        let p = hall_commutator_pairing(&lp, &f, &g, &zero, 2, 2.0, 2.0).unwrap();
        assert_eq!((p.value, p.ratio), (0.0, 0.0));
        assert!(matches!(
            hall_commutator_pairing(&lp, &f, &g, &zero, 2, 3.0, 2.0),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn shell_pure_beltrami_collapses() {
        // G = (sin z, cos z, 0) has curl G = G and lives in shell 0 only
        let lp = setup(16);
        let mut g = SpectralField::zero_vector(lp.grid());
        g.set_mode(0, [0, 0, 1], Complex64::new(0.0, -0.5)).unwrap();
        g.set_mode(1, [0, 0, 1], Complex64::new(0.5, 0.0)).unwrap();
        g.refresh_solenoidal();
        assert!((&g.curl().unwrap() - &g).max_abs_coeff() < 1e-15);
        let comm = hall_commutator(&lp, &g, &g, 0).unwrap();
        assert!(comm.max_abs_coeff() < 1e-15);
    }

    #[test]
    fn sampled_ratios_are_finite() {
        let lp = setup(16);
        for stats in lemma_report(&lp, 4, 9).unwrap() {
            assert_eq!(stats.samples, 4);
            assert!(
                stats.max_ratio.is_finite() && stats.max_ratio > 0.0,
                "{stats:?}"
            );
            assert!(stats.mean_ratio <= stats.max_ratio);
        }
    }
}
