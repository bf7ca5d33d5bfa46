use num_complex::Complex64;

use super::config::InitSpec;
use crate::error::{Error, Result};
use crate::littlewood_paley::lambda;
use crate::spectral::codec::read_checkpoint;
use crate::spectral::random::{normalize_rms, random_solenoidal, rng_from_seed, Band};
use crate::spectral::{DealiasRule, Grid, PhysicalSamples, SpectralField};

/// Initial state; `t` is nonzero only when restarting from a checkpoint.
#[derive(Debug, Clone)]
pub struct Initial {
    pub t: f64,
    pub u: SpectralField,
    pub b: SpectralField,
}

/// Sample `f` at the collocation points and keep the retained modes.
pub fn sample_vector(grid: &Grid, f: impl Fn([f64; 3]) -> [f64; 3]) -> Result<SpectralField> {
    let len = grid.len();
    let mut comps = vec![vec![0.0; len]; 3];
    for idx in 0..len {
        let v = f(grid.point(idx));
        for c in 0..3 {
            comps[c][idx] = v[c];
        }
    }
    let mut out =
        SpectralField::from_physical(grid, &PhysicalSamples::new(grid.n(), comps)?)?.dealiased();
    out.refresh_solenoidal();
    Ok(out)
}

/// ABC field `(a sin z + a cos y, a sin x + a cos z, a sin y + a cos x)`; `curl = self`.
pub fn abc_field(grid: &Grid, a: f64) -> Result<SpectralField> {
    sample_vector(grid, |[x, y, z]| {
        [
            a * (z.sin() + y.cos()),
            a * (x.sin() + z.cos()),
            a * (y.sin() + x.cos()),
        ]
    })
}

pub fn orszag_tang(grid: &Grid) -> Result<(SpectralField, SpectralField)> {
    let u = sample_vector(grid, |[x, y, _]| [-2.0 * y.sin(), 2.0 * x.sin(), 0.0])?;
    let b = sample_vector(grid, |[x, y, z]| {
        [
            -2.0 * (2.0 * y).sin() + z.sin(),
            2.0 * x.sin() + z.sin(),
            0.0,
        ]
    })?;
    Ok((u, b))
}

/// Growth rate `lambda = -i omega` of the fast (whistler) branch of the ideal
/// system linearized about `b0 z` at wavevector `(0, 0, k)`, polarization
/// `e = (1, i sigma, 0) / sqrt 2`. The modal amplitudes satisfy
/// `lambda^2 - c lambda - a^2 = 0` with `a = i k b0`, `c = -i sigma k^2 b0`.
pub fn whistler_eigenvalue(k: f64, b0: f64, sigma: f64) -> Complex64 {
    let a = Complex64::new(0.0, k * b0);
    let c = Complex64::new(0.0, -sigma * k * k * b0);
    let disc = (c * c + 4.0 * a * a).sqrt();
    let r1 = (c + disc) / 2.0;
    let r2 = (c - disc) / 2.0;
    if r1.norm() >= r2.norm() {
        r1
    } else {
        r2
    }
}

/// Uniform `b0 z` plus the whistler eigenmode with perturbation magnitude `eps`.
pub fn whistler_state(
    grid: &Grid,
    b0: f64,
    k: i64,
    eps: f64,
    sigma: f64,
) -> Result<(SpectralField, SpectralField)> {
    let lam = whistler_eigenvalue(k as f64, b0, sigma);
    let a = Complex64::new(0.0, k as f64 * b0);
    let scale = if lam.norm() == 0.0 {
        0.0
    } else {
        eps / (lam.norm() * std::f64::consts::SQRT_2)
    };
    let e = [
        Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        Complex64::new(0.0, sigma * std::f64::consts::FRAC_1_SQRT_2),
    ];
    let mut u = SpectralField::zero_vector(grid);
    let mut b = SpectralField::zero_vector(grid);
    for c in 0..2 {
        u.set_mode(c, [0, 0, k], a * scale * e[c])?;
        b.set_mode(c, [0, 0, k], lam * scale * e[c])?;
    }
    b.set_mode(2, [0, 0, 0], Complex64::new(b0, 0.0))?;
    let u = u.dealiased();
    let b = b.dealiased();
    let (mut u, mut b) = (u, b);
    u.refresh_solenoidal();
    b.refresh_solenoidal();
    Ok((u, b))
}

pub fn make_initial(spec: &InitSpec, grid: &Grid, rule: DealiasRule, seed: u64) -> Result<Initial> {
    let zero = SpectralField::zero_vector(grid);
    let (u, b, t) = match spec {
        InitSpec::BeltramiU { amplitude } => (abc_field(grid, *amplitude)?, zero, 0.0),
        InitSpec::BeltramiB { amplitude } => (zero, abc_field(grid, *amplitude)?, 0.0),
        InitSpec::OrszagTang3d => {
            let (u, b) = orszag_tang(grid)?;
            (u, b, 0.0)
        }
        InitSpec::RandomBand {
            q_lo,
            q_hi,
            amplitude,
            b_amplitude,
        } => {
            // exact support in shells q_lo..=q_hi: above every phi_{q_lo - 1}
            // and below every phi_{q_hi + 1}
            let band = Band::new(lambda(*q_lo), 0.75 * lambda(q_hi + 1))?;
            let mut rng = rng_from_seed(seed);
            let u = random_solenoidal(grid, band, &mut rng);
            let b = random_solenoidal(grid, band, &mut rng);
            (
                normalize_rms(&u, *amplitude),
                normalize_rms(&b, b_amplitude.unwrap_or(*amplitude)),
                0.0,
            )
        }
        InitSpec::UniformBPlusWhistler {
            b0,
            k,
            epsilon,
            polarization,
        } => {
            let (u, b) = whistler_state(grid, *b0, *k, *epsilon, *polarization as f64)?;
            (u, b, 0.0)
        }
        InitSpec::FromCheckpoint { path } => {
            let ck = read_checkpoint(path, rule).map_err(|e| Error::Config(e.to_string()))?;
            if ck.u.grid() != grid {
                return Err(Error::Config(format!(
                    "checkpoint {} holds n={} but the run uses n={}",
                    path.display(),
                    ck.u.grid().n(),
                    grid.n()
                )));
            }
            (ck.u, ck.b, ck.t)
        }
    };
    for (name, f) in [("u", &u), ("b", &b)] {
        if !f.is_finite() || f.divergence_defect() > 1e-10 {
            return Err(Error::Config(format!(
                "initial {name} is not a finite divergence-free field"
            )));
        }
    }
    Ok(Initial { t, u, b })
}
