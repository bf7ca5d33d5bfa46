//! Fast transforms and operators against brute-force direct summation.

use hallmhd::harness::oracle;
use hallmhd::littlewood_paley::{ChiProfile, LpPartition};
use hallmhd::paraproduct::{bony_decompose, random_full};
use hallmhd::solver::initial::{abc_field, sample_vector};
use hallmhd::solver::rhs;
use hallmhd::spectral::products::dot_grad;
use hallmhd::spectral::random::{normalize_rms, random_solenoidal, rng_from_seed, Band};
use hallmhd::spectral::{Grid, PhysicalSamples, SpectralField};
use num_complex::Complex64;
use rand::Rng;

fn rel(a: &SpectralField, b: &SpectralField) -> f64 {
    (a - b).l2_norm() / a.l2_norm().max(b.l2_norm()).max(f64::MIN_POSITIVE)
}

fn max_coeff_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    let mut m: f64 = 0.0;
    for (x, y) in a.components().iter().zip(b.components()) {
        for (p, q) in x.iter().zip(y) {
            m = m.max((p - q).norm());
        }
    }
    m
}

/// Non-solenoidal real field from random samples.
fn random_samples(grid: &Grid, seed: u64) -> PhysicalSamples {
    let mut rng = rng_from_seed(seed);
    let comps = (0..3)
        .map(|_| {
            (0..grid.len())
                .map(|_| rng.random_range(-1.0..1.0))
                .collect()
        })
        .collect();
    PhysicalSamples::new(grid.n(), comps).unwrap()
}

#[test]
fn summation_orders_agree() {
    let g = Grid::new(8).unwrap();
    let s = random_samples(&g, 1);
    let a = oracle::forward_by_mode(&g, s.comp(0)).unwrap();
    let b = oracle::forward_by_point(&g, s.comp(0)).unwrap();
    let worst = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    let size = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
    assert!(worst <= 1e-12 * size, "{worst:e}");
}

#[test]
fn fast_transforms_match_direct_sums() {
    let g = Grid::new(8).unwrap();
    let s = random_samples(&g, 2);
    let fast = SpectralField::from_physical(&g, &s).unwrap();
    let slow = oracle::from_physical(&g, &s).unwrap();
    assert!(max_coeff_diff(&fast, &slow) <= 1e-12 * fast.max_abs_coeff());
    assert!(rel(&fast, &slow) <= 1e-12);

    let back_fast = fast.to_physical();
    let back_slow = oracle::to_physical(&fast).unwrap();
    for c in 0..3 {
        for ((x, y), z) in back_fast
            .comp(c)
            .iter()
            .zip(back_slow.comp(c))
            .zip(s.comp(c))
        {
            assert!((x - y).abs() < 1e-12 && (x - z).abs() < 1e-12);
        }
    }
    let z = SpectralField::zero_vector(&g);
    assert!(oracle::to_physical(&z)
        .unwrap()
        .comp(1)
        .iter()
        .all(|v| *v == 0.0));
}

#[test]
fn derivatives_and_projection_match_oracle() {
    let g = Grid::new(8).unwrap();
    let f = SpectralField::from_physical(&g, &random_samples(&g, 3)).unwrap();
    for axis in 0..3 {
        let fast = f.derivative(axis).unwrap();
        let slow = oracle::derivative(&f, axis).unwrap();
        assert!(
            rel(&fast, &slow) <= 1e-12,
            "axis {axis}: {:e}",
            rel(&fast, &slow)
        );
    }
    let fast = f.leray_project().unwrap();
    let slow = oracle::leray(&f).unwrap();
    assert!(rel(&fast, &slow) <= 1e-12);
}

#[test]
fn gradient_of_plane_wave() {
    // n = 8 against the direct oracle, n = 16 against the analytic gradient
    let g8 = Grid::new(8).unwrap();
    let scalar = |g: &Grid| {
        let s: Vec<f64> = (0..g.len())
            .map(|i| {
                let p = g.point(i);
                (p[0] + 2.0 * p[1]).cos()
            })
            .collect();
        SpectralField::from_physical(g, &PhysicalSamples::new(g.n(), vec![s]).unwrap()).unwrap()
    };
    let f = scalar(&g8);
    let grad = f.gradient().unwrap();
    for axis in 0..3 {
        let slow = oracle::derivative(&f, axis).unwrap();
        let diff: f64 = grad
            .comp(axis)
            .iter()
            .zip(slow.comp(0))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-12, "{diff:e}");
    }
    let g16 = Grid::new(16).unwrap();
    let grad = scalar(&g16).gradient().unwrap().to_physical();
    for i in 0..g16.len() {
        let p = g16.point(i);
        let d = -(p[0] + 2.0 * p[1]).sin();
        assert!((grad.comp(0)[i] - d).abs() < 1e-12);
        assert!((grad.comp(1)[i] - 2.0 * d).abs() < 1e-12);
        assert!(grad.comp(2)[i].abs() < 1e-12);
    }
}

#[test]
fn projection_identities() {
    let g = Grid::new(16).unwrap();
    let phi = SpectralField::from_physical(
        &g,
        &PhysicalSamples::new(16, vec![random_samples(&g, 4).comp(0).to_vec()]).unwrap(),
    )
    .unwrap();
    let grad = phi.gradient().unwrap();
    assert!(grad.leray_project().unwrap().l2_norm() <= 1e-12 * grad.l2_norm());
    let u = random_full(&g, &mut rng_from_seed(5));
    assert!(max_coeff_diff(&u.leray_project().unwrap(), &u) <= 1e-14 * u.max_abs_coeff());
}

#[test]
fn curl_identities() {
    let g = Grid::new(16).unwrap();
    let u = abc_field(&g, 1.0).unwrap();
    let err = (&u.curl().unwrap() - &u).sup_norm();
    assert!(err <= 1e-12, "{err:e}");
    let f = SpectralField::from_physical(&g, &random_samples(&g, 6)).unwrap();
    assert!(f.curl().unwrap().divergence().unwrap().sup_norm() <= 1e-12);
}

#[test]
fn lp_norms_of_cosine() {
    let g = Grid::new(16).unwrap();
    let u = sample_vector(&g, |[x, _, _]| [x.cos(), 0.0, 0.0]).unwrap();
    let vol = (2.0 * std::f64::consts::PI).powi(3);
    assert!((u.lp_norm(2.0).unwrap() - (vol / 2.0).sqrt()).abs() < 1e-12);
    assert!((u.lp_norm(f64::INFINITY).unwrap() - 1.0).abs() < 1e-14);
    let z = SpectralField::zero_vector(&g);
    for p in [1.0, 2.0, 3.5, f64::INFINITY] {
        assert_eq!(z.lp_norm(p).unwrap(), 0.0);
    }
    // random fields in |k| <= 3 against 8x oversampled evaluation
    for seed in 0..3 {
        let band = Band::new(1.0, 3.0).unwrap();
        let f = random_solenoidal(&Grid::new(32).unwrap(), band, &mut rng_from_seed(seed));
        let coarse = f.sup_norm();
        let fine = f.lp_norm_oversampled(f64::INFINITY, 8).unwrap();
        assert!(
            coarse <= fine * (1.0 + 1e-12) && coarse >= 0.98 * fine,
            "{coarse} vs {fine}"
        );
    }
}

#[test]
fn rhs_matches_triad_oracle() {
    let g = Grid::new(8).unwrap();
    let mut rng = rng_from_seed(9);
    let u = normalize_rms(&random_full(&g, &mut rng), 0.2);
    let b = normalize_rms(&random_full(&g, &mut rng), 0.2);
    for hall in [false, true] {
        let (du, db) = rhs(&u, &b, hall).unwrap();
        let (ou, ob) = oracle::rhs(&u, &b, hall).unwrap();
        assert!(rel(&du, &ou) <= 1e-10, "du {:e}", rel(&du, &ou));
        assert!(rel(&db, &ob) <= 1e-10, "db {:e}", rel(&db, &ob));
    }
    let z = SpectralField::zero_vector(&g);
    let (ou, ob) = oracle::rhs(&z, &z, true).unwrap();
    assert!(ou.is_zero() && ob.is_zero());
}

#[test]
fn bony_triple_matches_direct_product() {
    let g = Grid::new(16).unwrap();
    let lp = LpPartition::build(&g, ChiProfile::Bridge).unwrap();
    let mut rng = rng_from_seed(10);
    let u = random_full(&g, &mut rng);
    let v = random_full(&g, &mut rng);
    let prod = dot_grad(&u, &v).unwrap();
    for q in lp.shells() {
        let direct = lp.shell_project(&prod, q).unwrap();
        let t = bony_decompose(&lp, &u, &v, q).unwrap();
        let err = (&t.total() - &direct).l2_norm();
        assert!(
            err <= 1e-10 * direct.l2_norm().max(1e-3 * prod.l2_norm()),
            "q={q}: {err:e}"
        );
    }
}

#[test]
fn bony_scale_separation() {
    // |k| = 2 advecting |k| = 16 at n = 64: only the low-high piece survives at q = 4
    let g = Grid::new(64).unwrap();
    let lp = LpPartition::build(&g, ChiProfile::Bridge).unwrap();
    let mut u = SpectralField::zero_vector(&g);
    u.set_mode(0, [0, 2, 0], Complex64::new(0.5, 0.0)).unwrap();
    u.set_mode(0, [0, -2, 0], Complex64::new(0.5, 0.0)).unwrap();
    u.refresh_solenoidal();
    let mut v = SpectralField::zero_vector(&g);
    v.set_mode(1, [16, 0, 0], Complex64::new(0.0, 0.5)).unwrap();
    v.set_mode(1, [-16, 0, 0], Complex64::new(0.0, -0.5))
        .unwrap();
    let t = bony_decompose(&lp, &u, &v, 4).unwrap();
    assert!(t.high_low.is_zero() || t.high_low.l2_norm() < 1e-14);
    assert!(t.high_high.is_zero() || t.high_high.l2_norm() < 1e-14);
    assert!(t.low_high.l2_norm() > 1.0);
    let direct = lp.shell_project(&dot_grad(&u, &v).unwrap(), 4).unwrap();
    assert!(rel(&t.low_high, &direct) < 1e-12);
}
