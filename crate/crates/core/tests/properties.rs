//! Randomized invariants.

use hallmhd::littlewood_paley::{ChiProfile, LpPartition};
use hallmhd::monitor::{
    criterion_f, dissipation_wavenumbers, flux_terms, Monitor, MonitorSettings,
};
use hallmhd::paraproduct::{bony_decompose, random_full};
use hallmhd::solver::{energy, rhs, Parameters, Solver, SolverState};
use hallmhd::spectral::codec::{decode, encode};
use hallmhd::spectral::random::{normalize_rms, rng_from_seed};
use hallmhd::spectral::{DealiasRule, Grid, SpectralField};
use proptest::prelude::*;

fn lp(n: usize) -> LpPartition {
    LpPartition::build(&Grid::new(n).unwrap(), ChiProfile::Bridge).unwrap()
}

fn pair(lp: &LpPartition, seed: u64, amp: f64) -> (SpectralField, SpectralField) {
    let mut rng = rng_from_seed(seed);
    let u = normalize_rms(&random_full(lp.grid(), &mut rng), amp);
    let b = normalize_rms(&random_full(lp.grid(), &mut rng), amp);
    (u, b)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn codec_roundtrip_is_bit_exact(seed in any::<u64>(), t in -1e3f64..1e3, nu in 0f64..1.0) {
        let lp = lp(8);
        let (u, b) = pair(&lp, seed, 1.0);
        let bytes = encode(t, nu, 2.0 * nu, &u, &b).unwrap();
        let ck = decode(&bytes, DealiasRule::TwoThirds).unwrap();
        prop_assert_eq!(ck.t.to_bits(), t.to_bits());
        prop_assert_eq!(ck.mu.to_bits(), (2.0 * nu).to_bits());
        prop_assert_eq!(ck.u.components(), u.components());
        prop_assert_eq!(ck.b.components(), b.components());
    }

    #[test]
    fn blocks_reconstruct_the_field(seed in any::<u64>()) {
        let lp = lp(16);
        let (u, _) = pair(&lp, seed, 1.0);
        let mut sum = SpectralField::zero_vector(lp.grid());
        for block in lp.decompose(&u) {
            sum += &block;
        }
        prop_assert!((&sum - &u).l2_norm() <= 1e-12 * u.l2_norm());
    }

    #[test]
    fn operators_keep_hermitian_symmetry(seed in any::<u64>()) {
        let lp = lp(8);
        let (u, b) = pair(&lp, seed, 0.5);
        let (du, db) = rhs(&u, &b, true).unwrap();
        for f in [u.curl().unwrap(), du, db, u.leray_project().unwrap()] {
            prop_assert!(f.hermitian_defect() <= 1e-14 * f.max_abs_coeff().max(1e-300));
        }
    }

    #[test]
    fn bony_pieces_sum_to_the_block(seed in any::<u64>(), q in -1i32..=2) {
        let lp = lp(16);
        let (u, v) = pair(&lp, seed, 1.0);
        let t = bony_decompose(&lp, &u, &v, q).unwrap();
        let prod = hallmhd::spectral::products::dot_grad(&u, &v).unwrap();
        let direct = lp.shell_project(&prod, q).unwrap();
        let err = (&t.total() - &direct).l2_norm();
        prop_assert!(err <= 1e-10 * direct.l2_norm().max(1e-3 * prod.l2_norm()));
    }

    #[test]
    fn flux_identities_hold(seed in any::<u64>(), s in 0.6f64..4.0, split in -1i32..=1) {
        let lp = lp(8);
        let (u, b) = pair(&lp, seed, 1.0);
        let f = flux_terms(&lp, &u, &b, s, split).unwrap();
        prop_assert!(f.residual_212_412() <= 1e-10);
        prop_assert!(f.residual_512() <= 1e-10);
        for d in f.completeness() {
            prop_assert!(d <= 1e-9);
        }
        prop_assert!(f.split_bounds_hold());
    }

    #[test]
    fn wavenumbers_respect_their_definition(seed in any::<u64>(), c0 in 0.01f64..10.0, m in 1e-3f64..1.0) {
        let lp = lp(16);
        let (u, b) = pair(&lp, seed, 1.0);
        let w = dissipation_wavenumbers(&lp, &u, &b, c0, m).unwrap();
        prop_assert!(w.lower_bound_u() && w.lower_bound_b());
        prop_assert!(w.q1 >= 0 && w.q1 <= lp.q_max() && w.lambda1 == (w.q1 as f64).exp2());
        let w2 = dissipation_wavenumbers(&lp, &u, &b, 2.0 * c0, m).unwrap();
        prop_assert!(w2.lambda1 <= w.lambda1 && w2.lambda2 <= w.lambda2);
        let c = criterion_f(&lp, &u, &b, w.q1, w.q2).unwrap();
        prop_assert_eq!(c.f, c.besov_u + c.besov_nabla_b);
    }

    #[test]
    fn besov_norm_is_homogeneous(seed in any::<u64>(), alpha in -5f64..5.0, s in -1f64..2.0) {
        let lp = lp(16);
        let (u, _) = pair(&lp, seed, 1.0);
        let a = lp.besov_norm(&u.scaled(alpha), s, f64::INFINITY).unwrap();
        let b = lp.besov_norm(&u, s, f64::INFINITY).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert!((a - alpha.abs() * b).abs() <= 1e-12 * b);
    }

    #[test]
    fn viscous_step_dissipates_energy(seed in any::<u64>(), nu in 0.01f64..0.2) {
        let lp = lp(8);
        let (u, b) = pair(&lp, seed, 0.3);
        let solver = Solver::new(lp.grid(), Parameters {
            nu, mu: nu, dt: 0.01, hall_on: true, c_adv: 1.0, c_whistler: 1.0,
        }).unwrap();
        let st = solver.step(&SolverState::new(0.0, u.clone(), b.clone())).unwrap();
        let e0 = energy(&u) + energy(&b);
        let e1 = energy(&st.u) + energy(&st.b);
        prop_assert!(e1 < e0);
        prop_assert!(((e0 - e1) - st.dissipated).abs() <= 1e-6 * st.dissipated);
    }

    #[test]
    fn int_f_never_decreases(seeds in proptest::collection::vec(any::<u64>(), 3..6)) {
        let lp = lp(8);
        let mut mon = Monitor::new(lp.clone(), MonitorSettings {
            c0: 1.0, m: 0.05, s: 3.0, beta: 4.0, c_b: 0.1, fluxes: false,
        }).unwrap();
        let mut last = 0.0;
        for (i, seed) in seeds.iter().enumerate() {
            let (u, b) = pair(&lp, *seed, 1.0);
            let r = mon.record(i as u64, 0.1 * i as f64, &u, &b).unwrap();
            prop_assert!(r.int_f >= last);
            last = r.int_f;
        }
    }
}
