//! Whistler branch: closed form, linearized eigen-oracle and the solver's
//! measured oscillation frequency.

use hallmhd::solver::initial::{whistler_eigenvalue, whistler_state};
use hallmhd::solver::{Parameters, Solver, SolverState};
use hallmhd::spectral::Grid;
use nalgebra::{Complex, DMatrix};

/// Ideal Hall-MHD linearized about `b0 z` for transverse modes at
/// `k = (0, 0, k)`: unknowns `(u_x, u_y, b_x, b_y)` as complex amplitudes,
/// returned in the real `8 x 8` form `[[Re, -Im], [Im, Re]]`.
fn linearized(k: f64, b0: f64) -> DMatrix<f64> {
    let i = Complex::new(0.0, 1.0);
    let ikb = i * k * b0;
    let z = Complex::new(0.0, 0.0);
    let h = Complex::new(k * k * b0, 0.0);
    // du = i k b0 b; db = i k b0 u - b0 d_z curl b = i k b0 u + k^2 b0 (b_y, -b_x)
    let m = [
        [z, z, ikb, z],
        [z, z, z, ikb],
        [ikb, z, z, h],
        [z, ikb, -h, z],
    ];
    let mut r = DMatrix::zeros(8, 8);
    for a in 0..4 {
        for b in 0..4 {
            r[(a, b)] = m[a][b].re;
            r[(a, b + 4)] = -m[a][b].im;
            r[(a + 4, b)] = m[a][b].im;
            r[(a + 4, b + 4)] = m[a][b].re;
        }
    }
    r
}

fn fastest_frequency(k: f64, b0: f64) -> f64 {
    linearized(k, b0)
        .complex_eigenvalues()
        .iter()
        .map(|z| z.im.abs())
        .fold(0.0, f64::max)
}

#[test]
fn closed_form_matches_eigen_oracle() {
    for (k, b0) in [(1.0, 1.0), (2.0, 1.0), (3.0, 0.5)] {
        let oracle = fastest_frequency(k, b0);
        for sigma in [1.0, -1.0] {
            let lam = whistler_eigenvalue(k, b0, sigma);
            assert!(lam.re.abs() < 1e-12);
            assert!(
                (lam.im.abs() - oracle).abs() < 1e-10 * oracle,
                "k={k}: {} vs {oracle}",
                lam.im
            );
        }
    }
    // k = 2, b0 = 1: omega = 2 + 2 sqrt 2
    assert!((fastest_frequency(2.0, 1.0) - (2.0 + 8f64.sqrt())).abs() < 1e-10);
}

#[test]
fn simulated_frequency_matches() {
    let (k, b0, eps, sigma) = (2, 1.0, 1e-3, 1.0);
    let g = Grid::new(32).unwrap();
    let (u, b) = whistler_state(&g, b0, k, eps, sigma).unwrap();
    let solver = Solver::new(
        &g,
        Parameters {
            nu: 0.0,
            mu: 0.0,
            dt: 0.004,
            hall_on: true,
            c_adv: 1.0,
            c_whistler: 1.0,
        },
    )
    .unwrap();
    let mut st = SolverState::new(0.0, u, b);
    let mode = |s: &SolverState| s.b.mode(0, [0, 0, k]).unwrap();
    let (t0, z0) = (st.t, mode(&st));
    let mut phase = 0.0;
    let mut prev = z0;
    for _ in 0..250 {
        st = solver.step(&st).unwrap();
        let z = mode(&st);
        phase += (z / prev).arg();
        prev = z;
    }
    let measured = phase / (st.t - t0);
    let expected = whistler_eigenvalue(k as f64, b0, sigma).im;
    let oracle = fastest_frequency(k as f64, b0);
    assert!(
        (measured - expected).abs() < 0.01 * expected.abs(),
        "{measured} vs {expected}"
    );
    assert!((measured.abs() - oracle).abs() < 0.01 * oracle);
    // amplitude neither grows nor decays in the ideal limit
    assert!(((prev.norm() / z0.norm()) - 1.0).abs() < 1e-6);
}
