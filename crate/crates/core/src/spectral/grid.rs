use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::fft::Fft3;
use crate::error::{Error, Result};

/// Rule used to pick the spectral truncation radius of quadratic products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DealiasRule {
    /// Keep `|k| <= (n-1)/3`: quadratic products are exact on retained modes.
    #[default]
    TwoThirds,
    /// Keep `|k| <= (n-1)/4`: cubic products are exact on retained modes.
    Half,
}

impl DealiasRule {
    pub fn cutoff(self, n: usize) -> usize {
        match self {
            DealiasRule::TwoThirds => (n - 1) / 3,
            DealiasRule::Half => (n - 1) / 4,
        }
    }
}

/// Uniform `n^3` collocation grid on the `(2 pi)^3` torus together with the
/// Fourier index bookkeeping shared by every field living on it.
///
/// Storage order is `idx = (i * n + j) * n + l` where `i`, `j`, `l` are the
/// FFT indices along x, y, z. Signed wavenumbers are in `[-n/2, n/2)`.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    n: usize,
    dealias_cut: usize,
    /// integer wavevectors, `-n/2 ..= n/2 - 1` per axis
    wavevector: Vec<[i64; 3]>,
    /// derivative wavenumbers with the n/2 (oddball) axis mode zeroed
    deriv: Vec<[f64; 3]>,
    kmag: Vec<f64>,
    conj: Vec<usize>,
    retained: Vec<bool>,
    fft: Fft3,
}

impl Grid {
    /// Grid with the default two-thirds truncation.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_rule(n, DealiasRule::TwoThirds)
    }

    pub fn with_rule(n: usize, rule: DealiasRule) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::param(format!(
                "grid size must be even and >= 8, got {n}"
            )));
        }
        Self::with_cut(n, rule.cutoff(n))
    }

    pub fn with_cut(n: usize, dealias_cut: usize) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::param(format!(
                "grid size must be even and >= 8, got {n}"
            )));
        }
        if dealias_cut > n / 2 {
            return Err(Error::param(format!(
                "dealias cutoff {dealias_cut} exceeds n/2 = {}",
                n / 2
            )));
        }
        Ok(Self::build(n, dealias_cut))
    }

    fn build(n: usize, dealias_cut: usize) -> Self {
        let len = n * n * n;
        let half = (n / 2) as i64;
        let signed = |i: usize| -> i64 {
            let k = i as i64;
            if k >= half {
                k - n as i64
            } else {
                k
            }
        };
        let deriv_k = |k: i64| -> f64 {
            if k == -half {
                0.0
            } else {
                k as f64
            }
        };
        let mut wavevector = Vec::with_capacity(len);
        let mut deriv = Vec::with_capacity(len);
        let mut kmag = Vec::with_capacity(len);
        let mut conj = Vec::with_capacity(len);
        let mut retained = Vec::with_capacity(len);
        let cut2 = (dealias_cut * dealias_cut) as i64;
        let neg = |i: usize| (n - i) % n;
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let k = [signed(i), signed(j), signed(l)];
                    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                    wavevector.push(k);
                    deriv.push([deriv_k(k[0]), deriv_k(k[1]), deriv_k(k[2])]);
                    kmag.push((k2 as f64).sqrt());
                    conj.push((neg(i) * n + neg(j)) * n + neg(l));
                    retained.push(k2 <= cut2);
                }
            }
        }
        Grid {
            inner: Arc::new(GridInner {
                n,
                dealias_cut,
                wavevector,
                deriv,
                kmag,
                conj,
                retained,
                fft: Fft3::new(n),
            }),
        }
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn len(&self) -> usize {
        self.inner.wavevector.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dealias_cut(&self) -> usize {
        self.inner.dealias_cut
    }

    /// Largest resolved wavenumber magnitude, `sqrt(3) n / 2`.
    pub fn k_max(&self) -> f64 {
        3f64.sqrt() * self.inner.n as f64 / 2.0
    }

    /// Side length of the periodic box.
    pub fn domain(&self) -> f64 {
        2.0 * PI
    }

    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(3)
    }

    /// Quadrature weight of one collocation point.
    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    pub fn wavevector(&self, idx: usize) -> [i64; 3] {
        self.inner.wavevector[idx]
    }

    pub fn wavevectors(&self) -> &[[i64; 3]] {
        &self.inner.wavevector
    }

    /// Wavevector used by spectral derivatives (n/2 axis modes zeroed).
    pub fn deriv_wavevector(&self, idx: usize) -> [f64; 3] {
        self.inner.deriv[idx]
    }

    pub fn kmag(&self, idx: usize) -> f64 {
        self.inner.kmag[idx]
    }

    pub fn kmags(&self) -> &[f64] {
        &self.inner.kmag
    }

    /// Storage index of `-k`.
    pub fn conj_index(&self, idx: usize) -> usize {
        self.inner.conj[idx]
    }

    /// True when the mode survives the dealiasing truncation.
    pub fn is_retained(&self, idx: usize) -> bool {
        self.inner.retained[idx]
    }

    pub(crate) fn retained_mask(&self) -> &[bool] {
        &self.inner.retained
    }

    /// Storage index of an integer wavevector, if it lies on the grid.
    pub fn index_of(&self, k: [i64; 3]) -> Option<usize> {
        let n = self.inner.n as i64;
        let half = n / 2;
        let mut idx = 0usize;
        for &c in &k {
            if c < -half || c >= half {
                return None;
            }
            idx = idx * self.inner.n + c.rem_euclid(n) as usize;
        }
        Some(idx)
    }

    /// Collocation point coordinates for a linear physical index.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let n = self.inner.n;
        let h = 2.0 * PI / n as f64;
        let l = idx % n;
        let j = (idx / n) % n;
        let i = idx / (n * n);
        [i as f64 * h, j as f64 * h, l as f64 * h]
    }

    pub(crate) fn fft(&self) -> &Fft3 {
        &self.inner.fft
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::dim(format!(
                "grid n={} cut={} vs n={} cut={}",
                self.n(),
                self.dealias_cut(),
                other.n(),
                other.dealias_cut()
            )))
        }
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n == other.inner.n && self.inner.dealias_cut == other.inner.dealias_cut)
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.inner.n)
            .field("dealias_cut", &self.inner.dealias_cut)
            .finish()
    }
}
