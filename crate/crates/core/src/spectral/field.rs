use std::ops::{Add, AddAssign, Mul, Sub, SubAssign};

use num_complex::Complex64;

use super::fft::Fft3;
use super::grid::Grid;
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative tolerance of the solenoidal flag: `max |k.c(k)| <= tol * max |c(k)|`.
pub const SOLENOIDAL_TOL: f64 = 1e-12;

/// A real periodic field stored as full-cube Fourier coefficients.
///
/// Vector fields have 3 components, scalars 1 and gradient tensors 9
/// (component `3 * i + j` holds `d_j f_i`). Coefficients follow
/// `c(k) = n^-3 sum_x f(x) e^{-ik.x}` and are Hermitian: `c(-k) = conj c(k)`.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Grid,
    comps: Vec<Vec<Complex64>>,
    solenoidal: bool,
}

/// Collocation samples of a field, possibly on an oversampled grid.
#[derive(Clone, Debug)]
pub struct PhysicalSamples {
    n: usize,
    comps: Vec<Vec<f64>>,
}

impl PhysicalSamples {
    pub fn new(n: usize, comps: Vec<Vec<f64>>) -> Result<Self> {
        let len = n * n * n;
        if comps.iter().any(|c| c.len() != len) {
            return Err(Error::dim(format!("sample arrays must hold {len} points")));
        }
        Ok(PhysicalSamples { n, comps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, c: usize) -> &[f64] {
        &self.comps[c]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.comps[c]
    }

    pub fn into_comps(self) -> Vec<Vec<f64>> {
        self.comps
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Euclidean magnitude over components at one point.
    pub fn magnitude(&self, idx: usize) -> f64 {
        self.comps
            .iter()
            .map(|c| c[idx] * c[idx])
            .sum::<f64>()
            .sqrt()
    }

    /// Collocation approximation of the `L^p` norm of the pointwise magnitude.
    ///
    /// `p = f64::INFINITY` gives the maximum over sample points, which
    /// approximates the true supremum from below.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::param(format!("norm exponent must be >= 1, got {p}")));
        }
        let len = self.len();
        if p.is_infinite() {
            return Ok((0..len).map(|i| self.magnitude(i)).fold(0.0, f64::max));
        }
        let cell = (2.0 * std::f64::consts::PI).powi(3) / len as f64;
        let sum: f64 = if p == 2.0 {
            (0..len)
                .map(|i| self.comps.iter().map(|c| c[i] * c[i]).sum::<f64>())
                .sum()
        } else {
            (0..len).map(|i| self.magnitude(i).powf(p)).sum()
        };
        Ok((cell * sum).powf(1.0 / p))
    }

    /// `integral of sum_c self_c * other_c` by collocation.
    pub fn dot_integral(&self, other: &PhysicalSamples) -> Result<f64> {
        if self.n != other.n || self.ncomp() != other.ncomp() {
            return Err(Error::dim("sample shapes differ"));
        }
        let cell = (2.0 * std::f64::consts::PI).powi(3) / self.len() as f64;
        let mut sum = 0.0;
        for (a, b) in self.comps.iter().zip(&other.comps) {
            sum += a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        }
        Ok(cell * sum)
    }
}

impl SpectralField {
    pub fn zeros(grid: &Grid, ncomp: usize) -> Self {
        SpectralField {
            grid: grid.clone(),
            comps: vec![vec![Complex64::default(); grid.len()]; ncomp],
            solenoidal: ncomp == 3,
        }
    }

    pub fn zero_vector(grid: &Grid) -> Self {
        Self::zeros(grid, 3)
    }

    pub fn from_components(grid: &Grid, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        if comps.is_empty() || comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::dim(format!(
                "each component must hold {} coefficients",
                grid.len()
            )));
        }
        let mut f = SpectralField {
            grid: grid.clone(),
            comps,
            solenoidal: false,
        };
        f.refresh_solenoidal();
        Ok(f)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    /// Mutable access drops the solenoidal flag; call
    /// [`SpectralField::refresh_solenoidal`] afterwards if needed.
    pub fn comp_mut(&mut self, c: usize) -> &mut [Complex64] {
        self.solenoidal = false;
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    pub fn is_solenoidal(&self) -> bool {
        self.solenoidal
    }

    /// Recompute the solenoidal flag from the coefficients.
    pub fn refresh_solenoidal(&mut self) -> bool {
        self.solenoidal = self.ncomp() == 3 && self.divergence_defect() <= SOLENOIDAL_TOL;
        self.solenoidal
    }

    /// Precondition check used by operations that need a divergence-free input.
    pub fn require_solenoidal(&self, what: &str) -> Result<()> {
        if self.solenoidal || (self.ncomp() == 3 && self.divergence_defect() <= SOLENOIDAL_TOL) {
            Ok(())
        } else {
            Err(Error::pre(format!("{what} must be divergence-free")))
        }
    }

    pub(crate) fn assume_solenoidal(mut self) -> Self {
        self.solenoidal = self.ncomp() == 3;
        self
    }

    /// Set the coefficient of mode `k` and its Hermitian partner.
    pub fn set_mode(&mut self, c: usize, k: [i64; 3], value: Complex64) -> Result<()> {
        let idx = self
            .grid
            .index_of(k)
            .ok_or_else(|| Error::param(format!("wavevector {k:?} is not on the grid")))?;
        let conj = self.grid.conj_index(idx);
        self.solenoidal = false;
        if conj == idx {
            self.comps[c][idx] = Complex64::new(value.re, 0.0);
        } else {
            self.comps[c][idx] = value;
            self.comps[c][conj] = value.conj();
        }
        Ok(())
    }

    pub fn mode(&self, c: usize, k: [i64; 3]) -> Option<Complex64> {
        self.grid.index_of(k).map(|idx| self.comps[c][idx])
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `max_k |k.c(k)| / max_k |c(k)|` (0 for the zero field), with the same
    /// oddball convention as the derivative operators.
    pub fn divergence_defect(&self) -> f64 {
        if self.ncomp() != 3 {
            return f64::INFINITY;
        }
        let scale = self.max_abs_coeff();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for idx in 0..self.grid.len() {
            let k = self.grid.deriv_wavevector(idx);
            let d =
                self.comps[0][idx] * k[0] + self.comps[1][idx] * k[1] + self.comps[2][idx] * k[2];
            worst = worst.max(d.norm());
        }
        worst / scale
    }

    /// `max_k |c(-k) - conj c(k)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.comps {
            for (idx, z) in c.iter().enumerate() {
                let partner = c[self.grid.conj_index(idx)];
                worst = worst.max((partner - z.conj()).norm());
            }
        }
        worst
    }

    pub fn is_zero(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|z| z.re == 0.0 && z.im == 0.0))
    }

    // ---- transforms ---------------------------------------------------

    pub fn to_physical(&self) -> PhysicalSamples {
        let n = self.grid.n();
        let comps = transform_to_physical(self.grid.fft(), &self.comps, |buf, c| {
            buf.copy_from_slice(c);
        });
        PhysicalSamples { n, comps }
    }

    /// Samples on a grid refined by `factor` via zero-padding.
    pub fn to_physical_oversampled(&self, factor: usize) -> Result<PhysicalSamples> {
        if factor == 0 {
            return Err(Error::param("oversampling factor must be >= 1"));
        }
        if factor == 1 {
            return Ok(self.to_physical());
        }
        let n = self.grid.n();
        let m = n * factor;
        let fft = Fft3::new(m);
        let half = (n / 2) as i64;
        let grid = &self.grid;
        let comps = transform_to_physical(&fft, &self.comps, |buf, c| {
            buf.fill(Complex64::default());
            for (idx, z) in c.iter().enumerate() {
                if z.re == 0.0 && z.im == 0.0 {
                    continue;
                }
                let k = grid.wavevector(idx);
                let nyq: Vec<usize> = (0..3).filter(|&a| k[a] == -half).collect();
                let weight = 1.0 / (1u32 << nyq.len()) as f64;
                for mask in 0..(1usize << nyq.len()) {
                    let mut kk = k;
                    for (bit, &a) in nyq.iter().enumerate() {
                        if mask & (1 << bit) != 0 {
                            kk[a] = half;
                        }
                    }
                    let target = padded_index(kk, m);
                    buf[target] += z * weight;
                }
            }
        });
        Ok(PhysicalSamples { n: m, comps })
    }

    pub fn from_physical(grid: &Grid, samples: &PhysicalSamples) -> Result<Self> {
        if samples.n != grid.n() {
            return Err(Error::dim(format!(
                "samples on n={} cannot live on grid n={}",
                samples.n,
                grid.n()
            )));
        }
        let len = grid.len();
        let scale = 1.0 / len as f64;
        let fft = grid.fft();
        let mut comps = Vec::with_capacity(samples.ncomp());
        let mut buf = vec![Complex64::default(); len];
        let mut c = 0;
        while c < samples.ncomp() {
            let a = &samples.comps[c];
            if c + 1 < samples.ncomp() {
                let b = &samples.comps[c + 1];
                for i in 0..len {
                    buf[i] = Complex64::new(a[i], b[i]);
                }
                fft.forward(&mut buf);
                let mut ca = vec![Complex64::default(); len];
                let mut cb = vec![Complex64::default(); len];
                for idx in 0..len {
                    let f = buf[idx];
                    let g = buf[grid.conj_index(idx)].conj();
                    ca[idx] = (f + g) * (0.5 * scale);
                    cb[idx] = (f - g) * (-0.5 * scale) * I;
                }
                comps.push(ca);
                comps.push(cb);
                c += 2;
            } else {
                for i in 0..len {
                    buf[i] = Complex64::new(a[i], 0.0);
                }
                fft.forward(&mut buf);
                let mut ca = vec![Complex64::default(); len];
                for idx in 0..len {
                    let f = buf[idx];
                    let g = buf[grid.conj_index(idx)].conj();
                    ca[idx] = (f + g) * (0.5 * scale);
                }
                comps.push(ca);
                c += 1;
            }
        }
        Ok(SpectralField {
            grid: grid.clone(),
            comps,
            solenoidal: false,
        })
    }

    // ---- calculus ------------------------------------------------------

    fn require_vector(&self, what: &str) -> Result<()> {
        if self.ncomp() != 3 {
            return Err(Error::dim(format!(
                "{what} needs a 3-component field, got {}",
                self.ncomp()
            )));
        }
        Ok(())
    }

    /// `d/dx_axis` of every component.
    pub fn derivative(&self, axis: usize) -> Result<SpectralField> {
        if axis > 2 {
            return Err(Error::param(format!("axis {axis} out of range")));
        }
        let grid = &self.grid;
        let comps = self
            .comps
            .iter()
            .map(|c| {
                c.iter()
                    .enumerate()
                    .map(|(idx, z)| z * I * grid.deriv_wavevector(idx)[axis])
                    .collect()
            })
            .collect();
        Ok(SpectralField {
            grid: grid.clone(),
            comps,
            solenoidal: false,
        })
    }

    pub fn curl(&self) -> Result<SpectralField> {
        self.require_vector("curl")?;
        let grid = &self.grid;
        let len = grid.len();
        let mut out = vec![vec![Complex64::default(); len]; 3];
        for idx in 0..len {
            let k = grid.deriv_wavevector(idx);
            let (x, y, z) = (self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]);
            out[0][idx] = I * (y * -k[2] + z * k[1]);
            out[1][idx] = I * (z * -k[0] + x * k[2]);
            out[2][idx] = I * (x * -k[1] + y * k[0]);
        }
        Ok(SpectralField {
            grid: grid.clone(),
            comps: out,
            solenoidal: true,
        })
    }

    pub fn divergence(&self) -> Result<SpectralField> {
        self.require_vector("divergence")?;
        let grid = &self.grid;
        let comp = (0..grid.len())
            .map(|idx| {
                let k = grid.deriv_wavevector(idx);
                I * (self.comps[0][idx] * k[0]
                    + self.comps[1][idx] * k[1]
                    + self.comps[2][idx] * k[2])
            })
            .collect();
        Ok(SpectralField {
            grid: grid.clone(),
            comps: vec![comp],
            solenoidal: false,
        })
    }

    /// Gradient of a scalar field.
    pub fn gradient(&self) -> Result<SpectralField> {
        if self.ncomp() != 1 {
            return Err(Error::dim("gradient needs a scalar field"));
        }
        let grid = &self.grid;
        let comps = (0..3)
            .map(|a| {
                self.comps[0]
                    .iter()
                    .enumerate()
                    .map(|(idx, z)| z * I * grid.deriv_wavevector(idx)[a])
                    .collect()
            })
            .collect();
        Ok(SpectralField {
            grid: grid.clone(),
            comps,
            solenoidal: false,
        })
    }

    /// Full gradient tensor of a vector field, component `3 * i + j = d_j f_i`.
    pub fn gradient_tensor(&self) -> Result<SpectralField> {
        self.require_vector("gradient tensor")?;
        let grid = &self.grid;
        let mut comps = Vec::with_capacity(9);
        for c in &self.comps {
            for a in 0..3 {
                comps.push(
                    c.iter()
                        .enumerate()
                        .map(|(idx, z)| z * I * grid.deriv_wavevector(idx)[a])
                        .collect(),
                );
            }
        }
        Ok(SpectralField {
            grid: grid.clone(),
            comps,
            solenoidal: false,
        })
    }

    /// Leray projection onto divergence-free fields; the mean is untouched.
    /// Uses the derivative wavevector so the output is exactly discrete
    /// divergence-free.
    pub fn leray_project(&self) -> Result<SpectralField> {
        self.require_vector("Leray projection")?;
        let grid = &self.grid;
        let mut out = self.comps.clone();
        for idx in 0..grid.len() {
            let kf = grid.deriv_wavevector(idx);
            let k2 = kf[0] * kf[0] + kf[1] * kf[1] + kf[2] * kf[2];
            if k2 == 0.0 {
                continue;
            }
            let dot = out[0][idx] * kf[0] + out[1][idx] * kf[1] + out[2][idx] * kf[2];
            let s = dot / k2;
            for a in 0..3 {
                out[a][idx] -= s * kf[a];
            }
        }
        Ok(SpectralField {
            grid: grid.clone(),
            comps: out,
            solenoidal: true,
        })
    }

    /// Solenoidal vector potential `A` with `curl A = self` and zero mean.
    pub fn vector_potential(&self) -> Result<SpectralField> {
        self.require_vector("vector potential")?;
        let grid = &self.grid;
        let mut out = vec![vec![Complex64::default(); grid.len()]; 3];
        for idx in 0..grid.len() {
            let k = grid.deriv_wavevector(idx);
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                continue;
            }
            // A = i k x b / |k|^2
            let (x, y, z) = (self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]);
            out[0][idx] = I * (z * k[1] - y * k[2]) / k2;
            out[1][idx] = I * (x * k[2] - z * k[0]) / k2;
            out[2][idx] = I * (y * k[0] - x * k[1]) / k2;
        }
        Ok(SpectralField {
            grid: grid.clone(),
            comps: out,
            solenoidal: true,
        })
    }

    // ---- multipliers and truncation -------------------------------------

    /// Pointwise real Fourier multiplier, the same for every component.
    pub fn apply_multiplier(&self, m: &[f64]) -> SpectralField {
        assert_eq!(m.len(), self.grid.len(), "multiplier length");
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().zip(m).map(|(z, w)| z * *w).collect())
            .collect();
        SpectralField {
            grid: self.grid.clone(),
            comps,
            solenoidal: self.solenoidal,
        }
    }

    /// Zero every mode beyond the dealiasing radius.
    pub fn dealias(&mut self) {
        let mask = self.grid.retained_mask();
        for c in &mut self.comps {
            for (z, keep) in c.iter_mut().zip(mask) {
                if !keep {
                    *z = Complex64::default();
                }
            }
        }
    }

    pub fn dealiased(mut self) -> Self {
        self.dealias();
        self
    }

    /// True when no coefficient lives beyond the dealiasing radius.
    pub fn is_band_limited(&self) -> bool {
        let mask = self.grid.retained_mask();
        self.comps
            .iter()
            .all(|c| c.iter().zip(mask).all(|(z, keep)| *keep || z.norm() == 0.0))
    }

    // ---- norms and pairings --------------------------------------------

    /// Collocation `L^p` norm of the pointwise Euclidean magnitude.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::param(format!("norm exponent must be >= 1, got {p}")));
        }
        if p == 2.0 {
            return Ok(self.l2_norm());
        }
        self.to_physical().lp_norm(p)
    }

    pub fn lp_norm_oversampled(&self, p: f64, factor: usize) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::param(format!("norm exponent must be >= 1, got {p}")));
        }
        self.to_physical_oversampled(factor)?.lp_norm(p)
    }

    /// `sup` over collocation points of the pointwise magnitude.
    pub fn sup_norm(&self) -> f64 {
        self.to_physical()
            .lp_norm(f64::INFINITY)
            .expect("infinite exponent is valid")
    }

    /// `L^2` norm by Parseval, `sqrt((2 pi)^3 sum_k |c(k)|^2)`.
    pub fn l2_norm(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    /// `integral of f . g` by Parseval.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        assert_eq!(self.ncomp(), other.ncomp(), "component count");
        let mut sum = 0.0;
        for (a, b) in self.comps.iter().zip(&other.comps) {
            for (x, y) in a.iter().zip(b) {
                sum += x.re * y.re + x.im * y.im;
            }
        }
        sum * self.grid.volume()
    }

    /// `integral of f . g` weighted by a Fourier multiplier on `f`.
    pub fn inner_weighted(&self, weight: &[f64], other: &SpectralField) -> f64 {
        assert_eq!(self.ncomp(), other.ncomp(), "component count");
        let mut sum = 0.0;
        for (a, b) in self.comps.iter().zip(&other.comps) {
            for ((x, y), w) in a.iter().zip(b).zip(weight) {
                if *w != 0.0 {
                    sum += w * (x.re * y.re + x.im * y.im);
                }
            }
        }
        sum * self.grid.volume()
    }

    /// `||f||^2` of the homogeneous Sobolev seminorm, `(2 pi)^3 sum |k|^{2s} |c(k)|^2`.
    pub fn sobolev_sq(&self, s: f64) -> f64 {
        let grid = &self.grid;
        let mut sum = 0.0;
        for c in &self.comps {
            for (idx, z) in c.iter().enumerate() {
                let k = grid.kmag(idx);
                if k > 0.0 {
                    sum += k.powf(2.0 * s) * z.norm_sqr();
                }
            }
        }
        sum * grid.volume()
    }

    /// `||grad f||_2^2`.
    pub fn enstrophy_like(&self) -> f64 {
        let grid = &self.grid;
        let mut sum = 0.0;
        for c in &self.comps {
            for (idx, z) in c.iter().enumerate() {
                let k = grid.deriv_wavevector(idx);
                sum += (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) * z.norm_sqr();
            }
        }
        sum * grid.volume()
    }

    // ---- linear algebra ------------------------------------------------

    pub fn scaled(&self, a: f64) -> SpectralField {
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().map(|z| z * a).collect())
            .collect();
        SpectralField {
            grid: self.grid.clone(),
            comps,
            solenoidal: self.solenoidal,
        }
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralField) {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        assert_eq!(self.ncomp(), other.ncomp(), "component count");
        for (x, y) in self.comps.iter_mut().zip(&other.comps) {
            for (p, q) in x.iter_mut().zip(y) {
                *p += q * a;
            }
        }
        self.solenoidal &= other.solenoidal;
    }

    /// Per-mode real factor per component-independent mode, e.g. an
    /// integrating factor `exp(-nu k^2 t)`.
    pub fn scale_modes(&mut self, factor: &[f64]) {
        for c in &mut self.comps {
            for (z, f) in c.iter_mut().zip(factor) {
                *z *= *f;
            }
        }
    }

    /// True when every coefficient is finite.
    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }
}

impl Add<&SpectralField> for &SpectralField {
    type Output = SpectralField;

    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub<&SpectralField> for &SpectralField {
    type Output = SpectralField;

    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&SpectralField> for SpectralField {
    fn sub_assign(&mut self, rhs: &SpectralField) {
        self.axpy(-1.0, rhs);
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;

    fn mul(self, rhs: f64) -> SpectralField {
        self.scaled(rhs)
    }
}

fn padded_index(k: [i64; 3], m: usize) -> usize {
    let mi = m as i64;
    k.iter()
        .fold(0usize, |acc, &c| acc * m + c.rem_euclid(mi) as usize)
}

/// Inverse-transform components two at a time by packing them as real and
/// imaginary parts of one complex array.
fn transform_to_physical<F>(fft: &Fft3, comps: &[Vec<Complex64>], fill: F) -> Vec<Vec<f64>>
where
    F: Fn(&mut [Complex64], &[Complex64]),
{
    let ncomp = comps.len();
    let mut out = Vec::with_capacity(ncomp);
    let mut c = 0;
    let n = fft.size();
    let mut buf = vec![Complex64::default(); n * n * n];
    let mut second = buf.clone();
    while c < ncomp {
        fill(&mut buf, &comps[c]);
        if c + 1 < ncomp {
            fill(&mut second, &comps[c + 1]);
            for (a, b) in buf.iter_mut().zip(&second) {
                *a += I * b;
            }
            fft.inverse(&mut buf);
            out.push(buf.iter().map(|z| z.re).collect());
            out.push(buf.iter().map(|z| z.im).collect());
            c += 2;
        } else {
            fft.inverse(&mut buf);
            out.push(buf.iter().map(|z| z.re).collect());
            c += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cos_x1(grid: &Grid) -> SpectralField {
        let mut f = SpectralField::zero_vector(grid);
        f.set_mode(0, [1, 0, 0], Complex64::new(0.5, 0.0)).unwrap();
        f
    }

    #[test]
    fn zero_field_roundtrip() {
        let g = Grid::new(8).unwrap();
        let f = SpectralField::zero_vector(&g);
        let p = f.to_physical();
        assert!(p.comp(0).iter().all(|&x| x == 0.0));
        let back = SpectralField::from_physical(&g, &p).unwrap();
        assert!(back.is_zero());
    }

    #[test]
    fn single_mode_is_cosine() {
        let g = Grid::new(8).unwrap();
        let p = cos_x1(&g).to_physical();
        for idx in 0..g.len() {
            let x = g.point(idx);
            assert!((p.comp(0)[idx] - x[0].cos()).abs() < 1e-14);
            assert!(p.comp(1)[idx].abs() < 1e-15);
        }
    }

    #[test]
    fn size_mismatch_is_dimension_error() {
        let g = Grid::new(8).unwrap();
        let p = PhysicalSamples::new(16, vec![vec![0.0; 16 * 16 * 16]]).unwrap();
        assert!(matches!(
            SpectralField::from_physical(&g, &p),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn cos_norms() {
        for n in [8, 16] {
            let g = Grid::new(n).unwrap();
            let f = cos_x1(&g);
            let l2 = f.to_physical().lp_norm(2.0).unwrap();
            assert!((l2 - ((2.0 * PI).powi(3) / 2.0).sqrt()).abs() < 1e-12);
            assert!((f.lp_norm(f64::INFINITY).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn lp_norm_rejects_small_exponent() {
        let g = Grid::new(8).unwrap();
        let f = SpectralField::zero_vector(&g);
        assert!(matches!(f.lp_norm(0.5), Err(Error::Parameter(_))));
        assert_eq!(f.lp_norm(3.0).unwrap(), 0.0);
        assert_eq!(f.lp_norm(f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn oversampling_preserves_values_with_nyquist() {
        let g = Grid::new(8).unwrap();
        let mut f = SpectralField::zeros(&g, 1);
        f.set_mode(0, [-4, 0, 0], Complex64::new(1.0, 0.0)).unwrap();
        f.set_mode(0, [1, 2, 0], Complex64::new(0.3, 0.2)).unwrap();
        let coarse = f.to_physical();
        let fine = f.to_physical_oversampled(2).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                for l in 0..8 {
                    let a = coarse.comp(0)[(i * 8 + j) * 8 + l];
                    let b = fine.comp(0)[((2 * i) * 16 + 2 * j) * 16 + 2 * l];
                    assert!((a - b).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn vector_potential_inverts_curl() {
        let g = Grid::new(8).unwrap();
        let mut b = SpectralField::zero_vector(&g);
        b.set_mode(0, [0, 1, 2], Complex64::new(0.3, -0.1)).unwrap();
        b.set_mode(2, [1, 1, 0], Complex64::new(0.2, 0.5)).unwrap();
        let b = b.leray_project().unwrap();
        let a = b.vector_potential().unwrap();
        let err = &a.curl().unwrap() - &b;
        assert!(err.max_abs_coeff() < 1e-15);
    }
}
