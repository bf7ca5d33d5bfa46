use std::sync::{Arc, LazyLock, Mutex};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

static PLANNER: LazyLock<Mutex<FftPlanner<f64>>> = LazyLock::new(|| Mutex::new(FftPlanner::new()));

/// Unnormalized separable 3D complex FFT on an `n^3` cube stored x-major.
pub(crate) struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = PLANNER.lock().expect("fft planner poisoned");
        Fft3 {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub(crate) fn size(&self) -> usize {
        self.n
    }

    /// `sum_x data(x) e^{-ik.x}` in place.
    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.run(&*self.forward, data);
    }

    /// `sum_k data(k) e^{+ik.x}` in place.
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.run(&*self.inverse, data);
    }

    fn run(&self, plan: &dyn Fft<f64>, data: &mut [Complex64]) {
        let n = self.n;
        debug_assert_eq!(data.len(), n * n * n);
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        // z lines are contiguous
        plan.process_with_scratch(data, &mut scratch);

        let mut buf = vec![Complex64::default(); data.len()];
        // y lines
        for i in 0..n {
            for j in 0..n {
                let src = (i * n + j) * n;
                for l in 0..n {
                    buf[(i * n + l) * n + j] = data[src + l];
                }
            }
        }
        plan.process_with_scratch(&mut buf, &mut scratch);
        for i in 0..n {
            for l in 0..n {
                let src = (i * n + l) * n;
                for j in 0..n {
                    data[(i * n + j) * n + l] = buf[src + j];
                }
            }
        }
        // x lines
        for i in 0..n {
            for j in 0..n {
                let src = (i * n + j) * n;
                for l in 0..n {
                    buf[(j * n + l) * n + i] = data[src + l];
                }
            }
        }
        plan.process_with_scratch(&mut buf, &mut scratch);
        for j in 0..n {
            for l in 0..n {
                let src = (j * n + l) * n;
                for i in 0..n {
                    data[(i * n + j) * n + l] = buf[src + i];
                }
            }
        }
    }
}
