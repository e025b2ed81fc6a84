//! Centered DFT on the symmetric grid.
//!
//! With `y_j = -L + j*dy` and `xi_k = -xi_max + k*dxi`,
//! `exp(-i xi_k y_j) = (-1)^(j+k) exp(-2 pi i jk/n)` whenever `n/2` is even,
//! which holds for every admissible `n >= 32`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct CenteredDft {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl CenteredDft {
    pub fn new(n: usize) -> Self {
        debug_assert!(n % 4 == 0);
        let mut p = FftPlanner::new();
        CenteredDft { n, fwd: p.plan_fft_forward(n), inv: p.plan_fft_inverse(n) }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn alternate(buf: &mut [Complex64]) {
        for v in buf.iter_mut().skip(1).step_by(2) {
            *v = -*v;
        }
    }

    /// `F_k = sum_j f_j exp(-i xi_k y_j)`, in place.
    pub fn forward(&self, buf: &mut [Complex64]) {
        Self::alternate(buf);
        self.fwd.process(buf);
        Self::alternate(buf);
    }

    /// `f_j = sum_k F_k exp(+i xi_k y_j)` (no 1/n), in place.
    pub fn backward(&self, buf: &mut [Complex64]) {
        Self::alternate(buf);
        self.inv.process(buf);
        Self::alternate(buf);
    }

    /// Forward transform along both axes of a row-major `n x n` array.
    pub fn forward_2d(&self, buf: &mut [Complex64]) {
        self.apply_2d(buf, true);
    }

    pub fn backward_2d(&self, buf: &mut [Complex64]) {
        self.apply_2d(buf, false);
    }

    fn apply_2d(&self, buf: &mut [Complex64], fwd: bool) {
        let n = self.n;
        let run = |row: &mut [Complex64]| if fwd { self.forward(row) } else { self.backward(row) };
        for row in buf.chunks_mut(n) {
            run(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..n {
            for r in 0..n {
                col[r] = buf[r * n + c];
            }
            run(&mut col);
            for r in 0..n {
                buf[r * n + c] = col[r];
            }
        }
    }
}
