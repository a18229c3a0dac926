//! FFT plumbing: zero-padded linear convolution on centered grids.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Convolution with a fixed kernel of arrays living on the same centered
/// grid of odd length `n = 2·half + 1`; results are cropped back to the grid.
pub struct LinearConv {
    n: usize,
    size: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    kernel_hat: Vec<Complex64>,
}

impl LinearConv {
    pub fn new(kernel: &[f64]) -> Self {
        let n = kernel.len();
        let size = (2 * n - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(size);
        let inv = planner.plan_fft_inverse(size);
        let mut kernel_hat = pad(kernel, size);
        fwd.process(&mut kernel_hat);
        LinearConv {
            n,
            size,
            fwd,
            inv,
            kernel_hat,
        }
    }

    /// Returns the cropped convolution (cell masses convolve to cell masses)
    /// and the total of what fell outside the grid.
    pub fn apply(&self, a: &[f64]) -> (Vec<f64>, f64) {
        assert_eq!(a.len(), self.n, "convolution operand has the wrong length");
        let mut buf = pad(a, self.size);
        self.fwd.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.inv.process(&mut buf);
        let scale = 1.0 / self.size as f64;
        let half = (self.n - 1) / 2;
        let full = 2 * self.n - 1;
        let mut out = Vec::with_capacity(self.n);
        let mut leaked = 0.0;
        for (i, z) in buf.iter().take(full).enumerate() {
            let v = z.re * scale;
            if i >= half && i < half + self.n {
                out.push(v);
            } else {
                leaked += v;
            }
        }
        (out, leaked)
    }
}

fn pad(a: &[f64], size: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); size];
    for (z, &x) in v.iter_mut().zip(a) {
        z.re = x;
    }
    v
}

/// `p(x_j) = (1/2π) ∫ e^{-iξx_j} φ(ξ) dξ` on `x_j = (j - size/2)·dx` for a
/// real even `φ`, by one FFT of length `size` (a power of two).
pub fn invert_even(phi: impl Fn(f64) -> f64 + Sync, dx: f64, size: usize) -> Vec<f64> {
    let dxi = 2.0 * std::f64::consts::PI / (size as f64 * dx);
    let samples = crate::par::map_range(size / 2 + 1, |k| phi(k as f64 * dxi));
    invert_even_samples(&samples, dx, size)
}

/// [`invert_even`] from samples `φ(k·dξ)`, `k = 0..=size/2`,
/// `dξ = 2π/(size·dx)`.
pub fn invert_even_samples(samples: &[f64], dx: f64, size: usize) -> Vec<f64> {
    assert_eq!(samples.len(), size / 2 + 1, "need size/2 + 1 samples");
    let dxi = 2.0 * std::f64::consts::PI / (size as f64 * dx);
    let half = size / 2;
    let mut buf: Vec<Complex64> = (0..size)
        .map(|k| {
            let kk = if k <= half { k } else { size - k };
            // shift so that x = 0 lands on index size/2
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(sign * samples[kk], 0.0)
        })
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(size).process(&mut buf);
    let scale = dxi / (2.0 * std::f64::consts::PI);
    buf.iter().map(|z| z.re * scale).collect()
}
