//! Type-I discrete sine and cosine transforms on the closed grid
//! `x_k = πk/N`, built on a complex FFT of length `2N`.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// FFT plan for one grid size. Cheap to clone, immutable once built.
#[derive(Clone)]
pub(crate) struct TrigPlan {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl TrigPlan {
    pub(crate) fn new(n: usize) -> Self {
        assert!(n >= 2, "grid needs at least two intervals");
        let fft = FftPlanner::new().plan_fft_forward(2 * n);
        Self { n, fft }
    }

    pub(crate) fn n(&self) -> usize {
        self.n
    }

    /// Sine sums `S_j = Σ_{k=1}^{N-1} f_k sin(πjk/N)`, `j = 1..N-1`.
    /// `interior` holds `f_1..f_{N-1}`.
    pub(crate) fn sine_sums(&self, interior: &[f64]) -> Vec<f64> {
        let n = self.n;
        debug_assert_eq!(interior.len(), n - 1);
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * n];
        for (k, &f) in interior.iter().enumerate() {
            buf[k + 1].re = f;
            buf[2 * n - k - 1].re = -f;
        }
        self.fft.process(&mut buf);
        buf[1..n].iter().map(|c| -0.5 * c.im).collect()
    }

    /// Cosine sums `C_j = f_0/2 + Σ_{k=1}^{N-1} f_k cos(πjk/N) + (-1)^j f_N/2`,
    /// `j = 0..N`. `closed` holds `f_0..f_N`.
    pub(crate) fn cosine_sums(&self, closed: &[f64]) -> Vec<f64> {
        let n = self.n;
        debug_assert_eq!(closed.len(), n + 1);
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * n];
        for (k, &f) in closed.iter().enumerate() {
            buf[k].re = f;
            if k > 0 && k < n {
                buf[2 * n - k].re = f;
            }
        }
        self.fft.process(&mut buf);
        buf[..=n].iter().map(|c| 0.5 * c.re).collect()
    }

    /// Sine coefficients `a_1..a_{N-1}` of the interior samples of an odd function.
    pub(crate) fn forward_sine(&self, interior: &[f64]) -> Vec<f64> {
        let scale = 2.0 / self.n as f64;
        self.sine_sums(interior).into_iter().map(|s| s * scale).collect()
    }

    /// Interior samples `f_1..f_{N-1}` of `Σ a_j sin(jx)`.
    pub(crate) fn inverse_sine(&self, coeffs: &[f64]) -> Vec<f64> {
        self.sine_sums(coeffs)
    }

    /// Cosine coefficients `b_0..b_N` of the closed-grid samples of an even function.
    pub(crate) fn forward_cosine(&self, closed: &[f64]) -> Vec<f64> {
        let n = self.n;
        let inv = 1.0 / n as f64;
        let mut c = self.cosine_sums(closed);
        for (j, cj) in c.iter_mut().enumerate() {
            *cj *= if j == 0 || j == n { inv } else { 2.0 * inv };
        }
        c
    }

    /// Samples `f_0..f_N` of `Σ b_j cos(jx)`.
    pub(crate) fn inverse_cosine(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let scaled: Vec<f64> = coeffs
            .iter()
            .enumerate()
            .map(|(j, &b)| if j == 0 || j == n { 2.0 * b } else { b })
            .collect();
        self.cosine_sums(&scaled)
    }
}
