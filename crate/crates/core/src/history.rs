//! Lagged convolutions with Toeplitz memory kernels.
//!
//! Fractional schemes need `H[k] = sum_{j<k} K[k-j] s[j]` at every node. When the
//! sources `s` are known up front this is one FFT product ([`lagged_convolution`]).
//! When `s[k]` depends on `H[k]` (a time stepper), [`HistoryEngine`] splits the
//! index range recursively: the left half is solved, its influence on the right
//! half is added in one FFT product, then the right half is solved. Total cost is
//! `O(N log^2 N)` instead of `O(N^2)`.

use std::collections::HashMap;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::real::Real;

/// Below this half-block size the cross-block update is a plain double loop.
const DIRECT_CROSS_LIMIT: usize = 64;
/// Leaf size of the recursion.
const LEAF: usize = 64;

/// How much of the past the kernels see.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Memory {
    /// Every past node contributes.
    #[default]
    Full,
    /// Only the most recent `lags` nodes contribute (short-memory principle).
    Window(usize),
}

impl Memory {
    /// Zeroes kernel entries beyond the window.
    pub(crate) fn truncate<T: Real>(self, kernel: &mut [T]) {
        if let Memory::Window(w) = self {
            for v in kernel.iter_mut().skip(w + 1) {
                *v = T::zero();
            }
        }
    }
}

/// `out[k] = sum_{j<k} kernel[k-j] * src[j]` for every `k < src.len()`.
///
/// `kernel[0]` is ignored; `kernel` must have at least `src.len()` entries.
pub fn lagged_convolution<T: Real>(kernel: &[T], src: &[T]) -> Vec<T> {
    let n = src.len();
    assert!(kernel.len() >= n, "kernel shorter than signal");
    if n <= 256 {
        let mut out = vec![T::zero(); n];
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = T::zero();
            for j in 0..k {
                acc = acc + kernel[k - j] * src[j];
            }
            *o = acc;
        }
        return out;
    }
    let size = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut a: Vec<Complex<T>> = Vec::with_capacity(size);
    a.push(Complex::new(T::zero(), T::zero()));
    a.extend(kernel[1..n].iter().map(|&v| Complex::new(v, T::zero())));
    a.resize(size, Complex::new(T::zero(), T::zero()));
    let mut b: Vec<Complex<T>> = src.iter().map(|&v| Complex::new(v, T::zero())).collect();
    b.resize(size, Complex::new(T::zero(), T::zero()));
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in b.iter_mut().zip(&a) {
        *x = *x * *y;
    }
    inv.process(&mut b);
    let scale = T::one() / T::from_usize_lossy(size);
    b[..n].iter().map(|c| c.re * scale).collect()
}

type FftPair<T> = (Arc<dyn Fft<T>>, Arc<dyn Fft<T>>);

/// Causal history accumulator for several kernels over a vector-valued source.
///
/// Node 0's sources are supplied up front. For every later node `k` the stepper
/// receives the accumulated histories `H_r[k]` (laid out `r * dim + c`) and must
/// write the node's sources (same layout).
pub struct HistoryEngine<T: Real> {
    n_nodes: usize,
    dim: usize,
    kernels: Vec<Vec<T>>,
    /// `[kernel][component][node]`
    src: Vec<Vec<Vec<T>>>,
    hist: Vec<Vec<Vec<T>>>,
    planner: FftPlanner<T>,
    kernel_spectra: HashMap<usize, Vec<Vec<Complex<T>>>>,
    plans: HashMap<usize, FftPair<T>>,
}

impl<T: Real> HistoryEngine<T> {
    /// `kernels[r]` must hold at least `n_nodes` lags (index 0 unused).
    pub fn new(n_nodes: usize, dim: usize, kernels: Vec<Vec<T>>) -> Self {
        for k in &kernels {
            assert!(k.len() >= n_nodes, "kernel shorter than node count");
        }
        let r = kernels.len();
        let zeros = || vec![vec![vec![T::zero(); n_nodes]; dim]; r];
        HistoryEngine {
            n_nodes,
            dim,
            kernels,
            src: zeros(),
            hist: zeros(),
            planner: FftPlanner::new(),
            kernel_spectra: HashMap::new(),
            plans: HashMap::new(),
        }
    }

    /// Drives `step` over nodes `1..n_nodes`. `first` holds node 0's sources.
    pub fn run<F>(&mut self, first: &[T], mut step: F) -> Result<()>
    where
        F: FnMut(usize, &[T], &mut [T]) -> Result<()>,
    {
        let width = self.kernels.len() * self.dim;
        assert_eq!(first.len(), width);
        self.scatter(0, first);
        let span = self.n_nodes.next_power_of_two().max(1);
        let mut hbuf = vec![T::zero(); width];
        let mut sbuf = vec![T::zero(); width];
        self.solve(0, span, &mut step, &mut hbuf, &mut sbuf)
    }

    fn scatter(&mut self, k: usize, s: &[T]) {
        for (r, per_kernel) in self.src.iter_mut().enumerate() {
            for (c, comp) in per_kernel.iter_mut().enumerate() {
                comp[k] = s[r * self.dim + c];
            }
        }
    }

    fn solve<F>(&mut self, lo: usize, hi: usize, step: &mut F, hbuf: &mut [T], sbuf: &mut [T]) -> Result<()>
    where
        F: FnMut(usize, &[T], &mut [T]) -> Result<()>,
    {
        if lo >= self.n_nodes {
            return Ok(());
        }
        if hi - lo <= LEAF {
            let end = hi.min(self.n_nodes);
            for k in lo.max(1)..end {
                for r in 0..self.kernels.len() {
                    let kern = &self.kernels[r];
                    for c in 0..self.dim {
                        let s = &self.src[r][c];
                        let mut acc = self.hist[r][c][k];
                        for j in lo..k {
                            acc = acc + kern[k - j] * s[j];
                        }
                        self.hist[r][c][k] = acc;
                        hbuf[r * self.dim + c] = acc;
                    }
                }
                step(k, hbuf, sbuf)?;
                self.scatter(k, sbuf);
            }
            return Ok(());
        }
        let mid = lo + (hi - lo) / 2;
        self.solve(lo, mid, step, hbuf, sbuf)?;
        if mid < self.n_nodes {
            self.cross(lo, mid, hi);
            self.solve(mid, hi, step, hbuf, sbuf)?;
        }
        Ok(())
    }

    /// Adds the influence of sources in `[lo, mid)` onto histories in `[mid, hi)`.
    fn cross(&mut self, lo: usize, mid: usize, hi: usize) {
        let half = mid - lo;
        let end = hi.min(self.n_nodes);
        if half <= DIRECT_CROSS_LIMIT {
            for r in 0..self.kernels.len() {
                let kern = &self.kernels[r];
                for c in 0..self.dim {
                    let s = &self.src[r][c];
                    let h = &mut self.hist[r][c];
                    for k in mid..end {
                        let mut acc = T::zero();
                        for j in lo..mid {
                            acc = acc + kern[k - j] * s[j];
                        }
                        h[k] = h[k] + acc;
                    }
                }
            }
            return;
        }
        let size = 2 * half;
        self.ensure_spectra(size);
        let (fwd, inv) = self.plans[&size].clone();
        let spectra = &self.kernel_spectra[&size];
        let scale = T::one() / T::from_usize_lossy(size);
        let mut buf = vec![Complex::new(T::zero(), T::zero()); size];
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); fwd.get_inplace_scratch_len()];
        for (r, spec) in spectra.iter().enumerate() {
            for c in 0..self.dim {
                let s = &self.src[r][c];
                for (b, &v) in buf.iter_mut().zip(&s[lo..mid]) {
                    *b = Complex::new(v, T::zero());
                }
                for b in buf[half..].iter_mut() {
                    *b = Complex::new(T::zero(), T::zero());
                }
                fwd.process_with_scratch(&mut buf, &mut scratch);
                for (b, k) in buf.iter_mut().zip(spec) {
                    *b = *b * *k;
                }
                inv.process_with_scratch(&mut buf, &mut scratch);
                let h = &mut self.hist[r][c];
                for k in mid..end {
                    h[k] = h[k] + buf[k - lo].re * scale;
                }
            }
        }
    }

    fn ensure_spectra(&mut self, size: usize) {
        if self.kernel_spectra.contains_key(&size) {
            return;
        }
        let fwd = self.planner.plan_fft_forward(size);
        let inv = self.planner.plan_fft_inverse(size);
        let spectra = self
            .kernels
            .iter()
            .map(|kern| {
                let mut buf: Vec<Complex<T>> = Vec::with_capacity(size);
                buf.push(Complex::new(T::zero(), T::zero()));
                buf.extend(kern.iter().skip(1).take(size - 1).map(|&v| Complex::new(v, T::zero())));
                buf.resize(size, Complex::new(T::zero(), T::zero()));
                fwd.process(&mut buf);
                buf
            })
            .collect();
        self.kernel_spectra.insert(size, spectra);
        self.plans.insert(size, (fwd, inv));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(kernel: &[f64], src: &[f64]) -> Vec<f64> {
        (0..src.len())
            .map(|k| (0..k).map(|j| kernel[k - j] * src[j]).sum())
            .collect()
    }

    #[test]
    fn lagged_convolution_matches_brute_force() {
        for &n in &[1usize, 7, 300, 1025] {
            let kernel: Vec<f64> = (0..n).map(|m| 1.0 / (1.0 + m as f64).sqrt()).collect();
            let src: Vec<f64> = (0..n).map(|j| (j as f64 * 0.37).sin() + 2.0).collect();
            let fast = lagged_convolution(&kernel, &src);
            let slow = brute(&kernel, &src);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
            }
        }
    }

    /// A stepper whose source depends on its own history, checked against the
    /// same recursion evaluated with explicit O(N^2) sums.
    #[test]
    fn engine_matches_sequential_recursion() {
        for &n in &[2usize, 65, 129, 1000, 4097] {
            let k1: Vec<f64> = (0..n).map(|m| 0.5 / (1.0 + m as f64).powf(0.7)).collect();
            let k2: Vec<f64> = (0..n).map(|m| if m == 0 { 0.0 } else { 0.3 / m as f64 }).collect();
            let mut engine = HistoryEngine::new(n, 2, vec![k1.clone(), k2.clone()]);
            let mut out = vec![[0.0; 2]; n];
            out[0] = [1.0, -1.0];
            engine
                .run(&[1.0, -1.0, 1.0, -1.0], |k, h, s| {
                    let x = 1.0 - 0.1 * h[0] + 0.05 * h[3];
                    let y = -0.5 + 0.1 * h[1] - 0.02 * h[2];
                    out[k] = [x, y];
                    s.copy_from_slice(&[x, y, x, y]);
                    Ok(())
                })
                .unwrap();

            let mut seq = vec![[0.0; 2]; n];
            seq[0] = [1.0, -1.0];
            for k in 1..n {
                let mut h = [0.0; 4];
                for j in 0..k {
                    h[0] += k1[k - j] * seq[j][0];
                    h[1] += k1[k - j] * seq[j][1];
                    h[2] += k2[k - j] * seq[j][0];
                    h[3] += k2[k - j] * seq[j][1];
                }
                seq[k] = [1.0 - 0.1 * h[0] + 0.05 * h[3], -0.5 + 0.1 * h[1] - 0.02 * h[2]];
            }
            for k in 0..n {
                for c in 0..2 {
                    let (a, b) = (out[k][c], seq[k][c]);
                    assert!((a - b).abs() < 1e-11 * b.abs().max(1.0), "n={n} k={k}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn window_truncates_kernel() {
        let mut k = vec![1.0_f64; 10];
        Memory::Window(3).truncate(&mut k);
        assert_eq!(k, [1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        Memory::Full.truncate(&mut k);
        assert_eq!(k[3], 1.0);
    }
}
