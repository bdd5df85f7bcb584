//! Discrete Caputo operators: the L1 derivative, Grünwald–Letnikov weights and
//! the fractional Adams (predictor–corrector) quadrature weights.

use crate::error::{Error, Result};
use crate::gamma::gamma_unchecked;
use crate::grid::{FractionalOrder, SampledSignal};
use crate::history::lagged_convolution;
use crate::real::Real;

/// Lags at which the weight formulas switch from direct powers to series.
const SERIES_FROM: usize = 16;
const SERIES_TERMS: usize = 18;

/// `m^p - (m-1)^p` for `m >= 1`, accurate for large `m`.
pub(crate) fn power_difference<T: Real>(m: usize, p: T) -> T {
    if m == 0 {
        return T::zero();
    }
    if m == 1 {
        return T::one();
    }
    let mf = T::from_usize_lossy(m);
    -(mf.powf(p)) * (p * (-mf.recip()).ln_1p()).exp_m1()
}

/// `(m+1)^p - 2 m^p + (m-1)^p` for `m >= 1`.
pub(crate) fn second_difference<T: Real>(m: usize, p: T) -> T {
    let mf = T::from_usize_lossy(m);
    if m < SERIES_FROM {
        return (mf + T::one()).powf(p) - T::lit(2.0) * mf.powf(p) + (mf - T::one()).powf(p);
    }
    // (1+x)^p + (1-x)^p - 2 = 2 * sum_{j even >= 2} C(p, j) x^j
    let x = mf.recip();
    let x2 = x * x;
    let mut binom = T::one();
    let mut xp = T::one();
    let mut acc = T::zero();
    for j in 1..=SERIES_TERMS {
        binom = binom * (p - T::from_usize_lossy(j - 1)) / T::from_usize_lossy(j);
        if j % 2 == 0 {
            xp = xp * x2;
            acc = acc + binom * xp;
        }
    }
    T::lit(2.0) * mf.powf(p) * acc
}

/// `(k-1)^(a+1) - (k-1-a) k^a`, the endpoint term of the corrector.
fn corrector_head<T: Real>(k: usize, alpha: T) -> T {
    let kf = T::from_usize_lossy(k);
    let p = alpha + T::one();
    if k < SERIES_FROM {
        return (kf - T::one()).powf(p) - (kf - T::one() - alpha) * kf.powf(alpha);
    }
    // k^p [(1-x)^p - 1 + p x] = k^p sum_{j>=2} C(p, j) (-x)^j
    let x = kf.recip();
    let mut binom = p;
    let mut xp = -x;
    let mut acc = T::zero();
    for j in 2..=SERIES_TERMS {
        binom = binom * (p - T::from_usize_lossy(j - 1)) / T::from_usize_lossy(j);
        xp = -xp * x;
        acc = acc + binom * xp;
    }
    kf.powf(p) * acc
}

/// Grünwald–Letnikov weights `w_j = (-1)^j C(alpha, j)` for `j = 0..=count`.
pub fn gl_weights<T: Real>(order: FractionalOrder<T>, count: usize) -> Vec<T> {
    let alpha = order.alpha();
    let mut w = Vec::with_capacity(count + 1);
    w.push(T::one());
    for j in 1..=count {
        let jf = T::from_usize_lossy(j);
        let prev = w[j - 1];
        w.push(prev * (T::one() - (alpha + T::one()) / jf));
    }
    w
}

/// L1 weights `b_j = (j+1)^(1-a) - j^(1-a)` for `j = 0..count`.
pub fn l1_weights<T: Real>(order: FractionalOrder<T>, count: usize) -> Vec<T> {
    if order.is_classical() {
        let mut w = vec![T::zero(); count];
        if let Some(first) = w.first_mut() {
            *first = T::one();
        }
        return w;
    }
    let p = T::one() - order.alpha();
    (0..count).map(|j| power_difference(j + 1, p)).collect()
}

/// L1 estimate of the Caputo derivative at every node.
///
/// Node 0 has no stencil; it receives node 1's value and the result is flagged
/// with `first_node_copied`. At order one the output is the backward difference.
pub fn l1_caputo<T: Real>(signal: &SampledSignal<T>, order: FractionalOrder<T>) -> Result<SampledSignal<T>> {
    let n = signal.values.len();
    if n < 2 || n != signal.grid.node_count() {
        return Err(Error::Grid(format!(
            "L1 needs at least two nodes matching the grid, got {n}"
        )));
    }
    let h = signal.grid.h;
    let u = &signal.values;
    let mut out = vec![T::zero(); n];
    if order.is_classical() {
        for k in 1..n {
            out[k] = (u[k] - u[k - 1]) / h;
        }
    } else {
        let alpha = order.alpha();
        let coeff = h.powf(-alpha) / gamma_unchecked(T::lit(2.0) - alpha);
        // Increments sit at lag k-1-i from node k; shift the kernel by one.
        let mut kernel = vec![T::zero(); n];
        for (m, w) in l1_weights(order, n - 1).into_iter().enumerate() {
            kernel[m + 1] = w;
        }
        let mut incr: Vec<T> = u.windows(2).map(|w| w[1] - w[0]).collect();
        incr.push(T::zero());
        let conv = lagged_convolution(&kernel, &incr);
        for k in 1..n {
            out[k] = coeff * conv[k];
        }
    }
    out[0] = out[1];
    Ok(SampledSignal {
        grid: signal.grid,
        values: out,
        first_node_copied: true,
    })
}

/// Quadrature weights for one fractional Adams step.
///
/// The update to node `k` reads
/// `x_k = x_0 + (1/Γ(a)) sum_j predictor[j] f_j` (predictor, `j < k`) and
/// `x_k = x_0 + (1/Γ(a)) sum_j corrector[j] f_j` (corrector, `j <= k`, with
/// `f_k` evaluated at the predicted state).
#[derive(Debug, Clone, PartialEq)]
pub struct AbmWeights<T> {
    pub predictor: Vec<T>,
    pub corrector: Vec<T>,
}

pub fn abm_weights<T: Real>(order: FractionalOrder<T>, step_index: usize, h: T) -> Result<AbmWeights<T>> {
    if step_index < 1 {
        return Err(Error::Grid("Adams weights need step_index >= 1".into()));
    }
    let k = step_index;
    let alpha = order.alpha();
    let ha = h.powf(alpha);
    let pscale = ha / alpha;
    let predictor = (0..k).map(|j| pscale * power_difference(k - j, alpha)).collect();
    let cscale = ha / (alpha * (alpha + T::one()));
    let mut corrector = Vec::with_capacity(k + 1);
    corrector.push(cscale * corrector_head(k, alpha));
    for j in 1..k {
        corrector.push(cscale * second_difference(k - j, alpha + T::one()));
    }
    corrector.push(cscale);
    Ok(AbmWeights { predictor, corrector })
}

/// Toeplitz kernels used by the Adams solver, already divided by `Γ(a)`:
/// `(predictor[m], corrector[m])` for lags `m = 0..n_nodes`, plus the scale of
/// the node-0 corrector term and of the implicit endpoint.
pub(crate) struct AdamsKernels<T> {
    pub predictor: Vec<T>,
    pub corrector: Vec<T>,
    pub corrector_scale: T,
}

pub(crate) fn adams_kernels<T: Real>(order: FractionalOrder<T>, h: T, n_nodes: usize) -> AdamsKernels<T> {
    let alpha = order.alpha();
    let ha = h.powf(alpha);
    let p = ha / gamma_unchecked(alpha + T::one());
    let c = ha / gamma_unchecked(alpha + T::lit(2.0));
    let mut predictor = vec![T::zero(); n_nodes.max(1)];
    let mut corrector = vec![T::zero(); n_nodes.max(1)];
    for m in 1..n_nodes {
        predictor[m] = p * power_difference(m, alpha);
        corrector[m] = c * second_difference(m, alpha + T::one());
    }
    AdamsKernels {
        predictor,
        corrector,
        corrector_scale: c,
    }
}

/// Node-0 corrector coefficient for step `k`, divided by `Γ(a)`.
pub(crate) fn adams_head<T: Real>(alpha: T, k: usize, scale: T) -> T {
    scale * corrector_head(k, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::UniformGrid;

    fn ord(a: f64) -> FractionalOrder<f64> {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn gl_weight_examples() {
        let close = |a: &[f64], b: &[f64]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15);
        assert!(close(&gl_weights(ord(1.0), 2), &[1.0, -1.0, 0.0]));
        assert!(close(&gl_weights(ord(0.5), 2), &[1.0, -0.5, -0.125]));
        assert!(close(&gl_weights(ord(0.3), 1), &[1.0, -0.3]));
    }

    #[test]
    fn gl_weights_negative_and_shrinking() {
        for &a in &[0.1, 0.4, 0.8, 0.99] {
            let w = gl_weights(ord(a), 2000);
            let mut partial = 1.0;
            for j in 1..w.len() {
                assert!(w[j] < 0.0);
                if j > 1 {
                    assert!(w[j].abs() < w[j - 1].abs());
                }
                let next = partial + w[j];
                assert!(next < partial && next > 0.0);
                partial = next;
            }
        }
    }

    #[test]
    fn stable_differences_match_direct_powers() {
        for &p in &[0.3_f64, 0.5, 1.0, 1.5, 1.9, 2.0] {
            for m in 1..200usize {
                let mf = m as f64;
                let direct = mf.powf(p) - (mf - 1.0).powf(p);
                assert!((power_difference(m, p) - direct).abs() < 1e-11 * direct.abs().max(1e-3));
                let direct2 = (mf + 1.0).powf(p) - 2.0 * mf.powf(p) + (mf - 1.0).powf(p);
                let tol = 1e-12 * (mf + 1.0).powf(p);
                assert!((second_difference(m, p) - direct2).abs() < tol, "p={p} m={m}");
            }
        }
        // far lags: compare the series against the asymptotic p(p-1) m^(p-2)
        let m = 1_000_000usize;
        let p = 1.5_f64;
        let lead = p * (p - 1.0) * (m as f64).powf(p - 2.0);
        assert!(((second_difference(m, p) - lead) / lead).abs() < 1e-9);
    }

    #[test]
    fn abm_weight_examples() {
        let w = abm_weights(ord(1.0), 5, 0.1).unwrap();
        assert!(w.predictor.iter().all(|&b| (b - 0.1).abs() < 1e-15));
        assert!((w.corrector[0] - 0.05).abs() < 1e-15);
        assert!((w.corrector[5] - 0.05).abs() < 1e-15);
        for &a in &w.corrector[1..5] {
            assert!((a - 0.1).abs() < 1e-14);
        }
        let w = abm_weights(ord(0.5), 1, 1.0).unwrap();
        assert_eq!(w.predictor.len(), 1);
        assert!((w.predictor[0] - 2.0).abs() < 1e-15);
        assert!(abm_weights(ord(0.5), 0, 1.0).is_err());
    }

    /// Predictor weights integrate f = 1 exactly: (1/Γ(a)) sum b_j = t^a / Γ(a+1).
    #[test]
    fn abm_weights_integrate_constants() {
        for &a in &[0.2, 0.5, 0.9] {
            for &k in &[1usize, 7, 40, 300] {
                let h = 0.01;
                let w = abm_weights(ord(a), k, h).unwrap();
                let g = gamma_unchecked(a);
                let exact = (k as f64 * h).powf(a) / gamma_unchecked(a + 1.0);
                let sp: f64 = w.predictor.iter().sum::<f64>() / g;
                let sc: f64 = w.corrector.iter().sum::<f64>() / g;
                assert!((sp - exact).abs() < 1e-12 * exact);
                assert!((sc - exact).abs() < 1e-11 * exact, "a={a} k={k}");
            }
        }
    }

    #[test]
    fn l1_constant_is_zero() {
        let g = UniformGrid::new(0.0, 0.01, 700).unwrap();
        let s = SampledSignal::from_fn(g, |_| 3.7).unwrap();
        for &a in &[0.2, 0.5, 1.0] {
            let d = l1_caputo(&s, ord(a)).unwrap();
            assert!(d.values.iter().all(|&v| v == 0.0));
            assert!(d.first_node_copied);
        }
    }

    #[test]
    fn l1_of_identity() {
        let g = UniformGrid::spanning(0.0, 1.0, 1000).unwrap();
        let s = SampledSignal::from_fn(g, |t| t).unwrap();
        let d = l1_caputo(&s, ord(0.5)).unwrap();
        assert!((d.last() - std::f64::consts::FRAC_2_SQRT_PI).abs() < 5e-3);
    }

    #[test]
    fn l1_classical_limit() {
        let g = UniformGrid::spanning(0.0, 1.0, 1000).unwrap();
        let s = SampledSignal::from_fn(g, |t| t * t).unwrap();
        let d = l1_caputo(&s, ord(1.0)).unwrap();
        assert!((d.last() - 2.0).abs() < 1e-2);
    }

    #[test]
    fn l1_convergence_order() {
        let a = 0.5;
        let mut errs = Vec::new();
        for &n in &[100usize, 200, 400] {
            let g = UniformGrid::spanning(0.0, 1.0, n).unwrap();
            let s = SampledSignal::from_fn(g, |t| t * t).unwrap();
            let d = l1_caputo(&s, ord(a)).unwrap();
            let c = 2.0 / gamma_unchecked(3.0 - a);
            let err = g
                .times()
                .zip(&d.values)
                .skip(1)
                .map(|(t, v)| (v - c * t.powf(2.0 - a)).abs())
                .fold(0.0, f64::max);
            errs.push(err);
        }
        // The rate approaches 2 - a = 1.5 from below on this problem
        // (1.4914 and 1.4939 in exact arithmetic).
        let rates: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        assert!(
            (rates[0] - 1.4914).abs() < 1e-3 && (rates[1] - 1.4939).abs() < 1e-3,
            "{rates:?}"
        );
        assert!(rates[1] > rates[0] && rates[1] < 1.5);
    }

    #[test]
    fn l1_rejects_mismatched_signal() {
        let g = UniformGrid::new(0.0, 0.1, 3).unwrap();
        let s = SampledSignal {
            grid: g,
            values: vec![1.0],
            first_node_copied: false,
        };
        assert!(matches!(l1_caputo(&s, ord(0.5)), Err(Error::Grid(_))));
    }
}
