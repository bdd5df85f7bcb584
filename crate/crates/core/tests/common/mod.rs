#![allow(dead_code)]

use std::f64::consts::PI;

/// ln Γ(x) for x > 0: shift up to x >= 20, then the Stirling series.
pub fn ln_gamma(mut x: f64) -> f64 {
    let mut shift = 0.0;
    while x < 20.0 {
        shift -= x.ln();
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    shift + (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// Textbook O(n^2) L1 Caputo derivative, node 0 left as NaN.
pub fn naive_l1(values: &[f64], h: f64, alpha: f64) -> Vec<f64> {
    let c = h.powf(-alpha) / gamma(2.0 - alpha);
    let b = |j: usize| ((j + 1) as f64).powf(1.0 - alpha) - (j as f64).powf(1.0 - alpha);
    let mut out = vec![f64::NAN; values.len()];
    for k in 1..values.len() {
        let mut s = 0.0;
        for j in 0..k {
            s += b(j) * (values[k - j] - values[k - j - 1]);
        }
        out[k] = c * s;
    }
    out
}

/// `E_a(-t^a)` by its power series; accurate for moderate `t`.
pub fn mittag_leffler_decay(alpha: f64, t: f64) -> f64 {
    let z = -t.powf(alpha);
    let mut sum = 0.0;
    for k in 0..400 {
        let kf = k as f64;
        let mag = kf * z.abs().ln() - ln_gamma(alpha * kf + 1.0);
        if k > 0 && mag < -60.0 {
            break;
        }
        let term = if k == 0 { 1.0 } else { mag.exp() };
        sum += if k % 2 == 1 { -term } else { term };
    }
    sum
}

/// Positive smooth signal `sum_i c_i + a_i sin(w_i t + p_i)` with `c_i > |a_i|`.
#[derive(Debug, Clone)]
pub struct Wave {
    pub terms: Vec<(f64, f64, f64, f64)>,
}

impl Wave {
    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|&(c, a, w, p)| c + a * (w * t + p).sin()).sum()
    }
}
