//! Gamma function via the Lanczos approximation (g = 7, nine terms).

use crate::error::{Error, Result};
use crate::real::Real;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `Γ(x)` for finite `x > 0`.
pub fn gamma_fn<T: Real>(x: T) -> Result<T> {
    if !x.is_finite() || x <= T::zero() {
        return Err(Error::domain(format!(
            "gamma requires a positive finite argument, got {x}"
        )));
    }
    Ok(gamma_unchecked(x))
}

/// `Γ(x)` without argument checks. Reflection handles `x < 1/2`.
pub(crate) fn gamma_unchecked<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        let pi = T::PI();
        return pi / ((pi * x).sin() * gamma_unchecked(T::one() - x));
    }
    let z = x - T::one();
    let mut acc = T::lit(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (z + T::from_usize_lossy(i));
    }
    let t = z + T::lit(LANCZOS_G) + half;
    // t^(z+1/2) split in two factors so f32 does not overflow before e^-t pulls it back.
    let p = t.powf((z + half) * half);
    (T::TAU()).sqrt() * p * ((-t).exp() * p) * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Stirling series for ln Γ, shifted upward by the recurrence; independent
    /// of the Lanczos coefficients.
    fn stirling_gamma(x: f64) -> f64 {
        let mut shift = 1.0;
        let mut z = x;
        while z < 30.0 {
            shift *= z;
            z += 1.0;
        }
        let z2 = z * z;
        let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2)
            - 1.0 / (1680.0 * z * z2 * z2 * z2)
            + 1.0 / (1188.0 * z * z2 * z2 * z2 * z2);
        let ln = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series;
        ln.exp() / shift
    }

    #[test]
    fn exact_values() {
        assert!((gamma_fn(1.0_f64).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma_fn(0.5_f64).unwrap() - 1.772_453_850_905_516).abs() < 1e-13);
        assert!((gamma_fn(5.0_f64).unwrap() - 24.0).abs() < 1e-12);
        let mut fact = 1.0_f64;
        for n in 1..=30_u32 {
            let g = gamma_fn(f64::from(n)).unwrap();
            assert!(((g - fact) / fact).abs() < 1e-12, "Γ({n})");
            fact *= f64::from(n);
        }
    }

    #[test]
    fn matches_stirling_on_unit_to_fifty() {
        let mut worst = 0.0_f64;
        for i in 1..=5000 {
            let x = i as f64 * 0.01;
            let rel = ((gamma_fn(x).unwrap() - stirling_gamma(x)) / stirling_gamma(x)).abs();
            worst = worst.max(rel);
        }
        assert!(worst < 1e-12, "worst relative error {worst:e}");
    }

    #[test]
    fn small_arguments_use_reflection() {
        for &x in &[1e-8, 1e-3, 0.1, 0.25, 0.49] {
            let rel = ((gamma_fn(x).unwrap() - stirling_gamma(x)) / stirling_gamma(x)).abs();
            assert!(rel < 1e-12, "x = {x}: {rel:e}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(gamma_fn(0.0_f64).is_err());
        assert!(gamma_fn(-1.5_f64).is_err());
        assert!(gamma_fn(f64::NAN).is_err());
        assert!(gamma_fn(f64::INFINITY).is_err());
    }

    #[test]
    fn single_precision() {
        assert!((gamma_fn(0.5_f32).unwrap() - 1.772_453_9).abs() < 1e-5);
        assert!(gamma_fn(34.0_f32).unwrap().is_finite());
    }
}
