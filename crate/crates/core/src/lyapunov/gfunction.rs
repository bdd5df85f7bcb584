use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::real::Real;

/// Points used by the admissibility probe, log-spaced on `[1e-6, 1e6]`.
pub const ADMISSIBILITY_SAMPLES: usize = 64;

#[derive(Clone)]
enum Kind<T> {
    Identity,
    Custom(Arc<dyn Fn(T) -> T + Send + Sync>),
}

/// A non-negative, strictly increasing `g` on the positive reals.
///
/// Admissibility is checked on a fixed log-spaced sample, so a function that
/// misbehaves between sample points can slip through.
#[derive(Clone)]
pub struct GFunction<T> {
    label: String,
    kind: Kind<T>,
}

impl<T> fmt::Debug for GFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("GFunction").field(&self.label).finish()
    }
}

impl<T: Real> GFunction<T> {
    /// `g(s) = s`, which gives the logarithmic (Volterra) form of Ψ.
    pub fn identity() -> Self {
        GFunction {
            label: "s".into(),
            kind: Kind::Identity,
        }
    }

    pub fn new<F>(label: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        let g = GFunction::new_unchecked(label, f);
        g.check_admissible()?;
        Ok(g)
    }

    /// Skips the sampled monotonicity check; for functions known to be admissible.
    pub fn new_unchecked<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        GFunction {
            label: label.into(),
            kind: Kind::Custom(Arc::new(f)),
        }
    }

    /// Built-in functions addressable by name: `s`, `s^2`, `log1p`, `s/(1+s)`.
    pub fn from_label(label: &str) -> Result<Self> {
        match label {
            "s" | "identity" => Ok(Self::identity()),
            "s^2" | "square" => Self::new("s^2", |s: T| s * s),
            "log1p" | "ln(1+s)" => Self::new("log1p", |s: T| s.ln_1p()),
            "s/(1+s)" | "saturating" => Self::new("s/(1+s)", |s: T| s / (T::one() + s)),
            other => Err(Error::domain(format!("unknown g function '{other}'"))),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, Kind::Identity)
    }

    #[inline]
    pub fn eval(&self, s: T) -> T {
        match &self.kind {
            Kind::Identity => s,
            Kind::Custom(f) => f(s),
        }
    }

    /// `c * g`; leaves Ψ unchanged because Ψ only sees `g(x̄) / g(s)`.
    pub fn scaled(&self, c: T) -> Self {
        let inner = self.clone();
        GFunction::new_unchecked(format!("{c}*{}", self.label), move |s| c * inner.eval(s))
    }

    fn check_admissible(&self) -> Result<()> {
        let lo = T::lit(-6.0);
        let step = T::lit(12.0) / T::from_usize_lossy(ADMISSIBILITY_SAMPLES - 1);
        let ten = T::lit(10.0);
        let mut prev: Option<T> = None;
        for i in 0..ADMISSIBILITY_SAMPLES {
            let s = ten.powf(lo + step * T::from_usize_lossy(i));
            let v = self.eval(s);
            if !v.is_finite() || v < T::zero() {
                return Err(Error::domain(format!(
                    "g '{}' is negative or non-finite at s = {s}",
                    self.label
                )));
            }
            if let Some(p) = prev {
                if v <= p {
                    return Err(Error::domain(format!(
                        "g '{}' is not strictly increasing near s = {s}",
                        self.label
                    )));
                }
            }
            prev = Some(v);
        }
        Ok(())
    }
}
