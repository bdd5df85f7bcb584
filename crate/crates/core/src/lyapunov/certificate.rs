use serde::{Deserialize, Serialize};

use crate::caputo::l1_caputo;
use crate::error::{Error, Result};
use crate::grid::{FractionalOrder, SampledSignal, UniformGrid};
use crate::real::Real;

use super::functional::psi;
use super::gfunction::GFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    LemmaInequality,
    Decrescence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub t0: f64,
    pub h: f64,
    pub n: usize,
}

impl<T: Real> From<UniformGrid<T>> for GridInfo {
    fn from(g: UniformGrid<T>) -> Self {
        GridInfo {
            t0: g.t0.to_f64_lossy(),
            h: g.h.to_f64_lossy(),
            n: g.n_steps,
        }
    }
}

/// Outcome of a pointwise inequality check on a grid. `pass` holds exactly
/// when `max_violation <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub max_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub violating_node: Option<usize>,
    pub grid: GridInfo,
    pub order: Option<f64>,
}

impl Certificate {
    fn from_excess<T: Real>(kind: CertificateKind, grid: UniformGrid<T>, excess: &[T], tolerance: T) -> Self {
        let mut max = T::neg_infinity();
        let mut first_bad = None;
        // node 0 only repeats node 1 in the L1 output
        for (k, &v) in excess.iter().enumerate().skip(1) {
            if v > max {
                max = v;
            }
            if first_bad.is_none() && !(v <= tolerance) {
                first_bad = Some(k);
            }
        }
        let max_violation = max.to_f64_lossy();
        let tolerance = tolerance.to_f64_lossy();
        Certificate {
            kind,
            max_violation,
            tolerance,
            pass: first_bad.is_none() && max_violation <= tolerance,
            violating_node: first_bad,
            grid: grid.into(),
            order: None,
        }
    }

    pub fn with_order<T: Real>(mut self, order: FractionalOrder<T>) -> Self {
        self.order = Some(order.alpha().to_f64_lossy());
        self
    }
}

/// `10 h^(2-a) * scale`: the L1 truncation error bound with a safety factor.
pub fn default_tolerance<T: Real>(h: T, order: FractionalOrder<T>, scale: T) -> T {
    T::lit(10.0) * h.powf(T::lit(2.0) - order.alpha()) * scale
}

/// Both sides of `D^a Ψ(x) <= (1 - g(x̄)/g(x)) D^a x`, node by node.
pub fn lemma_sides<T: Real>(
    x: &SampledSignal<T>,
    g: &GFunction<T>,
    xbar: T,
    order: FractionalOrder<T>,
) -> Result<(SampledSignal<T>, SampledSignal<T>)> {
    if !(xbar > T::zero()) || !xbar.is_finite() {
        return Err(Error::domain(format!("x̄ must be positive, got {xbar}")));
    }
    if let Some(k) = x.values.iter().position(|&v| !(v > T::zero())) {
        return Err(Error::domain(format!(
            "non-positive sample {} at node {k}",
            x.values[k]
        )));
    }
    let psi_values = x.values.iter().map(|&v| psi(g, xbar, v)).collect::<Result<Vec<_>>>()?;
    let lhs = l1_caputo(&SampledSignal::new(x.grid, psi_values)?, order)?;
    let dx = l1_caputo(x, order)?;
    let gbar = g.eval(xbar);
    let values = x
        .values
        .iter()
        .zip(&dx.values)
        .map(|(&v, &d)| (T::one() - gbar / g.eval(v)) * d)
        .collect();
    let rhs = SampledSignal {
        grid: x.grid,
        values,
        first_node_copied: true,
    };
    Ok((lhs, rhs))
}

/// Checks the Ψ inequality on a positive sampled signal at the default tolerance
/// `10 h^(2-a) max|x|`.
pub fn lemma_certificate<T: Real>(
    x: &SampledSignal<T>,
    g: &GFunction<T>,
    xbar: T,
    order: FractionalOrder<T>,
) -> Result<Certificate> {
    let tol = default_tolerance(x.grid.h, order, x.scale());
    lemma_certificate_with_tolerance(x, g, xbar, order, tol)
}

pub fn lemma_certificate_with_tolerance<T: Real>(
    x: &SampledSignal<T>,
    g: &GFunction<T>,
    xbar: T,
    order: FractionalOrder<T>,
    tolerance: T,
) -> Result<Certificate> {
    let (lhs, rhs) = lemma_sides(x, g, xbar, order)?;
    let excess: Vec<T> = lhs.values.iter().zip(&rhs.values).map(|(&l, &r)| l - r).collect();
    Ok(Certificate::from_excess(CertificateKind::LemmaInequality, x.grid, &excess, tolerance).with_order(order))
}

/// Passes when every node of `signal` is at most `tolerance`.
pub fn decrescence_certificate<T: Real>(signal: &SampledSignal<T>, tolerance: T) -> Certificate {
    Certificate::from_excess(CertificateKind::Decrescence, signal.grid, &signal.values, tolerance)
}
