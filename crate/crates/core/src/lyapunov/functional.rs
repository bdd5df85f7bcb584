use crate::caputo::l1_caputo;
use crate::error::{Error, Result};
use crate::grid::SampledSignal;
use crate::quadrature::integrate;
use crate::real::Real;
use crate::solver::{ModelDefinition, Trajectory};

use super::gfunction::GFunction;

/// Absolute accuracy of the quadrature behind Ψ for general `g`.
pub const PSI_QUADRATURE_TOL: f64 = 1e-10;
/// Ψ with a positive anchor refuses arguments at or below this.
pub const PSI_MIN_ARGUMENT: f64 = 1e-30;

/// `Ψ(x) = x - x̄ - ∫_{x̄}^{x} g(x̄)/g(s) ds`; `Ψ(x) = x` when `x̄ = 0`.
pub fn psi<T: Real>(g: &GFunction<T>, xstar: T, x: T) -> Result<T> {
    if xstar == T::zero() {
        return Ok(x);
    }
    if !(x > T::lit(PSI_MIN_ARGUMENT)) || !x.is_finite() {
        return Err(Error::domain(format!("Ψ anchored at {xstar} evaluated at {x}")));
    }
    let d = x - xstar;
    if g.is_identity() {
        return Ok(d - xstar * (d / xstar).ln_1p());
    }
    let gstar = g.eval(xstar);
    let gx = g.eval(x);
    if !(gx > T::zero()) || !(gstar > T::zero()) {
        return Err(Error::domain(format!("g '{}' vanishes on [{x}, {xstar}]", g.label())));
    }
    let integral = integrate(|s| gstar / g.eval(s), xstar, x, T::lit(PSI_QUADRATURE_TOL));
    Ok(d - integral)
}

/// `a * Ψ(x_index)` with Ψ anchored at `anchor`.
#[derive(Debug, Clone)]
pub struct PsiComponent<T> {
    pub weight: T,
    pub g: GFunction<T>,
    pub anchor: T,
    pub index: usize,
}

/// `b/2 * (x_index - anchor)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadComponent<T> {
    pub weight: T,
    pub anchor: T,
    pub index: usize,
}

/// `weight * (sum_i (x_i - anchor_i))^2` over the listed `(index, anchor)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossQuadComponent<T> {
    pub weight: T,
    pub terms: Vec<(usize, T)>,
}

impl<T: Real> CrossQuadComponent<T> {
    fn offset(&self, state: &[T]) -> T {
        self.terms.iter().map(|&(i, a)| state[i] - a).sum()
    }
}

/// Weighted sum of Ψ terms plus optional quadratic terms.
#[derive(Debug, Clone)]
pub struct LyapunovFunctional<T> {
    pub psi_parts: Vec<PsiComponent<T>>,
    pub quad_parts: Vec<QuadComponent<T>>,
    pub cross_parts: Vec<CrossQuadComponent<T>>,
}

impl<T: Real> LyapunovFunctional<T> {
    pub fn new(
        psi_parts: Vec<PsiComponent<T>>,
        quad_parts: Vec<QuadComponent<T>>,
        cross_parts: Vec<CrossQuadComponent<T>>,
    ) -> Result<Self> {
        for p in &psi_parts {
            if !(p.weight > T::zero()) || !(p.anchor >= T::zero()) {
                return Err(Error::Contract(format!(
                    "Ψ part on coordinate {} needs weight > 0 and anchor >= 0",
                    p.index
                )));
            }
        }
        for q in &quad_parts {
            if !(q.weight >= T::zero()) {
                return Err(Error::Contract(format!(
                    "quadratic part on coordinate {} has negative weight",
                    q.index
                )));
            }
        }
        for c in &cross_parts {
            if !(c.weight >= T::zero()) || c.terms.is_empty() {
                return Err(Error::Contract(
                    "cross-quadratic part needs weight >= 0 and at least one term".into(),
                ));
            }
        }
        Ok(LyapunovFunctional {
            psi_parts,
            quad_parts,
            cross_parts,
        })
    }

    /// Largest coordinate index the functional reads, plus one.
    pub fn min_dimension(&self) -> usize {
        let psi = self.psi_parts.iter().map(|p| p.index + 1);
        let quad = self.quad_parts.iter().map(|q| q.index + 1);
        let cross = self.cross_parts.iter().flat_map(|c| c.terms.iter().map(|t| t.0 + 1));
        psi.chain(quad).chain(cross).max().unwrap_or(0)
    }

    fn check_state(&self, state: &[T]) -> Result<()> {
        let need = self.min_dimension();
        if state.len() < need {
            return Err(Error::Dimension {
                expected: need,
                got: state.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, state: &[T]) -> Result<T> {
        self.check_state(state)?;
        let half = T::lit(0.5);
        let mut v = T::zero();
        for p in &self.psi_parts {
            v = v + p.weight * psi(&p.g, p.anchor, state[p.index])?;
        }
        for q in &self.quad_parts {
            let d = state[q.index] - q.anchor;
            v = v + half * q.weight * d * d;
        }
        for c in &self.cross_parts {
            let s = c.offset(state);
            v = v + c.weight * s * s;
        }
        Ok(v)
    }

    /// `∇V(state)`, with the same length as `state`.
    pub fn gradient(&self, state: &[T]) -> Result<Vec<T>> {
        self.check_state(state)?;
        let mut grad = vec![T::zero(); state.len()];
        for p in &self.psi_parts {
            let x = state[p.index];
            let slope = if p.anchor == T::zero() {
                T::one()
            } else {
                let gx = p.g.eval(x);
                if !(gx > T::zero()) || !gx.is_finite() {
                    return Err(Error::domain(format!("g '{}' is not positive at {x}", p.g.label())));
                }
                T::one() - p.g.eval(p.anchor) / gx
            };
            grad[p.index] = grad[p.index] + p.weight * slope;
        }
        for q in &self.quad_parts {
            grad[q.index] = grad[q.index] + q.weight * (state[q.index] - q.anchor);
        }
        for c in &self.cross_parts {
            let s = T::lit(2.0) * c.weight * c.offset(state);
            for &(i, _) in &c.terms {
                grad[i] = grad[i] + s;
            }
        }
        Ok(grad)
    }

    /// `dV/dt = ∇V · f` along the classical flow of `model`.
    pub fn field_derivative<M>(&self, model: &M, state: &[T]) -> Result<T>
    where
        M: ModelDefinition<T> + ?Sized,
    {
        if state.len() != model.dimension() {
            return Err(Error::Dimension {
                expected: model.dimension(),
                got: state.len(),
            });
        }
        let grad = self.gradient(state)?;
        let mut f = vec![T::zero(); state.len()];
        model.rhs(state, &mut f)?;
        Ok(grad.iter().zip(&f).map(|(&a, &b)| a * b).sum())
    }

    /// `V` at every node of a trajectory.
    pub fn along(&self, traj: &Trajectory<T>) -> Result<SampledSignal<T>> {
        let values = traj
            .states()
            .enumerate()
            .map(|(k, s)| self.eval(s).map_err(|e| Error::domain(format!("node {k}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        SampledSignal::new(traj.grid, values)
    }
}

/// Log-Volterra functional `sum_i a_i Ψ_i(x_i)` with `g(s) = s`; part `i`
/// reads coordinate `i`.
pub fn build_log_volterra<T: Real>(weights: &[(T, T)]) -> Result<LyapunovFunctional<T>> {
    let parts = weights
        .iter()
        .enumerate()
        .map(|(index, &(weight, anchor))| PsiComponent {
            weight,
            g: GFunction::identity(),
            anchor,
            index,
        })
        .collect();
    LyapunovFunctional::new(parts, Vec::new(), Vec::new())
}

/// Discrete Caputo derivative (L1) of `V` along a trajectory, at the
/// trajectory's own order.
pub fn caputo_of_functional<T: Real>(f: &LyapunovFunctional<T>, traj: &Trajectory<T>) -> Result<SampledSignal<T>> {
    l1_caputo(&f.along(traj)?, traj.order)
}
