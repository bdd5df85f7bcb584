//! Damped Newton iteration for small nonlinear systems.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    /// Stop once `|dx| <= step_tol * max(|x|, 1)`.
    pub step_tol: f64,
    pub max_halvings: u32,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iterations: 200,
            step_tol: 1e-12,
            max_halvings: 40,
        }
    }
}

/// Solves `f(x) = 0` from `x0` with an analytic Jacobian. Steps are halved
/// while they increase the residual norm.
pub fn damped_newton<F, J>(f: F, jacobian: J, x0: &[f64], opts: NewtonOptions) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
    J: Fn(&[f64]) -> Result<DMatrix<f64>>,
{
    let mut x = DVector::from_column_slice(x0);
    let mut fx = DVector::from_vec(f(x.as_slice())?);
    let mut norm = fx.norm();
    for _ in 0..opts.max_iterations {
        let jac = jacobian(x.as_slice())?;
        let step = jac.lu().solve(&(-&fx)).ok_or(Error::NewtonFailed {
            iterations: 0,
            residual: norm,
        })?;
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = &x + &step * scale;
            if let Ok(ft) = f(trial.as_slice()) {
                let ft = DVector::from_vec(ft);
                let n = ft.norm();
                if n.is_finite() && (n <= norm || n == 0.0) {
                    accepted = Some((trial, ft, n));
                    break;
                }
            }
            scale *= 0.5;
        }
        let Some((trial, ft, n)) = accepted else {
            // no descent left: converged to rounding level or stuck
            let converged = step.norm() <= opts.step_tol.sqrt() * x.norm().max(1.0);
            return if converged {
                Ok(x.as_slice().to_vec())
            } else {
                Err(Error::NewtonFailed {
                    iterations: opts.max_iterations,
                    residual: norm,
                })
            };
        };
        let moved = (&trial - &x).norm();
        x = trial;
        fx = ft;
        norm = n;
        if moved <= opts.step_tol * x.norm().max(1.0) || norm == 0.0 {
            return Ok(x.as_slice().to_vec());
        }
    }
    Err(Error::NewtonFailed {
        iterations: opts.max_iterations,
        residual: norm,
    })
}

/// Central-difference Jacobian; used to cross-check analytic Jacobians.
pub fn finite_difference_jacobian<F>(f: F, x: &[f64]) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let m = f(x)?.len();
    let mut jac = DMatrix::zeros(m, n);
    let mut xp = x.to_vec();
    for j in 0..n {
        let h = 1e-6 * x[j].abs().max(1e-3);
        xp[j] = x[j] + h;
        let fp = f(&xp)?;
        xp[j] = x[j] - h;
        let fm = f(&xp)?;
        xp[j] = x[j];
        for i in 0..m {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Largest real part among the eigenvalues of a square matrix.
pub fn spectral_abscissa(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}
