//! The SICA population model and the TEIV cellular model of HIV, with their
//! reproduction numbers, equilibria and Lyapunov functionals.

pub mod sica;
pub mod teiv;

pub use sica::{Incidence, SicaParams};
pub use teiv::TeivParams;

use crate::error::Result;

/// `|f(x)|_2 / max(|x|_2, 1)`.
pub(crate) fn relative_residual(rhs: impl Fn(&[f64]) -> Result<Vec<f64>>, x: &[f64]) -> Result<f64> {
    let r = rhs(x)?;
    let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(rn / xn.max(1.0))
}
