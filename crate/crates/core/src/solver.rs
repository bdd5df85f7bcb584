//! Time integration of Caputo systems `D^a u = f(u)` and of the classical
//! system `u' = f(u)` on uniform grids.

use std::sync::Arc;

use crate::caputo::{adams_head, adams_kernels, gl_weights};
use crate::error::{Error, Result};
use crate::grid::{FractionalOrder, SampledSignal, UniformGrid};
use crate::history::{HistoryEngine, Memory};
use crate::real::Real;

/// An autonomous vector field `f: R^n -> R^n` together with its metadata.
pub trait ModelDefinition<T: Real>: Send + Sync {
    fn name(&self) -> &str;

    fn state_labels(&self) -> Vec<String>;

    fn dimension(&self) -> usize;

    /// Writes `f(state)` into `out`. Both slices have length [`Self::dimension`].
    fn rhs(&self, state: &[T], out: &mut [T]) -> Result<()>;
}

type SharedField<T> = Arc<dyn Fn(&[T], &mut [T]) + Send + Sync>;

/// A [`ModelDefinition`] backed by a closure.
#[derive(Clone)]
pub struct FnModel<T> {
    name: String,
    labels: Vec<String>,
    field: SharedField<T>,
}

impl<T: Real> FnModel<T> {
    pub fn new<F>(name: impl Into<String>, labels: &[&str], field: F) -> Self
    where
        F: Fn(&[T], &mut [T]) + Send + Sync + 'static,
    {
        FnModel {
            name: name.into(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
            field: Arc::new(field),
        }
    }
}

impl<T: Real> ModelDefinition<T> for FnModel<T> {
    fn name(&self) -> &str {
        &self.name
    }

    fn state_labels(&self) -> Vec<String> {
        self.labels.clone()
    }

    fn dimension(&self) -> usize {
        self.labels.len()
    }

    fn rhs(&self, state: &[T], out: &mut [T]) -> Result<()> {
        (self.field)(state, out);
        Ok(())
    }
}

/// States on a uniform grid, stored row-major (`node * dim + component`).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub grid: UniformGrid<T>,
    pub order: FractionalOrder<T>,
    pub model_name: String,
    dim: usize,
    data: Vec<T>,
}

/// A state component that dipped below zero by more than the allowed slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Undershoot<T> {
    pub node: usize,
    pub component: usize,
    pub value: T,
}

impl<T: Real> Trajectory<T> {
    /// Assembles a trajectory from row-major data; used when re-reading output.
    pub fn from_rows(
        grid: UniformGrid<T>,
        order: FractionalOrder<T>,
        model_name: impl Into<String>,
        dim: usize,
        data: Vec<T>,
    ) -> Result<Self> {
        if dim == 0 || data.len() != dim * grid.node_count() {
            return Err(Error::Dimension {
                expected: dim * grid.node_count(),
                got: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Divergence { node: i / dim });
        }
        Ok(Trajectory {
            grid,
            order,
            model_name: model_name.into(),
            dim,
            data,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn state(&self, k: usize) -> &[T] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    pub fn states(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn last_state(&self) -> &[T] {
        self.state(self.len() - 1)
    }

    pub fn rows(&self) -> &[T] {
        &self.data
    }

    /// One coordinate as a sampled signal.
    pub fn component(&self, c: usize) -> SampledSignal<T> {
        let values = self.states().map(|s| s[c]).collect();
        SampledSignal {
            grid: self.grid,
            values,
            first_node_copied: false,
        }
    }

    /// Components below `-rel_slack * scale`, where scale is the largest
    /// absolute state value on the trajectory. States are never clamped.
    pub fn undershoots(&self, rel_slack: T) -> Vec<Undershoot<T>> {
        let scale = self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let floor = -rel_slack * scale;
        self.states()
            .enumerate()
            .flat_map(|(node, s)| {
                s.iter()
                    .enumerate()
                    .filter(move |(_, &v)| v < floor)
                    .map(move |(component, &value)| Undershoot { node, component, value })
            })
            .collect()
    }
}

fn check_inputs<T: Real, M: ModelDefinition<T> + ?Sized>(model: &M, x0: &[T]) -> Result<()> {
    if x0.len() != model.dimension() {
        return Err(Error::Dimension {
            expected: model.dimension(),
            got: x0.len(),
        });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergence { node: 0 });
    }
    Ok(())
}

fn finite_or_diverged<T: Real>(v: &[T], node: usize) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Divergence { node })
    }
}

/// Fractional Adams–Bashforth–Moulton predictor–corrector with one corrector
/// pass (PECE) and full memory.
pub fn solve_fde_abm<T: Real, M: ModelDefinition<T> + ?Sized>(
    model: &M,
    order: FractionalOrder<T>,
    x0: &[T],
    grid: UniformGrid<T>,
) -> Result<Trajectory<T>> {
    solve_fde_abm_with_memory(model, order, x0, grid, Memory::Full)
}

/// [`solve_fde_abm`] with a selectable memory policy.
pub fn solve_fde_abm_with_memory<T: Real, M: ModelDefinition<T> + ?Sized>(
    model: &M,
    order: FractionalOrder<T>,
    x0: &[T],
    grid: UniformGrid<T>,
    memory: Memory,
) -> Result<Trajectory<T>> {
    check_inputs(model, x0)?;
    let dim = x0.len();
    let nodes = grid.node_count();
    let alpha = order.alpha();
    let mut kernels = adams_kernels(order, grid.h, nodes);
    memory.truncate(&mut kernels.predictor);
    memory.truncate(&mut kernels.corrector);
    let endpoint = kernels.corrector_scale;

    let mut f0 = vec![T::zero(); dim];
    model.rhs(x0, &mut f0)?;
    finite_or_diverged(&f0, 0)?;

    let mut data = vec![T::zero(); nodes * dim];
    data[..dim].copy_from_slice(x0);

    let mut first = f0.clone();
    first.extend(std::iter::repeat_n(T::zero(), dim));

    let mut pred = vec![T::zero(); dim];
    let mut fpred = vec![T::zero(); dim];
    let mut engine = HistoryEngine::new(nodes, dim, vec![kernels.predictor, kernels.corrector]);
    engine.run(&first, |k, hist, src| {
        let (hp, hc) = hist.split_at(dim);
        for c in 0..dim {
            pred[c] = x0[c] + hp[c];
        }
        finite_or_diverged(&pred, k)?;
        model.rhs(&pred, &mut fpred)?;
        let head = match memory {
            Memory::Window(w) if k > w => T::zero(),
            _ => adams_head(alpha, k, endpoint),
        };
        let row = &mut data[k * dim..(k + 1) * dim];
        for c in 0..dim {
            row[c] = x0[c] + head * f0[c] + hc[c] + endpoint * fpred[c];
        }
        finite_or_diverged(row, k)?;
        let (fk, rest) = src.split_at_mut(dim);
        model.rhs(row, fk)?;
        finite_or_diverged(fk, k)?;
        rest.copy_from_slice(fk);
        Ok(())
    })?;

    Ok(Trajectory {
        grid,
        order,
        model_name: model.name().to_string(),
        dim,
        data,
    })
}

/// Explicit Grünwald–Letnikov scheme
/// `h^-a sum_j w_j (u_{k-j} - u_0) = f(u_{k-1})`. First order; kept as an
/// independent cross-check of the Adams solver.
pub fn solve_fde_gl<T: Real, M: ModelDefinition<T> + ?Sized>(
    model: &M,
    order: FractionalOrder<T>,
    x0: &[T],
    grid: UniformGrid<T>,
) -> Result<Trajectory<T>> {
    check_inputs(model, x0)?;
    let dim = x0.len();
    let nodes = grid.node_count();
    let ha = grid.h.powf(order.alpha());
    let weights = gl_weights(order, nodes - 1);

    let mut data = vec![T::zero(); nodes * dim];
    data[..dim].copy_from_slice(x0);
    let mut fprev = vec![T::zero(); dim];
    model.rhs(x0, &mut fprev)?;
    finite_or_diverged(&fprev, 0)?;

    let mut engine = HistoryEngine::new(nodes, dim, vec![weights]);
    engine.run(&vec![T::zero(); dim], |k, hist, src| {
        let row = &mut data[k * dim..(k + 1) * dim];
        for c in 0..dim {
            row[c] = x0[c] + ha * fprev[c] - hist[c];
        }
        finite_or_diverged(row, k)?;
        for c in 0..dim {
            src[c] = row[c] - x0[c];
        }
        model.rhs(row, &mut fprev)?;
        finite_or_diverged(&fprev, k)
    })?;

    Ok(Trajectory {
        grid,
        order,
        model_name: model.name().to_string(),
        dim,
        data,
    })
}

/// Classical fourth-order Runge–Kutta for `u' = f(u)`.
pub fn solve_ode_rk4<T: Real, M: ModelDefinition<T> + ?Sized>(
    model: &M,
    x0: &[T],
    grid: UniformGrid<T>,
) -> Result<Trajectory<T>> {
    check_inputs(model, x0)?;
    let dim = x0.len();
    let nodes = grid.node_count();
    let h = grid.h;
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    let two = T::lit(2.0);

    let mut data = Vec::with_capacity(nodes * dim);
    data.extend_from_slice(x0);
    let mut x = x0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (
        vec![T::zero(); dim],
        vec![T::zero(); dim],
        vec![T::zero(); dim],
        vec![T::zero(); dim],
    );
    let mut tmp = vec![T::zero(); dim];
    for node in 1..nodes {
        model.rhs(&x, &mut k1)?;
        for c in 0..dim {
            tmp[c] = x[c] + half * h * k1[c];
        }
        model.rhs(&tmp, &mut k2)?;
        for c in 0..dim {
            tmp[c] = x[c] + half * h * k2[c];
        }
        model.rhs(&tmp, &mut k3)?;
        for c in 0..dim {
            tmp[c] = x[c] + h * k3[c];
        }
        model.rhs(&tmp, &mut k4)?;
        for c in 0..dim {
            x[c] = x[c] + h * sixth * (k1[c] + two * k2[c] + two * k3[c] + k4[c]);
        }
        finite_or_diverged(&x, node)?;
        data.extend_from_slice(&x);
    }
    Ok(Trajectory {
        grid,
        order: FractionalOrder::one(),
        model_name: model.name().to_string(),
        dim,
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay() -> FnModel<f64> {
        FnModel::new("decay", &["u"], |u: &[f64], out: &mut [f64]| out[0] = -u[0])
    }

    fn ord(a: f64) -> FractionalOrder<f64> {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn abm_classical_decay() {
        let g = UniformGrid::spanning(0.0, 1.0, 1000).unwrap();
        let tr = solve_fde_abm(&decay(), ord(1.0), &[1.0], g).unwrap();
        assert!((tr.last_state()[0] - (-1.0_f64).exp()).abs() < 1e-5);
        assert_eq!(tr.state(0), &[1.0]);
    }

    #[test]
    fn zero_field_is_constant() {
        let zero = FnModel::new("zero", &["u"], |_: &[f64], out: &mut [f64]| out[0] = 0.0);
        let g = UniformGrid::spanning(0.0, 3.0, 300).unwrap();
        for &a in &[0.3, 0.7, 1.0] {
            let tr = solve_fde_abm(&zero, ord(a), &[2.5], g).unwrap();
            assert!(tr.states().all(|s| s[0] == 2.5));
            let tr = solve_fde_gl(&zero, ord(a), &[2.0], g).unwrap();
            assert!(tr.states().all(|s| s[0] == 2.0));
        }
    }

    #[test]
    fn gl_classical_decay() {
        let g = UniformGrid::spanning(0.0, 1.0, 1000).unwrap();
        let tr = solve_fde_gl(&decay(), ord(1.0), &[1.0], g).unwrap();
        for (t, s) in g.times().zip(tr.states()) {
            assert!((s[0] - (-t).exp()).abs() < 5e-3);
        }
    }

    #[test]
    fn rk4_examples() {
        let g = UniformGrid::spanning(0.0, 1.0, 100).unwrap();
        let tr = solve_ode_rk4(&decay(), &[1.0], g).unwrap();
        assert!((tr.last_state()[0] - 0.367_879_441_171_442_3).abs() < 1e-8);

        let rot = FnModel::new("rotation", &["u", "v"], |x: &[f64], out: &mut [f64]| {
            out[0] = -x[1];
            out[1] = x[0];
        });
        let g = UniformGrid::spanning(0.0, std::f64::consts::FRAC_PI_2, 1000).unwrap();
        let tr = solve_ode_rk4(&rot, &[1.0, 0.0], g).unwrap();
        assert!(tr.last_state()[0].abs() < 1e-6 && (tr.last_state()[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn dimension_mismatch_is_contract_error() {
        let g = UniformGrid::spanning(0.0, 1.0, 10).unwrap();
        assert!(matches!(
            solve_fde_abm(&decay(), ord(0.5), &[1.0, 2.0], g),
            Err(Error::Dimension { expected: 1, got: 2 })
        ));
        assert!(solve_fde_gl(&decay(), ord(0.5), &[], g).is_err());
        assert!(solve_ode_rk4(&decay(), &[1.0, 1.0], g).is_err());
    }

    #[test]
    fn blow_up_reports_node() {
        let blow = FnModel::new("blow", &["u"], |u: &[f64], out: &mut [f64]| out[0] = u[0] * u[0]);
        let g = UniformGrid::spanning(0.0, 5.0, 500).unwrap();
        for res in [
            solve_fde_abm(&blow, ord(0.8), &[1.0], g),
            solve_fde_gl(&blow, ord(0.8), &[1.0], g),
            solve_ode_rk4(&blow, &[1.0], g),
        ] {
            match res {
                Err(Error::Divergence { node }) => assert!(node > 0 && node <= 500),
                other => panic!("expected divergence, got {other:?}"),
            }
        }
    }

    #[test]
    fn short_memory_matches_full_within_window() {
        let g = UniformGrid::spanning(0.0, 2.0, 400).unwrap();
        let full = solve_fde_abm(&decay(), ord(0.6), &[1.0], g).unwrap();
        let window = solve_fde_abm_with_memory(&decay(), ord(0.6), &[1.0], g, Memory::Window(500)).unwrap();
        assert_eq!(full, window);
        let short = solve_fde_abm_with_memory(&decay(), ord(0.6), &[1.0], g, Memory::Window(50)).unwrap();
        assert_eq!(full.state(50), short.state(50));
        assert_ne!(full.last_state(), short.last_state());
    }

    #[test]
    fn undershoot_report_flags_negative_components() {
        let g = UniformGrid::new(0.0, 1.0, 2).unwrap();
        let tr = Trajectory::from_rows(g, ord(1.0), "m", 2, vec![1.0, 0.0, 0.5, -1e-12, 0.2, -1e-3]).unwrap();
        let u = tr.undershoots(1e-8);
        assert_eq!(u.len(), 1);
        assert_eq!((u[0].node, u[0].component), (2, 1));
    }
}
