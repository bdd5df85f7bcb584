//! Uniform time grids, sampled signals and the fractional order newtype.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Order of a Caputo derivative, restricted to `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct FractionalOrder<T>(T);

impl<T: Real> FractionalOrder<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if alpha > T::zero() && alpha <= T::one() {
            Ok(FractionalOrder(alpha))
        } else {
            Err(Error::InvalidOrder(alpha.to_f64_lossy()))
        }
    }

    /// The classical first derivative.
    pub fn one() -> Self {
        FractionalOrder(T::one())
    }

    #[inline]
    pub fn alpha(self) -> T {
        self.0
    }

    #[inline]
    pub fn is_classical(self) -> bool {
        self.0 == T::one()
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for FractionalOrder<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let alpha = T::deserialize(d)?;
        FractionalOrder::new(alpha).map_err(serde::de::Error::custom)
    }
}

/// `n_steps + 1` equispaced nodes `t0 + k h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid<T> {
    pub t0: T,
    pub h: T,
    pub n_steps: usize,
}

impl<T: Real> UniformGrid<T> {
    pub fn new(t0: T, h: T, n_steps: usize) -> Result<Self> {
        if !(h > T::zero()) || !h.is_finite() {
            return Err(Error::Grid(format!("step size must be positive and finite, got {h}")));
        }
        if !t0.is_finite() {
            return Err(Error::Grid("t0 must be finite".into()));
        }
        if n_steps < 1 {
            return Err(Error::Grid("need at least one step".into()));
        }
        Ok(UniformGrid { t0, h, n_steps })
    }

    /// Grid on `[t0, t_end]` with `n_steps` equal steps.
    pub fn spanning(t0: T, t_end: T, n_steps: usize) -> Result<Self> {
        if n_steps < 1 {
            return Err(Error::Grid("need at least one step".into()));
        }
        if !(t_end > t0) {
            return Err(Error::Grid(format!("empty interval [{t0}, {t_end}]")));
        }
        Self::new(t0, (t_end - t0) / T::from_usize_lossy(n_steps), n_steps)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n_steps + 1
    }

    #[inline]
    pub fn time(&self, k: usize) -> T {
        self.t0 + T::from_usize_lossy(k) * self.h
    }

    pub fn t_end(&self) -> T {
        self.time(self.n_steps)
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.node_count()).map(move |k| self.time(k))
    }
}

/// Scalar samples on a [`UniformGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal<T> {
    pub grid: UniformGrid<T>,
    pub values: Vec<T>,
    /// Set when node 0 carries a copy of node 1 rather than its own estimate.
    pub first_node_copied: bool,
}

impl<T: Real> SampledSignal<T> {
    pub fn new(grid: UniformGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::Grid(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite sample at node {k}")));
        }
        Ok(SampledSignal {
            grid,
            values,
            first_node_copied: false,
        })
    }

    /// Samples `f` at every grid node.
    pub fn from_fn(grid: UniformGrid<T>, f: impl Fn(T) -> T) -> Result<Self> {
        let values = grid.times().map(f).collect();
        Self::new(grid, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest absolute sample.
    pub fn scale(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn last(&self) -> T {
        *self.values.last().expect("grid has at least two nodes")
    }
}
