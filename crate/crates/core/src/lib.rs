//! Caputo fractional calculus, fractional ODE solvers and Lyapunov-functional
//! certificates, with the SICA and TEIV HIV models as concrete systems.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`, which is what the models use.

// Negated comparisons are deliberate: `!(x > 0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod caputo;
pub mod error;
pub mod gamma;
pub mod grid;
pub mod history;
pub mod lyapunov;
pub mod models;
pub mod newton;
pub mod quadrature;
pub mod real;
pub mod solver;

pub use caputo::{abm_weights, gl_weights, l1_caputo, l1_weights, AbmWeights};
pub use error::{Error, Result};
pub use gamma::gamma_fn;
pub use grid::{FractionalOrder, SampledSignal, UniformGrid};
pub use history::Memory;
pub use lyapunov::LyapunovFunctional;
pub use models::{Incidence, SicaParams, TeivParams};
pub use real::Real;
pub use solver::{
    solve_fde_abm, solve_fde_abm_with_memory, solve_fde_gl, solve_ode_rk4, FnModel, ModelDefinition, Trajectory,
};

pub type Order64 = FractionalOrder<f64>;
pub type Grid64 = UniformGrid<f64>;
pub type Signal64 = SampledSignal<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type Functional64 = LyapunovFunctional<f64>;

pub type Order32 = FractionalOrder<f32>;
pub type Grid32 = UniformGrid<f32>;
pub type Signal32 = SampledSignal<f32>;
pub type Trajectory32 = Trajectory<f32>;
