//! Numerical laboratory for the renormalization-group flow of the
//! two-dimensional hierarchical Coulomb gas.
//!
//! The effective potential `u(t, x)` of the sine-Gordon representation obeys
//! the quasilinear parabolic equation
//!
//! ```text
//! v_t = α (v_xx − 2 v v_x) + 2 v,        v = u_x,  α = β / 4π,
//! ```
//!
//! on odd 2π-periodic functions. The crate provides
//!
//! * [`field_grid`]: sine/cosine spectral grid functions,
//! * [`rg_flow`]: exponential-integrator time stepping and monitors,
//! * [`equilibria`]: the stationary solutions `ψ_j^±` via a period function,
//! * [`stability`]: linearized spectra, shooting criterium, Liapunov functional,
//! * [`discrete_rg`]: the block-spin map on charge activities.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discrete_rg;
pub mod equilibria;
mod error;
pub mod field_grid;
mod ode;
pub mod quadrature;
pub mod rg_flow;
mod spectral;
pub mod stability;
mod tridiag;

pub use error::{Error, Result};
pub use field_grid::{GridFunction, NormKind, Parity};

/// Crate version, embedded in exported files.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
