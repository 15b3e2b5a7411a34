//! p-version local discontinuous Galerkin (LDG) toolkit for one-dimensional
//! convection-diffusion problems whose solutions carry algebraic
//! singularities.

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod fracfun;
pub mod ldg;
pub mod legendre;
pub mod mesh;
pub mod projection;
pub mod quadrature;
pub mod timestep;

pub use error::{Error, Result};
