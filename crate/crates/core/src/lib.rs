//! Filtered Lie splitting for the cubic nonlinear Schrodinger equation
//! `i u_t = -Delta u - mu |u|^2 u` on the torus `[0, 2pi)^2`, with a
//! convergence harness for rough random data and discrete Bourgain-norm
//! diagnostics.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod convergence;
pub mod error;
pub mod exec;
pub mod integrators;
pub mod io;
pub mod norms;
pub mod rough_data;
pub mod spectral;

pub use error::{Error, Result};
