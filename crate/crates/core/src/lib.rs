//! Hawkes processes excited by the exponentially tempered Mittag-Leffler kernel.
//!
//! The numerical core ([`special`], [`kernels`], [`laplace`], [`intensity`]) is
//! generic over [`Real`] and works in `f32` or `f64`; the aliases below fix it
//! to `f64`. Simulation and the experiment runners are `f64` only.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod intensity;
pub mod kernels;
pub mod laplace;
pub mod quadrature;
pub mod scalar;
pub mod simulation;
pub mod special;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Params = kernels::HawkesParams<f64>;
pub type Kernel = kernels::KernelSpec<f64>;
pub type Curve = intensity::IntensityCurve<f64>;
pub type MlArgs = special::MlArgs<f64>;
