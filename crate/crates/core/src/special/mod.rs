//! Special functions: Gamma and the Mittag-Leffler family.

mod gamma;
mod mittag_leffler;

pub use gamma::{gamma, ln_gamma, recip_gamma};
pub use mittag_leffler::{ml_scaled, ml_three_param, ml_two_param, MlArgs, SERIES_BUDGET};

/// Default tolerance shared by the series evaluations in this crate.
pub const DEFAULT_TOL: f64 = 1e-10;
