//! Monte-Carlo simulation of the process and of its counting distribution.
//!
//! Paths are generated by the branching (cluster) construction, which is exact
//! for every kernel variant. Ogata thinning is available for bounded kernels
//! and serves as an independent check of the cluster simulator.

mod cluster;
mod distribution;
mod sampler;
mod seed;
mod thinning;

pub use cluster::{simulate_cluster, ClusterOptions, ClusterSimulator, ClusterStats, DEFAULT_EVENT_CAP};
pub use distribution::{
    count_distribution, count_distribution_with, ks_statistic, ks_two_sample, poisson_pmf, tv_distance,
    tv_to_pmf, CountHistogram, Simulator,
};
pub use sampler::{positive_stable, sample_kernel_delay, sample_mittag_leffler_product, KernelSampler};
pub use seed::SeedSpec;
pub use thinning::simulate_thinning;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Event times of one path on `(0, horizon]`, in increasing order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSequence {
    pub horizon: f64,
    pub times: Vec<f64>,
}

impl EventSequence {
    /// Checks the horizon and that `times` is strictly increasing inside `(0, horizon]`.
    pub fn new(horizon: f64, times: Vec<f64>) -> Result<Self> {
        let seq = Self { horizon, times };
        seq.validate()?;
        Ok(seq)
    }

    pub fn validate(&self) -> Result<()> {
        check_horizon(self.horizon)?;
        let mut last = 0.0;
        for &t in &self.times {
            if !(t > last && t <= self.horizon) {
                return Err(invalid("times", format!("must be strictly increasing in (0, {}], found {t} after {last}", self.horizon)));
            }
            last = t;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `N(t)`, the number of events in `(0, t]`.
    pub fn count_until(&self, t: f64) -> usize {
        self.times.partition_point(|&x| x <= t)
    }
}

pub(crate) fn check_horizon(horizon: f64) -> Result<()> {
    if horizon > 0.0 && horizon.is_finite() {
        Ok(())
    } else {
        Err(invalid("horizon", format!("must be finite and positive, got {horizon}")))
    }
}

/// The smallest float above `t`, for `t ≥ 0`.
pub(crate) fn next_up(t: f64) -> f64 {
    f64::from_bits(t.to_bits() + 1)
}
