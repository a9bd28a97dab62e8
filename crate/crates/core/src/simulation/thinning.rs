use rand_distr::{Distribution, Exp1, Open01};

use super::{check_horizon, EventSequence, SeedSpec, DEFAULT_EVENT_CAP};
use crate::error::{Error, Result};
use crate::kernels::{HawkesParams, KernelSpec};

/// One path by Ogata thinning, for bounded non-increasing kernels only
/// (`Exponential`, `None`, or a tempered kernel with `beta = 1`).
///
/// Between events the intensity `lambda0 + E(t)` decays, so its value just
/// after the last event or rejected candidate bounds it until the next one.
pub fn simulate_thinning(
    params: &HawkesParams<f64>,
    spec: &KernelSpec<f64>,
    horizon: f64,
    seed: &SeedSpec,
    replication: u64,
) -> Result<EventSequence> {
    params.validate()?;
    spec.validate()?;
    check_horizon(horizon)?;
    if !spec.is_bounded() {
        return Err(Error::Unsupported(
            "thinning needs a bounded kernel; the density is unbounded at the origin for beta < 1".into(),
        ));
    }
    // `None` has no excitation; otherwise f(t) = γ e^{−γt}
    let decay = spec.shape().map(|s| s.gamma);
    let jump = decay.map_or(0.0, |g| params.alpha * g);
    let mut rng = seed.stream(replication);
    let mut times = Vec::new();
    let mut now = 0.0;
    // excitation E at `now`
    let mut excitation = 0.0;
    loop {
        let bound = params.lambda0 + excitation;
        let wait: f64 = Exp1.sample(&mut rng);
        let candidate = now + wait / bound;
        if candidate > horizon {
            break;
        }
        if let Some(g) = decay {
            excitation *= (-g * (candidate - now)).exp();
        }
        now = candidate;
        let u: f64 = Open01.sample(&mut rng);
        if u * bound <= params.lambda0 + excitation {
            if times.len() == DEFAULT_EVENT_CAP {
                return Err(Error::EventCapExceeded { cap: DEFAULT_EVENT_CAP, replication });
            }
            times.push(now);
            excitation += jump;
        }
    }
    Ok(EventSequence { horizon, times })
}
