use rand_distr::{Distribution, Open01, Poisson};

use super::{check_horizon, next_up, EventSequence, KernelSampler, SeedSpec};
use crate::error::{invalid, Error, Result};
use crate::kernels::{HawkesParams, KernelSpec};

/// Default limit on the number of events in one path.
pub const DEFAULT_EVENT_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterOptions {
    /// Permit `alpha ≥ 1`; such paths grow without bound and rely on the cap.
    pub allow_supercritical: bool,
    pub event_cap: usize,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        Self { allow_supercritical: false, event_cap: DEFAULT_EVENT_CAP }
    }
}

/// Offspring bookkeeping of one path.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClusterStats {
    pub immigrants: usize,
    /// Events in `(0, T]`; each of them had its children drawn.
    pub parents: usize,
    /// Children drawn, including those discarded beyond the horizon.
    pub children: usize,
}

/// Cluster simulator with the kernel sampler built once.
#[derive(Debug, Clone)]
pub struct ClusterSimulator {
    lambda0: f64,
    offspring: Option<Poisson<f64>>,
    sampler: Option<KernelSampler>,
    options: ClusterOptions,
}

impl ClusterSimulator {
    pub fn new(params: &HawkesParams<f64>, spec: &KernelSpec<f64>, options: ClusterOptions) -> Result<Self> {
        params.validate()?;
        spec.validate()?;
        if params.alpha >= 1.0 && !options.allow_supercritical {
            return Err(invalid(
                "alpha",
                format!("{} is not subcritical; enable supercritical simulation explicitly", params.alpha),
            ));
        }
        let excited = params.alpha > 0.0 && *spec != KernelSpec::None;
        let (offspring, sampler) = if excited {
            let poisson = Poisson::new(params.alpha).map_err(|e| invalid("alpha", e.to_string()))?;
            (Some(poisson), Some(KernelSampler::new(spec)?))
        } else {
            (None, None)
        };
        Ok(Self { lambda0: params.lambda0, offspring, sampler, options })
    }

    pub fn run(&self, horizon: f64, seed: &SeedSpec, replication: u64) -> Result<EventSequence> {
        self.run_with_stats(horizon, seed, replication).map(|(seq, _)| seq)
    }

    pub fn run_with_stats(&self, horizon: f64, seed: &SeedSpec, replication: u64) -> Result<(EventSequence, ClusterStats)> {
        check_horizon(horizon)?;
        let mut rng = seed.stream(replication);
        let cap = self.options.event_cap;
        let overflow = || Error::EventCapExceeded { cap, replication };

        let immigrants = Poisson::new(self.lambda0 * horizon)
            .map_err(|e| invalid("lambda0", e.to_string()))?
            .sample(&mut rng) as usize;
        if immigrants > cap {
            return Err(overflow());
        }
        let mut times: Vec<f64> = (0..immigrants)
            .map(|_| {
                let u: f64 = Open01.sample(&mut rng);
                u * horizon
            })
            .collect();
        let mut stats = ClusterStats { immigrants, ..Default::default() };

        if let (Some(offspring), Some(sampler)) = (&self.offspring, &self.sampler) {
            // `times[next..]` are events whose children are not drawn yet
            let mut next = 0;
            while next < times.len() {
                let parent = times[next];
                next += 1;
                let k = offspring.sample(&mut rng) as usize;
                stats.children += k;
                for _ in 0..k {
                    let delay = sampler.sample(&mut rng)?;
                    // delays below the float resolution would tie with the parent
                    let child = (parent + delay).max(next_up(parent));
                    if child <= horizon {
                        if times.len() == cap {
                            return Err(overflow());
                        }
                        times.push(child);
                    }
                }
            }
        }
        stats.parents = times.len();
        times.sort_unstable_by(f64::total_cmp);
        Ok((EventSequence { horizon, times }, stats))
    }

    /// `N(horizon)` of one path.
    pub fn count(&self, horizon: f64, seed: &SeedSpec, replication: u64) -> Result<usize> {
        self.run_with_stats(horizon, seed, replication).map(|(_, s)| s.parents)
    }
}

/// One path of the process on `(0, horizon]` by the branching construction.
///
/// Immigrants arrive as a Poisson process of rate `lambda0`; every event has a
/// Poisson(`alpha`) number of children, delayed by independent kernel draws.
/// Children falling after the horizon are dropped together with their
/// descendants, which all fall later still.
pub fn simulate_cluster(
    params: &HawkesParams<f64>,
    spec: &KernelSpec<f64>,
    horizon: f64,
    seed: &SeedSpec,
    replication: u64,
) -> Result<EventSequence> {
    ClusterSimulator::new(params, spec, ClusterOptions::default())?.run(horizon, seed, replication)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supercritical_needs_opt_in_and_hits_cap() {
        let p = HawkesParams::new(1.0, 1.5, 1.0, 0.0, 1.0).unwrap();
        let k = KernelSpec::Exponential { gamma: 1.0 };
        assert!(ClusterSimulator::new(&p, &k, ClusterOptions::default()).is_err());
        let opts = ClusterOptions { allow_supercritical: true, event_cap: 1000 };
        let sim = ClusterSimulator::new(&p, &k, opts).unwrap();
        let err = sim.run(100.0, &SeedSpec::new(1), 7).unwrap_err();
        assert!(matches!(err, Error::EventCapExceeded { cap: 1000, replication: 7 }));
    }

    #[test]
    fn paths_are_sorted_and_inside_horizon() {
        let p = HawkesParams::new(2.0, 0.6, 0.7, 0.5, 1.0).unwrap();
        let sim = ClusterSimulator::new(&p, &p.kernel(), ClusterOptions::default()).unwrap();
        for r in 0..20 {
            let seq = sim.run(5.0, &SeedSpec::new(9), r).unwrap();
            seq.validate().unwrap();
        }
    }
}
