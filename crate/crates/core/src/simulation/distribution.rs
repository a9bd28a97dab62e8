use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{simulate_thinning, ClusterOptions, ClusterSimulator, SeedSpec};
use crate::error::{invalid, Error, Result};
use crate::kernels::{HawkesParams, KernelSpec};

/// Empirical distribution of `N(t)` over independent replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountHistogram {
    pub t: f64,
    pub n_runs: u64,
    /// `frequencies[n]` replications ended with `n` events; the vector stops at
    /// the largest observed count.
    pub frequencies: Vec<u64>,
    pub mean: f64,
    pub std_error_of_mean: f64,
}

impl CountHistogram {
    pub fn from_counts(t: f64, counts: &[usize]) -> Result<Self> {
        if counts.is_empty() {
            return Err(invalid("counts", "need at least one replication"));
        }
        let max = counts.iter().copied().max().unwrap_or(0);
        let mut frequencies = vec![0u64; max + 1];
        for &c in counts {
            frequencies[c] += 1;
        }
        Self::from_frequencies(t, frequencies)
    }

    /// Rebuilds mean and standard error from raw frequencies.
    pub fn from_frequencies(t: f64, mut frequencies: Vec<u64>) -> Result<Self> {
        while frequencies.len() > 1 && frequencies.last() == Some(&0) {
            frequencies.pop();
        }
        let n_runs: u64 = frequencies.iter().sum();
        if n_runs == 0 {
            return Err(invalid("frequencies", "sum to zero"));
        }
        let n = n_runs as f64;
        let mean = frequencies.iter().enumerate().map(|(k, &f)| k as f64 * f as f64).sum::<f64>() / n;
        let ss: f64 = frequencies.iter().enumerate().map(|(k, &f)| f as f64 * (k as f64 - mean).powi(2)).sum();
        let variance = if n_runs > 1 { ss / (n - 1.0) } else { 0.0 };
        Ok(Self { t, n_runs, frequencies, mean, std_error_of_mean: (variance / n).sqrt() })
    }

    /// Relative frequency of `n`.
    pub fn probability(&self, n: usize) -> f64 {
        self.frequencies.get(n).map_or(0.0, |&f| f as f64 / self.n_runs as f64)
    }

    pub fn validate(&self) -> Result<()> {
        let sum: u64 = self.frequencies.iter().sum();
        if sum != self.n_runs {
            return Err(invalid("frequencies", format!("sum to {sum}, expected n_runs = {}", self.n_runs)));
        }
        Ok(())
    }
}

/// Path generator used by [`count_distribution_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Simulator {
    #[default]
    Cluster,
    Thinning,
}

/// Histogram of `N(t)` over `n_runs` cluster-simulated replications.
///
/// Replication `i` uses stream `i` of `seed`, so the result does not depend on
/// the number of worker threads.
pub fn count_distribution(
    params: &HawkesParams<f64>,
    spec: &KernelSpec<f64>,
    t: f64,
    n_runs: u64,
    seed: &SeedSpec,
) -> Result<CountHistogram> {
    count_distribution_with(Simulator::Cluster, params, spec, t, n_runs, seed)
}

pub fn count_distribution_with(
    simulator: Simulator,
    params: &HawkesParams<f64>,
    spec: &KernelSpec<f64>,
    t: f64,
    n_runs: u64,
    seed: &SeedSpec,
) -> Result<CountHistogram> {
    if n_runs < 100 {
        return Err(invalid("n_runs", format!("must be at least 100, got {n_runs}")));
    }
    let cluster = match simulator {
        Simulator::Cluster => Some(ClusterSimulator::new(params, spec, ClusterOptions::default())?),
        Simulator::Thinning => None,
    };
    let run = |i: u64| -> Result<usize> {
        match &cluster {
            Some(sim) => sim.count(t, seed, i),
            None => simulate_thinning(params, spec, t, seed, i).map(|s| s.len()),
        }
    };
    let results: Vec<Result<usize>> = (0..n_runs).into_par_iter().map(run).collect();
    let mut counts = Vec::with_capacity(results.len());
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(c) => counts.push(c),
            Err(e @ Error::EventCapExceeded { .. }) => return Err(e),
            Err(e) => return Err(Error::Replication { replication: i as u64, source: Box::new(e) }),
        }
    }
    CountHistogram::from_counts(t, &counts)
}

/// Total-variation distance `½ Σ |p₁(n) − p₂(n)|` between two histograms at the same `t`.
pub fn tv_distance(a: &CountHistogram, b: &CountHistogram) -> Result<f64> {
    if a.t != b.t {
        return Err(invalid("t", format!("histograms are at different times: {} and {}", a.t, b.t)));
    }
    let len = a.frequencies.len().max(b.frequencies.len());
    let sum: f64 = (0..len).map(|n| (a.probability(n) - b.probability(n)).abs()).sum();
    Ok((0.5 * sum).min(1.0))
}

/// Total-variation distance from a histogram to an exact pmf. Mass of `pmf`
/// beyond the histogram support counts in full.
pub fn tv_to_pmf(h: &CountHistogram, pmf: &[f64]) -> f64 {
    let len = h.frequencies.len().max(pmf.len());
    let inside: f64 = (0..len).map(|n| (h.probability(n) - pmf.get(n).copied().unwrap_or(0.0)).abs()).sum();
    let covered: f64 = pmf.iter().sum();
    (0.5 * (inside + (1.0 - covered).max(0.0))).min(1.0)
}

/// Poisson(`mean`) probabilities of `0..=n_max`.
pub fn poisson_pmf(mean: f64, n_max: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(n_max + 1);
    let mut term = (-mean).exp();
    for n in 0..=n_max {
        if n > 0 {
            term *= mean / n as f64;
        }
        p.push(term);
    }
    p
}

/// One-sample Kolmogorov–Smirnov statistic. Sorts `samples` in place.
pub fn ks_statistic<F>(samples: &mut [f64], cdf: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if samples.is_empty() {
        return Err(invalid("samples", "empty"));
    }
    samples.sort_unstable_by(f64::total_cmp);
    let n = samples.len() as f64;
    let values: Vec<f64> = samples.par_iter().map(|&x| cdf(x)).collect::<Result<_>>()?;
    Ok(values
        .iter()
        .enumerate()
        .map(|(i, &f)| (f - i as f64 / n).max((i + 1) as f64 / n - f))
        .fold(0.0, f64::max))
}

/// Two-sample Kolmogorov–Smirnov statistic. Sorts both inputs in place.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("samples", "empty"));
    }
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_statistics() {
        let h = CountHistogram::from_counts(1.0, &[0, 1, 1, 2, 6]).unwrap();
        assert_eq!(h.frequencies, vec![1, 2, 1, 0, 0, 0, 1]);
        assert_eq!(h.n_runs, 5);
        assert!((h.mean - 2.0).abs() < 1e-15);
        h.validate().unwrap();
    }

    #[test]
    fn tv_extremes() {
        let a = CountHistogram::from_counts(1.0, &[0, 0, 1]).unwrap();
        let b = CountHistogram::from_counts(1.0, &[3, 4]).unwrap();
        assert_eq!(tv_distance(&a, &a).unwrap(), 0.0);
        assert!((tv_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        let c = CountHistogram::from_counts(2.0, &[0]).unwrap();
        assert!(tv_distance(&a, &c).is_err());
    }

    #[test]
    fn two_sample_ks() {
        let mut a = vec![1.0, 2.0, 3.0];
        let mut b = vec![1.0, 2.0, 3.0];
        assert_eq!(ks_two_sample(&mut a, &mut b).unwrap(), 0.0);
        let mut c = vec![10.0, 11.0];
        assert_eq!(ks_two_sample(&mut a, &mut c).unwrap(), 1.0);
    }

    #[test]
    fn poisson_pmf_sums_to_one() {
        let p = poisson_pmf(3.0, 60);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }
}
