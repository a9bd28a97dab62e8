//! Draws from the kernel distribution.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Open01};

use crate::error::{invalid, Error, Result};
use crate::kernels::{kernel_cdf, kernel_density, KernelSpec, Shape};

const TABLE_NODES: usize = 512;
const TABLE_MASS: f64 = 1e-6;
/// Accuracy of the inverted CDF, in probability.
const PROBABILITY_TOL: f64 = 1e-10;
const CDF_TOL: f64 = 1e-13;
const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone)]
enum Method {
    Exponential { rate: f64 },
    Table(Table),
}

/// Inverse-transform sampler for one kernel; the CDF table is built once.
#[derive(Debug, Clone)]
pub struct KernelSampler {
    spec: KernelSpec<f64>,
    method: Method,
}

#[derive(Debug, Clone)]
struct Table {
    t: Vec<f64>,
    cdf: Vec<f64>,
    density: Vec<f64>,
}

impl KernelSampler {
    pub fn new(spec: &KernelSpec<f64>) -> Result<Self> {
        spec.validate()?;
        let shape = spec
            .shape()
            .ok_or_else(|| Error::Unsupported("the `None` kernel has no delay distribution".into()))?;
        // β = 1 is exponential with rate γ whatever ν is
        let method = if shape.beta == 1.0 {
            Method::Exponential { rate: shape.gamma }
        } else {
            Method::Table(Table::build(spec, &shape)?)
        };
        Ok(Self { spec: *spec, method })
    }

    pub fn spec(&self) -> &KernelSpec<f64> {
        &self.spec
    }

    /// The delay `t` with `F(t) = u`, for `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(invalid("u", format!("must lie in (0, 1), got {u}")));
        }
        match &self.method {
            Method::Exponential { rate } => Ok(-(-u).ln_1p() / rate),
            Method::Table(table) => table.invert(&self.spec, u),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        match &self.method {
            // −ln(U)/γ with U ∈ (0, 1]
            Method::Exponential { rate } => {
                let e: f64 = Exp1.sample(rng);
                Ok(e / rate)
            }
            Method::Table(_) => {
                let u: f64 = Open01.sample(rng);
                self.quantile(u)
            }
        }
    }
}

/// One draw from the kernel distribution. Builds the sampler on every call;
/// hold a [`KernelSampler`] to amortize the table.
pub fn sample_kernel_delay<R: Rng + ?Sized>(spec: &KernelSpec<f64>, rng: &mut R) -> Result<f64> {
    KernelSampler::new(spec)?.sample(rng)
}

fn cdf(spec: &KernelSpec<f64>, t: f64) -> Result<f64> {
    kernel_cdf(spec, t, CDF_TOL)
}

impl Table {
    fn build(spec: &KernelSpec<f64>, shape: &Shape<f64>) -> Result<Self> {
        // F(t) ≈ γ t^β / Γ(1+β) near the origin
        let gamma_1b = crate::special::gamma(1.0 + shape.beta)?;
        let mut lo = (TABLE_MASS * gamma_1b / shape.gamma).powf(1.0 / shape.beta);
        while cdf(spec, lo)? > TABLE_MASS {
            lo *= 0.5;
        }
        let mut hi = lo.max(1.0);
        let mut doublings = 0;
        while cdf(spec, hi)? < 1.0 - TABLE_MASS {
            hi *= 2.0;
            doublings += 1;
            if doublings > 200 {
                return Err(Error::NonConvergence { what: "kernel table upper end", budget: 200 });
            }
        }
        let ratio = (hi / lo).ln() / (TABLE_NODES - 1) as f64;
        let t: Vec<f64> = (0..TABLE_NODES).map(|i| lo * (ratio * i as f64).exp()).collect();
        let mut cdf_values = Vec::with_capacity(TABLE_NODES);
        let mut density = Vec::with_capacity(TABLE_NODES);
        let mut last = 0.0f64;
        for &x in &t {
            // rounding can break monotonicity by an ulp or so
            last = last.max(cdf(spec, x)?);
            cdf_values.push(last);
            density.push(kernel_density(spec, x)?);
        }
        Ok(Self { t, cdf: cdf_values, density })
    }

    fn invert(&self, spec: &KernelSpec<f64>, u: f64) -> Result<f64> {
        let n = self.t.len();
        if u <= self.cdf[0] {
            return solve(spec, u, 0.0, self.t[0], self.t[0] * 0.5);
        }
        if u >= self.cdf[n - 1] {
            let mut lo = self.t[n - 1];
            let mut hi = 2.0 * lo;
            let mut steps = 0;
            while cdf(spec, hi)? < u {
                lo = hi;
                hi *= 2.0;
                steps += 1;
                if steps > 2000 {
                    return Err(Error::NonConvergence { what: "kernel tail bracket", budget: 2000 });
                }
            }
            return solve(spec, u, lo, hi, 0.5 * (lo + hi));
        }
        // first node with F ≥ u
        let j = self.cdf.partition_point(|&f| f < u);
        let i = j - 1;
        let (t0, t1) = (self.t[i], self.t[j]);
        let (f0, f1) = (self.cdf[i], self.cdf[j]);
        let guess = if f1 > f0 {
            // cubic Hermite for t(F) with slopes 1/f at the nodes
            let h = f1 - f0;
            let x = (u - f0) / h;
            let (m0, m1) = (h / self.density[i], h / self.density[j]);
            let x2 = x * x;
            let x3 = x2 * x;
            let v = (2.0 * x3 - 3.0 * x2 + 1.0) * t0 + (x3 - 2.0 * x2 + x) * m0 + (-2.0 * x3 + 3.0 * x2) * t1 + (x3 - x2) * m1;
            if v > t0 && v < t1 && v.is_finite() {
                v
            } else {
                t0 + (t1 - t0) * x
            }
        } else {
            0.5 * (t0 + t1)
        };
        solve(spec, u, t0, t1, guess)
    }
}

/// Safeguarded Newton iteration for `F(t) = u` on the bracket `[lo, hi]`.
fn solve(spec: &KernelSpec<f64>, u: f64, mut lo: f64, mut hi: f64, mut t: f64) -> Result<f64> {
    for _ in 0..MAX_ITERATIONS {
        let f = cdf(spec, t)?;
        let residual = f - u;
        if residual.abs() <= PROBABILITY_TOL {
            return Ok(t);
        }
        if residual > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        if hi - lo <= 1e-12 * hi {
            return Ok(0.5 * (lo + hi));
        }
        let slope = kernel_density(spec, t)?;
        let newton = t - residual / slope;
        t = if newton > lo && newton < hi && newton.is_finite() {
            newton
        } else if lo > 0.0 {
            // bisect in log scale: the bracket can span many decades
            (lo * hi).sqrt()
        } else {
            0.5 * hi
        };
    }
    Err(Error::NonConvergence { what: "kernel quantile", budget: MAX_ITERATIONS })
}

/// Positive `β`-stable variate with Laplace transform `e^{−s^β}` (Kanter's representation).
pub fn positive_stable<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    if beta == 1.0 {
        return 1.0;
    }
    let u: f64 = Open01.sample(rng);
    let e: f64 = Exp1.sample(rng);
    let angle = std::f64::consts::PI * u;
    let ln_s = (beta * angle).sin().ln() + (1.0 - beta) / beta * ((1.0 - beta) * angle).sin().ln()
        - angle.sin().ln() / beta
        - (1.0 - beta) / beta * e.ln();
    ln_s.exp()
}

/// Mittag-Leffler distributed delay, Laplace transform `γ/(γ + s^β)`, drawn as
/// `(E/γ)^{1/β}·S_β` with `E` exponential and `S_β` positive stable.
///
/// Independent of the CDF machinery; serves as a second sampler for `ν = 0`.
pub fn sample_mittag_leffler_product<R: Rng + ?Sized>(beta: f64, gamma: f64, rng: &mut R) -> f64 {
    let e: f64 = Exp1.sample(rng);
    (e / gamma).powf(1.0 / beta) * positive_stable(beta, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulation::SeedSpec;

    #[test]
    fn exponential_quantile() {
        let s = KernelSampler::new(&KernelSpec::Exponential { gamma: 2.0 }).unwrap();
        assert!((s.quantile(0.5).unwrap() - 2f64.ln() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn table_quantile_inverts_cdf() {
        let spec = KernelSpec::TemperedML { beta: 0.7, nu: 0.3, gamma: 1.0 };
        let s = KernelSampler::new(&spec).unwrap();
        for &u in &[1e-9, 1e-6, 0.01, 0.3, 0.5, 0.9, 0.999_999, 0.999_999_9] {
            let t = s.quantile(u).unwrap();
            assert!((kernel_cdf(&spec, t, 1e-13).unwrap() - u).abs() < 1e-9, "u={u} t={t}");
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let spec = KernelSpec::MittagLeffler { beta: 0.6, gamma: 1.0 };
        let s = KernelSampler::new(&spec).unwrap();
        let seed = SeedSpec::new(3);
        let a: Vec<f64> = (0..5).map(|_| 0).scan(seed.stream(0), |r, _| Some(s.sample(r).unwrap())).collect();
        let b: Vec<f64> = (0..5).map(|_| 0).scan(seed.stream(0), |r, _| Some(s.sample(r).unwrap())).collect();
        assert_eq!(a, b);
    }
}
