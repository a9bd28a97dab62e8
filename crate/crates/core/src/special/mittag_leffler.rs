//! Two- and three-parameter (Prabhakar) Mittag-Leffler functions for real arguments.
//!
//! ```text
//! M^c_{a,b}(z) = Σ_{n≥0} (c)_n z^n / (Γ(an + b) n!)
//! ```
//!
//! Three evaluation routes are combined:
//!
//! * the power series, summed in log-space so that `1/Γ(an+b)` never under- or
//!   overflows; accepted for negative `z` only when the cancellation between the
//!   alternating terms stays below the requested tolerance;
//! * inversion of the Laplace transform `s^{ac-b} / (s^a - z)^c` on an optimal
//!   parabolic contour (Garrappa, SIAM J. Numer. Anal. 53, 2015), with the residues of
//!   the poles lying to the right of the contour added back in closed form;
//! * for large `b` and large negative `z`, the upward recurrence
//!   `M_{a,b+a}(z) = (M_{a,b}(z) - 1/Γ(b)) / z`, which is stable once `|z|` dominates
//!   `b^a` (exactly the regime where the series cancels).
//!
//! Every routine also accepts a `log_scale` `L` and returns `e^{-L}·M`, so callers
//! multiplying by `e^{-νt}` or `(νt)^m/m!` can stay in range for large arguments.

use num_complex::Complex;

use super::gamma::{ln_gamma, recip_gamma};
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Term budget of the power series.
pub const SERIES_BUDGET: usize = 10_000;

/// Largest series peak index accepted for positive arguments before switching to the contour.
const POSITIVE_SERIES_PEAK: f64 = 5000.0;

/// Above this `b` the negative-argument path reduces `b` by the upward recurrence.
const RECURRENCE_B: f64 = 6.0;

/// Arguments of `M^c_{a,b}(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlArgs<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub z: T,
}

impl<T: Real> MlArgs<T> {
    pub fn new(a: T, b: T, c: T, z: T) -> Self {
        Self { a, b, c, z }
    }

    /// Two-parameter function (`c = 1`).
    pub fn two_param(a: T, b: T, z: T) -> Self {
        Self::new(a, b, T::one(), z)
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite and positive, got {v}")))
            }
        };
        positive("a", self.a)?;
        positive("b", self.b)?;
        positive("c", self.c)?;
        if !self.z.is_finite() {
            return Err(invalid("z", format!("must be finite, got {}", self.z)));
        }
        Ok(())
    }
}

fn validate_tol<T: Real>(tol: T) -> Result<()> {
    let lo = T::lit(1e-15).max(T::lit(4.0) * T::epsilon());
    if tol >= lo && tol <= T::lit(1e-6) {
        Ok(())
    } else {
        Err(invalid("tol", format!("must lie in [{lo}, 1e-6], got {tol}")))
    }
}

/// `M^c_{a,b}(z)` with absolute-or-relative error `tol` (in `[1e-15, 1e-6]`).
pub fn ml_three_param<T: Real>(args: MlArgs<T>, tol: T) -> Result<T> {
    ml_scaled(args, T::zero(), tol)
}

/// `M_{a,b}(z) = M^1_{a,b}(z)`.
pub fn ml_two_param<T: Real>(a: T, b: T, z: T, tol: T) -> Result<T> {
    ml_scaled(MlArgs::two_param(a, b, z), T::zero(), tol)
}

/// `e^{-log_scale} · M^c_{a,b}(z)`.
pub fn ml_scaled<T: Real>(args: MlArgs<T>, log_scale: T, tol: T) -> Result<T> {
    args.validate()?;
    validate_tol(tol)?;
    if !log_scale.is_finite() {
        return Err(invalid("log_scale", "must be finite"));
    }
    let value = evaluate(args, log_scale, tol)?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow { what: "Mittag-Leffler function" })
    }
}

fn evaluate<T: Real>(args: MlArgs<T>, log_scale: T, tol: T) -> Result<T> {
    let MlArgs { a, b, c, z } = args;
    let one = T::one();
    if z == T::zero() {
        return Ok(recip_gamma(b) * (-log_scale).exp());
    }
    if c == one && a == one && b == one {
        return Ok((z - log_scale).exp());
    }
    let target = tol.max(T::lit(64.0) * T::epsilon());

    if z > T::zero() {
        let peak = (z.powf(one / a) - b) / a;
        if peak.as_f64() <= POSITIVE_SERIES_PEAK {
            return match power_series(args, log_scale, target)? {
                Series::Converged { sum, .. } => Ok(sum),
                Series::Cancelled => unreachable!("positive series never cancels"),
            };
        }
        // every term is positive here, so a non-positive contour value is wrong
        return match contour(args, log_scale, tol)? {
            v if v > T::zero() => Ok(v),
            _ => Err(Error::NonConvergence { what: "Mittag-Leffler function (positive argument)", budget: SERIES_BUDGET }),
        };
    }

    if let Series::Converged { sum, max_term, terms } = power_series(args, log_scale, target)? {
        let rounding = T::epsilon() * max_term * T::from_usize_lossy(terms).sqrt();
        if rounding <= target * sum.abs() {
            return Ok(sum);
        }
    }
    if c == one && b > T::lit(RECURRENCE_B) {
        if let Some(v) = upward_recurrence(args, log_scale, tol)? {
            return Ok(v);
        }
    }
    match contour(args, log_scale, tol) {
        Err(Error::NonConvergence { .. }) => {
            saddle_contour(args, log_scale, tol).ok_or(Error::NonConvergence {
                what: "Mittag-Leffler function (no stable route for these arguments)",
                budget: SERIES_BUDGET,
            })
        }
        other => other,
    }
}

enum Series<T> {
    Converged { sum: T, max_term: T, terms: usize },
    Cancelled,
}

/// Log-space power series. For negative `z` the summation is abandoned as soon as
/// the largest term shows that rounding alone would exceed `target`.
fn power_series<T: Real>(args: MlArgs<T>, log_scale: T, target: T) -> Result<Series<T>> {
    let MlArgs { a, b, c, z } = args;
    let one = T::one();
    let ln_abs_z = z.abs().ln();
    let alternating = z < T::zero();
    let unit_c = c == one;
    let ln_gamma_c = if unit_c { T::zero() } else { ln_gamma(c) };

    let mut sum = T::zero();
    let mut max_term = T::zero();
    let mut prev = T::infinity();
    let mut first = T::zero();
    for n in 0..SERIES_BUDGET {
        let nf = T::from_usize_lossy(n);
        let mut log_term = nf * ln_abs_z - ln_gamma(a * nf + b) - log_scale;
        if !unit_c {
            log_term = log_term + ln_gamma(c + nf) - ln_gamma_c - ln_gamma(nf + one);
        }
        let magnitude = log_term.exp();
        if n == 0 {
            first = magnitude;
        }
        let term = if alternating && n % 2 == 1 { -magnitude } else { magnitude };
        sum = sum + term;
        max_term = max_term.max(magnitude);
        if alternating && T::epsilon() * max_term > target * first {
            return Ok(Series::Cancelled);
        }
        let decreasing = magnitude <= prev;
        prev = magnitude;
        if n > 0 && decreasing && magnitude <= T::epsilon() * sum.abs() * T::lit(0.5) {
            return Ok(Series::Converged { sum, max_term, terms: n + 1 });
        }
        if n > 0 && decreasing && magnitude == T::zero() {
            return Ok(Series::Converged { sum, max_term, terms: n + 1 });
        }
        if !magnitude.is_finite() {
            return Err(Error::Overflow { what: "Mittag-Leffler series" });
        }
    }
    Err(Error::NonConvergence {
        what: "Mittag-Leffler series",
        budget: SERIES_BUDGET,
    })
}

/// Reduce `b` into `(RECURRENCE_B - a, RECURRENCE_B]`, evaluate there, and climb back with
/// `M_{a,b+a} = (M_{a,b} - 1/Γ(b)) / z`. Returns `None` if the propagated relative
/// error exceeds `tol`.
fn upward_recurrence<T: Real>(args: MlArgs<T>, log_scale: T, tol: T) -> Result<Option<T>> {
    let MlArgs { a, b, z, .. } = args;
    let steps = ((b - T::lit(RECURRENCE_B)) / a).ceil();
    let Some(k) = steps.to_usize() else {
        return Ok(None);
    };
    let b0 = b - steps * a;
    let eps = T::epsilon();
    // the reduced value is far larger than the result and may not fit the scale
    let mut value = match evaluate(MlArgs::two_param(a, b0, z), log_scale, tol) {
        Ok(v) if v.is_finite() => v,
        Ok(_) | Err(Error::Overflow { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut error = T::lit(64.0) * eps;
    for j in 0..k {
        let bj = b0 + T::from_usize_lossy(j) * a;
        let ln_g = ln_gamma(bj);
        let reciprocal = (-ln_g - log_scale).exp();
        let diff = value - reciprocal;
        if diff == T::zero() {
            return Ok(None);
        }
        // exp(-lnΓ) inherits the absolute error of lnΓ as relative error
        let recip_err = eps * (T::lit(4.0) + ln_g.abs());
        error = (error * value.abs() + recip_err * reciprocal) / diff.abs() + eps;
        value = diff / z;
    }
    if error > tol {
        return Ok(None);
    }
    Ok(Some(value))
}

/// Inversion on the parabola `s = μ(1 + iu)²` through the saddle point of
/// `e^s s^{ac-b}`, with `μ = b - ac`. Suited to large `b` and negative `z`, where the
/// integrand on this contour has the magnitude of the result and nothing cancels.
/// The step is halved until two passes agree.
fn saddle_contour<T: Real>(args: MlArgs<T>, log_scale: T, tol: T) -> Option<T> {
    let MlArgs { a, b, c, z } = args;
    let exponent = a * c - b;
    let mu = (-exponent).max(T::one());
    let two = T::lit(2.0);
    let one = T::one();
    let integrand = |u: T| -> T {
        let w = Complex::new(one, u);
        let s = w * w * mu;
        let ds = Complex::new(T::zero(), two * mu) * w;
        let ln_s = s.ln();
        let denom = (ln_s * a).exp() - Complex::new(z, T::zero());
        let log_f = s + ln_s * exponent - denom.ln() * c - Complex::new(log_scale, T::zero());
        (log_f.exp() * ds).im
    };
    let eps = T::epsilon();
    // sum of Im g(kh) over k ≥ 1 until the tail is negligible
    let tail = |h: T, start: usize, stride: usize, scale: T| -> Option<(T, T)> {
        let mut acc = T::zero();
        let mut abs_acc = T::zero();
        let mut quiet = 0;
        let mut k = start;
        while k < 1_000_000 {
            let g = integrand(h * T::from_usize_lossy(k));
            if !g.is_finite() {
                return None;
            }
            acc = acc + g;
            abs_acc = abs_acc + g.abs();
            if g.abs() <= eps * scale * T::lit(0.01) {
                quiet += 1;
                if quiet >= 4 {
                    return Some((acc, abs_acc));
                }
            } else {
                quiet = 0;
            }
            k += stride;
        }
        None
    };
    let g0 = integrand(T::zero());
    let scale = g0.abs().max(T::min_positive_value());
    let mut h = T::lit(0.5) / mu.sqrt();
    let (mut acc, mut abs_acc) = tail(h, 1, 1, scale)?;
    acc = acc + g0 / two;
    abs_acc = abs_acc + g0.abs() / two;
    let mut previous = h * acc / T::PI();
    for _ in 0..12 {
        // halving the step only adds the odd nodes of the finer grid
        h = h / two;
        let (odd, odd_abs) = tail(h, 1, 2, scale)?;
        acc = acc + odd;
        abs_acc = abs_acc + odd_abs;
        let value = h * acc / T::PI();
        let rounding = eps * T::lit(16.0) * h * abs_acc / T::PI();
        if rounding > tol * value.abs() {
            return None;
        }
        if (value - previous).abs() <= tol * value.abs() {
            return Some(value);
        }
        previous = value;
    }
    None
}

// ---------------------------------------------------------------------------
// Optimal parabolic contour
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct ContourParams {
    mu: f64,
    h: f64,
    n: f64,
}

const NO_CONTOUR: ContourParams = ContourParams {
    mu: 0.0,
    h: 0.0,
    n: f64::INFINITY,
};

/// Parameters for a region bounded on both sides by singularities.
fn optimal_param_rb(
    phi_j: f64,
    phi_j1: f64,
    pj: f64,
    qj: f64,
    mut log_eps: f64,
    ln_eps_m: f64,
) -> ContourParams {
    let t = 1.0;
    let fac = 1.01_f64;
    let f_max = (log_eps - ln_eps_m).exp();

    let sq_phi_j = phi_j.sqrt();
    let threshold = 2.0 * ((log_eps - ln_eps_m) / t).sqrt();
    let sq_phi_j1 = phi_j1.sqrt().min(threshold - sq_phi_j);

    let small = 1.0e-14;
    let mut f_bar = 1.0;
    let region: Option<(f64, f64)> = if pj < small && qj < small {
        Some((sq_phi_j, sq_phi_j1))
    } else if pj < small {
        let f_min = if sq_phi_j > 0.0 {
            fac * (sq_phi_j / (sq_phi_j1 - sq_phi_j)).powf(qj)
        } else {
            fac
        };
        if f_min < f_max {
            f_bar = f_min + f_min / f_max * (f_max - f_min);
            let fq = f_bar.powf(-1.0 / qj);
            Some((sq_phi_j, (2.0 * sq_phi_j1 - fq * sq_phi_j) / (2.0 + fq)))
        } else {
            None
        }
    } else if qj < small {
        let f_min = fac * (sq_phi_j1 / (sq_phi_j1 - sq_phi_j)).powf(pj);
        if f_min < f_max {
            f_bar = f_min + f_min / f_max * (f_max - f_min);
            let fp = f_bar.powf(-1.0 / pj);
            Some(((2.0 * sq_phi_j + fp * sq_phi_j1) / (2.0 - fp), sq_phi_j1))
        } else {
            None
        }
    } else {
        let mut f_min = fac * (sq_phi_j + sq_phi_j1) / (sq_phi_j1 - sq_phi_j).powf(pj.max(qj));
        if f_min < f_max {
            f_min = f_min.max(1.5);
            f_bar = f_min + f_min / f_max * (f_max - f_min);
            let fp = f_bar.powf(-1.0 / pj);
            let fq = f_bar.powf(-1.0 / qj);
            let w = -phi_j1 * t / log_eps;
            let den = 2.0 + w - (1.0 + w) * fp + fq;
            let lo = ((2.0 + w + fq) * sq_phi_j + fp * sq_phi_j1) / den;
            let hi = (-(1.0 + w) * fq * sq_phi_j + (2.0 + w - (1.0 + w) * fp) * sq_phi_j1) / den;
            Some((lo, hi))
        } else {
            None
        }
    };

    let Some((sq_bar_j, sq_bar_j1)) = region else {
        return NO_CONTOUR;
    };
    log_eps -= f_bar.ln();
    let w = -sq_bar_j1 * sq_bar_j1 * t / log_eps;
    let mu = (((1.0 + w) * sq_bar_j + sq_bar_j1) / (2.0 + w)).powi(2);
    let h = -2.0 * std::f64::consts::PI / log_eps * (sq_bar_j1 - sq_bar_j)
        / ((1.0 + w) * sq_bar_j + sq_bar_j1);
    let n = ((1.0 - log_eps / t / mu).sqrt() / h).ceil();
    if mu.is_finite() && h.is_finite() && h > 0.0 && n.is_finite() {
        ContourParams { mu, h, n }
    } else {
        NO_CONTOUR
    }
}

/// Parameters for the unbounded region to the right of the last singularity.
fn optimal_param_ru(phi_j: f64, pj: f64, log_eps: f64, ln_eps_m: f64) -> ContourParams {
    use std::f64::consts::PI;
    let t = 1.0;
    let sq_phi_j = phi_j.sqrt();
    let mut phibar = if phi_j > 0.0 { phi_j * 1.01 } else { 0.01 };
    let mut sq_phibar = phibar.sqrt();
    let (f_min, f_max, f_tar) = (1.0_f64, 10.0_f64, 5.0_f64);

    let mut n;
    let mut a_coef;
    let mut sq_mu;
    let mut iterations = 0;
    loop {
        let phi_t = phibar * t;
        let log_eps_phi_t = log_eps / phi_t;
        n = (phi_t / PI * (1.0 - 3.0 * log_eps_phi_t / 2.0 + (1.0 - 2.0 * log_eps_phi_t).sqrt())).ceil();
        a_coef = PI * n / phi_t;
        sq_mu = sq_phibar * (4.0 - a_coef).abs() / (7.0 - (1.0 + 12.0 * a_coef).sqrt()).abs();
        let fbar = ((sq_phibar - sq_phi_j) / sq_mu).powf(-pj);
        let stop = pj < 1.0e-14 || (f_min < fbar && fbar < f_max);
        iterations += 1;
        if stop || iterations > 200 {
            break;
        }
        sq_phibar = f_tar.powf(-1.0 / pj) * sq_mu + sq_phi_j;
        phibar = sq_phibar * sq_phibar;
    }
    let mut mu = sq_mu * sq_mu;
    let mut h = (-3.0 * a_coef - 2.0 + 2.0 * (1.0 + 12.0 * a_coef).sqrt()) / (4.0 - a_coef) / n;

    let threshold = (log_eps - ln_eps_m) / t;
    if mu > threshold {
        let q = if pj.abs() < 1.0e-14 {
            0.0
        } else {
            f_tar.powf(-1.0 / pj) * mu.sqrt()
        };
        let phibar = (q + phi_j.sqrt()).powi(2);
        if phibar < threshold {
            let w = (ln_eps_m / (ln_eps_m - log_eps)).sqrt();
            let u = (-phibar * t / ln_eps_m).sqrt();
            mu = threshold;
            n = (w * log_eps / 2.0 / PI / (u * w - 1.0)).ceil();
            h = (ln_eps_m / (ln_eps_m - log_eps)).sqrt() / n;
        } else {
            return NO_CONTOUR;
        }
    }
    if mu.is_finite() && h.is_finite() && h > 0.0 && n.is_finite() && n > 0.0 {
        ContourParams { mu, h, n }
    } else {
        NO_CONTOUR
    }
}

const MAX_CONTOUR_NODES: f64 = 2000.0;

/// Laplace-transform inversion at t = 1 of `s^{ac-b}/(s^a - z)^c`.
fn contour<T: Real>(args: MlArgs<T>, log_scale: T, tol: T) -> Result<T> {
    use std::f64::consts::PI;
    let MlArgs { a, b, c, z } = args;
    let (af, bf, cf, zf) = (a.as_f64(), b.as_f64(), c.as_f64(), z.as_f64());
    let unit_c = c == T::one();
    let ln_eps_m = T::epsilon().as_f64().ln();
    let mut log_eps = (tol.as_f64() * 1e-2).max(1e-15).ln().max(ln_eps_m + 0.5);

    // Poles s* = |z|^{1/a} e^{i(θ + 2kπ)/a} on the principal sheet.
    let theta = if zf >= 0.0 { 0.0 } else { PI };
    let kmin = (-af / 2.0 - theta / (2.0 * PI)).ceil() as i64;
    let kmax = (af / 2.0 - theta / (2.0 * PI)).floor() as i64;
    let radius = zf.abs().powf(1.0 / af);
    let mut poles: Vec<(f64, Complex<f64>)> = (kmin..=kmax)
        .map(|k| {
            let s = Complex::from_polar(radius, (theta + 2.0 * k as f64 * PI) / af);
            ((s.re + s.norm()) / 2.0, s)
        })
        .filter(|(phi, _)| *phi > 1.0e-15 * radius.max(1.0))
        .collect();
    poles.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut s_star = vec![Complex::new(0.0, 0.0)];
    let mut phi = vec![0.0];
    for (p, s) in &poles {
        phi.push(*p);
        s_star.push(*s);
    }
    let j1_count = s_star.len();
    let mut p = vec![cf; j1_count];
    p[0] = (-2.0 * (af * cf - bf + 1.0)).max(0.0);
    let mut q = vec![cf; j1_count];
    q[j1_count - 1] = f64::INFINITY;
    phi.push(f64::INFINITY);

    let mut admissible: Vec<usize> = (0..j1_count)
        .filter(|&j| phi[j] < (log_eps - ln_eps_m) && phi[j] < phi[j + 1])
        .collect();
    if !unit_c {
        // Non-integer c turns poles into branch points: the contour must enclose them all.
        admissible.retain(|&j| j == j1_count - 1);
    }
    if admissible.is_empty() {
        return Err(Error::NonConvergence {
            what: "Mittag-Leffler contour (no admissible region)",
            budget: 0,
        });
    }

    let (region, params) = loop {
        let best = admissible
            .iter()
            .map(|&j| {
                let prm = if j + 1 < j1_count {
                    optimal_param_rb(phi[j], phi[j + 1], p[j], q[j], log_eps, ln_eps_m)
                } else {
                    optimal_param_ru(phi[j], p[j], log_eps, ln_eps_m)
                };
                (j, prm)
            })
            .min_by(|x, y| x.1.n.total_cmp(&y.1.n))
            .expect("non-empty");
        if best.1.n <= MAX_CONTOUR_NODES {
            break best;
        }
        log_eps += std::f64::consts::LN_10;
        if log_eps > (1e-5f64).ln() {
            return Err(Error::NonConvergence {
                what: "Mittag-Leffler contour",
                budget: MAX_CONTOUR_NODES as usize,
            });
        }
    };

    let mu = T::lit(params.mu);
    let h = T::lit(params.h);
    let nodes = params.n as usize;
    let two = T::lit(2.0);
    let exponent = a * c - b;
    let integrand = |u: T| -> Complex<T> {
        let s = Complex::new(mu * (T::one() - u * u), two * mu * u);
        let ds = Complex::new(-two * mu * u, two * mu);
        let ln_s = s.ln();
        let s_pow_a = (ln_s * a).exp();
        let denom = s_pow_a - Complex::new(z, T::zero());
        let log_f = s + ln_s * exponent - denom.ln() * c - Complex::new(log_scale, T::zero());
        log_f.exp() * ds
    };
    // Conjugate symmetry: the k and -k nodes combine into 2i·Im.
    let mut acc = integrand(T::zero()).im / two;
    for k in 1..=nodes {
        acc = acc + integrand(h * T::from_usize_lossy(k)).im;
    }
    let mut value = h * acc / T::PI();

    if unit_c {
        for s in &s_star[region + 1..] {
            let s = Complex::new(T::lit(s.re), T::lit(s.im));
            let res = (s.ln() * (T::one() - b) + s - Complex::new(log_scale, T::zero())).exp() / a;
            value = value + res.re;
        }
    }
    Ok(value)
}
