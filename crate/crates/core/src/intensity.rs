//! Expected intensity `λ(t) = E[Λ(t)]` and expected count `E[N(t)]`.
//!
//! With `D = (α − 1)γ + ν^β` the Laplace transform of the expected intensity is
//!
//! ```text
//! λ̃(s) = (Λ₀/s) · (γ − ν^β + (ν+s)^β) / (γ(1−α) − ν^β + (ν+s)^β)
//! ```
//!
//! and its inverse is
//!
//! ```text
//! λ(t) = Λ₀ [ (ν^β − γ)/D + (αγ/D) e^{−νt} Σ_m (νt)^m M_{β,m+1}(D t^β) ]
//!      = Λ₀ [ 1 + (αγ/D) (S(t) − 1) ],   S(t) = e^{−νt} Σ_m (νt)^m M_{β,m+1}(D t^β)
//! ```
//!
//! The second form is the one evaluated: it gives `λ(0) = Λ₀` exactly since `S(0) = 1`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernels::{ml_tol, tail_is_negligible, HawkesParams};
use crate::laplace::{invert_checked, Inversion};
use crate::quadrature::integrate;
use crate::scalar::Real;
use crate::special::{ml_scaled, MlArgs};

/// Default tolerance shared by the series evaluations.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Hard cap on the number of terms of the intensity and count series.
pub const INTENSITY_TERM_CAP: usize = 20_000;
/// `|D|` below which the closed form is not used.
pub const DEGENERATE_D: f64 = 1e-12;

/// How an intensity value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityPoint<T> {
    pub t: T,
    pub value: T,
    pub method: Method,
    pub error_estimate: T,
}

/// Sampled expected intensity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityCurve<T> {
    pub params: HawkesParams<T>,
    pub points: Vec<IntensityPoint<T>>,
}

impl<T: Real> IntensityCurve<T> {
    /// Checks that the grid is strictly increasing and every value positive.
    pub fn validate(&self) -> Result<()> {
        for w in self.points.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(invalid("grid", format!("not strictly increasing at t={}", w[1].t)));
            }
        }
        if let Some(p) = self.points.iter().find(|p| !(p.value > T::zero())) {
            return Err(invalid("grid", format!("non-positive intensity {} at t={}", p.value, p.t)));
        }
        if let Some(p) = self.points.iter().find(|p| p.t < T::zero()) {
            return Err(invalid("grid", format!("negative time {}", p.t)));
        }
        Ok(())
    }
}

fn check_time<T: Real>(t: T) -> Result<()> {
    if t >= T::zero() && t.is_finite() {
        Ok(())
    } else {
        Err(invalid("t", format!("must be finite and non-negative, got {t}")))
    }
}

fn checked_denominator<T: Real>(params: &HawkesParams<T>) -> Result<T> {
    let d = params.denominator();
    if d.abs() <= T::lit(DEGENERATE_D) {
        return Err(invalid(
            "params",
            format!("(alpha-1)*gamma + nu^beta = {d} is too close to zero for the closed form"),
        ));
    }
    Ok(d)
}

/// Laplace transform of the expected intensity at `Re(s) > 0`.
pub fn intensity_lt<T: Real>(params: &HawkesParams<T>, s: Complex<T>) -> Result<Complex<T>> {
    if !(s.re > T::zero()) || !s.im.is_finite() {
        return Err(invalid("s", format!("requires Re(s) > 0, got {s}")));
    }
    intensity_lt_continued(params, s)
}

/// Analytic continuation of [`intensity_lt`] to the plane cut along `(−∞, −ν]`.
/// The Talbot contour samples this region.
pub fn intensity_lt_continued<T: Real>(params: &HawkesParams<T>, s: Complex<T>) -> Result<Complex<T>> {
    if !(s.re.is_finite() && s.im.is_finite()) || (s.im == T::zero() && s.re + params.nu <= T::zero()) || s == Complex::from(T::zero()) {
        return Err(invalid("s", format!("lies on the branch cut or at the origin: {s}")));
    }
    let HawkesParams { lambda0, alpha, beta, nu, gamma } = *params;
    let nu_b = nu.powf(beta);
    let shifted = (s + nu).powf(beta);
    let numerator = Complex::from(gamma - nu_b) + shifted;
    let denominator = Complex::from(gamma * (T::one() - alpha) - nu_b) + shifted;
    if denominator.norm() < T::lit(1e-14) {
        return Err(Error::Pole { s: s.to_string() });
    }
    Ok(numerator / denominator * lambda0 / s)
}

/// Σ_m w(m) (νt)^m e^{−νt} M_{β,b0+m}(z), truncated once `m > νt` and the term and
/// the geometric estimate of the remaining tail are below `tol` relative to the
/// partial sum.
fn tempered_series<T: Real>(
    beta: T,
    b0: T,
    z: T,
    nut: T,
    tol: T,
    weight: impl Fn(usize) -> T,
) -> Result<T> {
    let ml = ml_tol(tol * T::lit(0.01));
    if nut == T::zero() {
        return Ok(weight(0) * ml_scaled(MlArgs::two_param(beta, b0, z), T::zero(), ml)?);
    }
    let ln_nut = nut.ln();
    let mut sum = T::zero();
    let mut previous = T::zero();
    for m in 0..INTENSITY_TERM_CAP {
        let mf = T::from_usize_lossy(m);
        let scale = nut - mf * ln_nut;
        let term = weight(m) * ml_scaled(MlArgs::two_param(beta, b0 + mf, z), scale, ml)?;
        sum = sum + term;
        if mf > nut && tail_is_negligible(term, previous, tol * (sum.abs() + T::min_positive_value())) {
            return Ok(sum);
        }
        previous = term;
    }
    Err(Error::NonConvergence { what: "expected intensity series", budget: INTENSITY_TERM_CAP })
}

/// Expected intensity from the closed-form series.
///
/// Fails when `α > 0` and `|(α−1)γ + ν^β| ≤ 1e-12`; [`intensity`] falls back to
/// inversion there.
pub fn intensity_analytic<T: Real>(params: &HawkesParams<T>, t: T, tol: T) -> Result<T> {
    params.validate()?;
    check_time(t)?;
    if params.alpha == T::zero() {
        return Ok(params.lambda0);
    }
    let d = checked_denominator(params)?;
    let HawkesParams { lambda0, alpha, beta, nu, gamma } = *params;
    if t == T::zero() {
        return Ok(lambda0);
    }
    let z = d * t.powf(beta);
    let s = tempered_series(beta, T::one(), z, nu * t, tol, |_| T::one())?;
    Ok(lambda0 * (T::one() + alpha * gamma / d * (s - T::one())))
}

/// Expected intensity by numerical inversion of [`intensity_lt`], with the
/// Talbot/Euler disagreement as error estimate. Returns `Λ₀` for `t < 1e-6`.
pub fn intensity_numeric<T: Real>(params: &HawkesParams<T>, t: T, tol: T) -> Result<Inversion<T>> {
    params.validate()?;
    if !(t > T::zero()) || !t.is_finite() {
        return Err(invalid("t", format!("must be finite and positive, got {t}")));
    }
    let lt = |s: Complex<T>| intensity_lt_continued(params, s);
    invert_checked(&lt, t, tol.max(T::lit(1e-8)), params.lambda0)
}

/// Expected intensity, by the closed form when available and by inversion otherwise.
pub fn intensity<T: Real>(params: &HawkesParams<T>, t: T, tol: T) -> Result<IntensityPoint<T>> {
    if params.alpha == T::zero() || params.denominator().abs() > T::lit(DEGENERATE_D) {
        let value = intensity_analytic(params, t, tol)?;
        return Ok(IntensityPoint { t, value, method: Method::Analytic, error_estimate: T::zero() });
    }
    let inv = if t == T::zero() {
        Inversion { value: params.lambda0, error_estimate: T::zero() }
    } else {
        intensity_numeric(params, t, tol)?
    };
    Ok(IntensityPoint { t, value: inv.value, method: Method::Numeric, error_estimate: inv.error_estimate })
}

/// Evaluates `method` on every grid point, in parallel, preserving grid order.
pub fn intensity_curve<T: Real>(params: &HawkesParams<T>, grid: &[T], method: Method, tol: T) -> Result<IntensityCurve<T>> {
    let points = grid
        .par_iter()
        .map(|&t| match method {
            Method::Analytic => intensity(params, t, tol),
            Method::Numeric => {
                let inv = if t == T::zero() {
                    Inversion { value: params.lambda0, error_estimate: T::zero() }
                } else {
                    intensity_numeric(params, t, tol)?
                };
                Ok(IntensityPoint { t, value: inv.value, method, error_estimate: inv.error_estimate })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let curve = IntensityCurve { params: *params, points };
    curve.validate()?;
    Ok(curve)
}

/// Long-run expected intensity `lim_{t→∞} λ(t) = lim_{s→0} s·λ̃(s)`.
///
/// `s·λ̃(s)` is continuous at `s = 0` for `α < 1`, so it is evaluated there
/// directly; the value is `Λ₀/(1 − α)` for every `ν`.
pub fn stationary_intensity<T: Real>(params: &HawkesParams<T>) -> Result<T> {
    params.validate()?;
    if !params.is_stationary() {
        return Err(invalid("alpha", format!("no stationary regime for alpha = {} >= 1", params.alpha)));
    }
    let HawkesParams { lambda0, alpha, beta, nu, gamma } = *params;
    let nu_b = nu.powf(beta);
    Ok(lambda0 * (gamma - nu_b + nu_b) / (gamma * (T::one() - alpha) - nu_b + nu_b))
}

/// Geometric-series expression for the long-run intensity, obtained by expanding
/// `λ̃(s)` around `s = 0` in powers of `(ν+s)^β`:
///
/// ```text
/// Λ₀(γ − ν^β)/(γ(1−α) − ν^β) · Σ_n [ r₁^n + ν^β r₂^n ],
/// r₁ = ν^β/D,  r₂ = ν^β/(D(γ − ν^β))
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesLimit<T> {
    pub ratio_first: T,
    pub ratio_second: T,
    /// `None` when a ratio has modulus ≥ 1 and the series diverges.
    pub value: Option<T>,
}

/// Sums the geometric-series expression where it converges. See [`SeriesLimit`].
pub fn stationary_intensity_series<T: Real>(params: &HawkesParams<T>) -> Result<SeriesLimit<T>> {
    params.validate()?;
    let HawkesParams { lambda0, alpha, beta, nu, gamma } = *params;
    let nu_b = nu.powf(beta);
    let d = params.denominator();
    let rate = gamma - nu_b;
    let r1 = nu_b / d;
    let r2 = nu_b / (d * rate);
    let lead = gamma * (T::one() - alpha) - nu_b;
    let converges = r1.abs() < T::one() && r2.abs() < T::one() && lead != T::zero() && r1.is_finite() && r2.is_finite();
    let value = converges.then(|| lambda0 * rate / lead * (T::one() / (T::one() - r1) + nu_b / (T::one() - r2)));
    Ok(SeriesLimit { ratio_first: r1, ratio_second: r2, value })
}

/// Final-value limit next to the geometric-series expression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryReport<T> {
    pub final_value: T,
    pub series: SeriesLimit<T>,
    /// `|series − final_value| / final_value` where the series converges.
    pub relative_gap: Option<T>,
}

pub fn stationary_report<T: Real>(params: &HawkesParams<T>) -> Result<StationaryReport<T>> {
    let final_value = stationary_intensity(params)?;
    let series = stationary_intensity_series(params)?;
    let relative_gap = series.value.map(|v| (v - final_value).abs() / final_value.abs());
    Ok(StationaryReport { final_value, series, relative_gap })
}

/// Expected number of events on `[0, t]`:
///
/// ```text
/// E[N(t)] = Λ₀ [ t + (αγ/D) (e^{−νt} Σ_k (k+1) ν^k t^{k+1} M_{β,k+2}(D t^β) − t) ]
/// ```
///
/// Same degenerate case as [`intensity_analytic`].
pub fn expected_count<T: Real>(params: &HawkesParams<T>, t: T, tol: T) -> Result<T> {
    params.validate()?;
    check_time(t)?;
    if params.alpha == T::zero() {
        return Ok(params.lambda0 * t);
    }
    let d = checked_denominator(params)?;
    let HawkesParams { lambda0, alpha, beta, nu, gamma } = *params;
    if t == T::zero() {
        return Ok(T::zero());
    }
    let z = d * t.powf(beta);
    let s = tempered_series(beta, T::lit(2.0), z, nu * t, tol, |k| t * T::from_usize_lossy(k + 1))?;
    Ok(lambda0 * (t + alpha * gamma / d * (s - t)))
}

/// [`expected_count`] verified against adaptive quadrature of [`intensity_analytic`].
/// Fails when the two differ by more than `rel_tol` relative.
pub fn expected_count_checked(params: &HawkesParams<f64>, t: f64, tol: f64, rel_tol: f64) -> Result<(f64, f64)> {
    let series = expected_count(params, t, tol)?;
    let mut failure = None;
    let (quad, _) = integrate(
        |u| match intensity_analytic(params, u, tol) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        t,
        1e-13 * t.max(1.0),
        1e-11,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    if (series - quad).abs() > rel_tol * quad.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NonConvergence { what: "expected count cross-check", budget: 0 });
    }
    Ok((series, quad))
}
