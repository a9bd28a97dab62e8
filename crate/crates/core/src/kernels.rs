//! Excitation kernels: the tempered Mittag-Leffler density and its special cases.
//!
//! With `β ∈ (0, 1]`, `ν ≥ 0`, `γ > 0` the kernel has Laplace transform
//!
//! ```text
//! f̃(s) = γ / (γ − ν^β + (ν + s)^β)
//! ```
//!
//! and time-domain density and distribution function
//!
//! ```text
//! f(t) = γ e^{−νt} t^{β−1} M_{β,β}(−(γ − ν^β) t^β)
//! F(t) = γ e^{−νt} Σ_{m≥0} ν^m t^{β+m} M_{β,β+m+1}(−(γ − ν^β) t^β)
//! ```
//!
//! At `β = 1` the transform is `γ/(γ + s)` whatever `ν` is: tempering has no
//! effect on an exponential kernel. The formulas above reproduce this without a
//! special case (`e^{−νt}·e^{−(γ−ν)t} = e^{−γt}`).

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;
use crate::special::{ml_scaled, MlArgs, SERIES_BUDGET};

/// Parameters of the Hawkes process with tempered Mittag-Leffler kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HawkesParams<T> {
    /// Baseline intensity.
    pub lambda0: T,
    /// Jump size, equal to the branching ratio.
    pub alpha: T,
    /// Fractional index in `(0, 1]`.
    pub beta: T,
    /// Tempering rate.
    pub nu: T,
    /// Time-scale factor.
    pub gamma: T,
}

impl<T: Real> HawkesParams<T> {
    pub fn new(lambda0: T, alpha: T, beta: T, nu: T, gamma: T) -> Result<Self> {
        let p = Self { lambda0, alpha, beta, nu, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |name, v: T| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite, got {v}")))
            }
        };
        finite("lambda0", self.lambda0)?;
        finite("alpha", self.alpha)?;
        finite("beta", self.beta)?;
        finite("nu", self.nu)?;
        finite("gamma", self.gamma)?;
        if !(self.lambda0 > T::zero()) {
            return Err(invalid("lambda0", format!("must be positive, got {}", self.lambda0)));
        }
        if !(self.alpha >= T::zero()) {
            return Err(invalid("alpha", format!("must be non-negative, got {}", self.alpha)));
        }
        if !(self.beta > T::zero() && self.beta <= T::one()) {
            return Err(invalid("beta", format!("must lie in (0, 1], got {}", self.beta)));
        }
        if !(self.nu >= T::zero()) {
            return Err(invalid("nu", format!("must be non-negative, got {}", self.nu)));
        }
        if !(self.gamma > T::zero()) {
            return Err(invalid("gamma", format!("must be positive, got {}", self.gamma)));
        }
        Ok(())
    }

    /// Subcritical regime: the branching ratio `alpha` is below one.
    pub fn is_stationary(&self) -> bool {
        self.alpha < T::one()
    }

    /// The tempered kernel these parameters describe.
    pub fn kernel(&self) -> KernelSpec<T> {
        KernelSpec::TemperedML { beta: self.beta, nu: self.nu, gamma: self.gamma }
    }

    /// `(α − 1)γ + ν^β`, the argument scale of the intensity series.
    pub fn denominator(&self) -> T {
        (self.alpha - T::one()) * self.gamma + self.nu.powf(self.beta)
    }
}

/// Excitation kernel variants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec<T> {
    #[serde(rename = "tempered_ml")]
    TemperedML { beta: T, nu: T, gamma: T },
    /// `TemperedML` with `nu = 0`.
    MittagLeffler { beta: T, gamma: T },
    /// `TemperedML` with `beta = 1, nu = 0`.
    Exponential { gamma: T },
    /// No excitation: the process is homogeneous Poisson.
    None,
}

/// Canonical `(β, ν, γ)` of a kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Shape<T> {
    pub beta: T,
    pub nu: T,
    pub gamma: T,
}

impl<T: Real> Shape<T> {
    /// `γ − ν^β`; the density's Mittag-Leffler argument is `−rate·t^β`.
    fn rate(&self) -> T {
        self.gamma - self.nu.powf(self.beta)
    }
}

impl<T: Real> KernelSpec<T> {
    pub(crate) fn shape(&self) -> Option<Shape<T>> {
        match *self {
            KernelSpec::TemperedML { beta, nu, gamma } => Some(Shape { beta, nu, gamma }),
            KernelSpec::MittagLeffler { beta, gamma } => Some(Shape { beta, nu: T::zero(), gamma }),
            KernelSpec::Exponential { gamma } => Some(Shape { beta: T::one(), nu: T::zero(), gamma }),
            KernelSpec::None => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Some(s) = self.shape() else { return Ok(()) };
        if !(s.beta > T::zero() && s.beta <= T::one()) {
            return Err(invalid("beta", format!("must lie in (0, 1], got {}", s.beta)));
        }
        if !(s.nu >= T::zero() && s.nu.is_finite()) {
            return Err(invalid("nu", format!("must be finite and non-negative, got {}", s.nu)));
        }
        if !(s.gamma > T::zero() && s.gamma.is_finite()) {
            return Err(invalid("gamma", format!("must be finite and positive, got {}", s.gamma)));
        }
        Ok(())
    }

    /// Bounded and non-increasing densities (the ones thinning can handle).
    pub fn is_bounded(&self) -> bool {
        match self.shape() {
            None => true,
            Some(s) => s.beta == T::one(),
        }
    }

    fn checked_shape(&self, what: &str) -> Result<Shape<T>> {
        self.validate()?;
        self.shape()
            .ok_or_else(|| Error::Unsupported(format!("{what} is undefined for the `None` kernel")))
    }
}

pub(crate) fn ml_tol<T: Real>(tol: T) -> T {
    let lo = T::lit(1e-14).max(T::lit(4.0) * T::epsilon());
    tol.max(lo).min(T::lit(1e-6))
}

/// Kernel density at `t > 0`.
pub fn kernel_density<T: Real>(spec: &KernelSpec<T>, t: T) -> Result<T> {
    let s = spec.checked_shape("kernel density")?;
    if !(t > T::zero()) || !t.is_finite() {
        return Err(invalid("t", format!("must be finite and positive, got {t}")));
    }
    let z = -s.rate() * t.powf(s.beta);
    let tol = ml_tol(T::lit(1e-13));
    let m = ml_scaled(MlArgs::two_param(s.beta, s.beta, z), s.nu * t, tol)?;
    Ok(s.gamma * t.powf(s.beta - T::one()) * m)
}

/// Kernel Laplace transform at complex `s` with `Re(s) > 0`.
pub fn kernel_lt<T: Real>(spec: &KernelSpec<T>, s: Complex<T>) -> Result<Complex<T>> {
    spec.checked_shape("kernel transform")?;
    if !(s.re > T::zero()) || !s.im.is_finite() {
        return Err(invalid("s", format!("requires Re(s) > 0, got {s}")));
    }
    kernel_lt_continued(spec, s)
}

/// Analytic continuation of [`kernel_lt`] to the plane cut along `(−∞, −ν]`.
pub fn kernel_lt_continued<T: Real>(spec: &KernelSpec<T>, s: Complex<T>) -> Result<Complex<T>> {
    let k = spec.checked_shape("kernel transform")?;
    if !(s.re.is_finite() && s.im.is_finite()) || (s.im == T::zero() && s.re + k.nu <= T::zero() && k.beta < T::one()) {
        return Err(invalid("s", format!("lies on the branch cut: {s}")));
    }
    let value = Complex::from(k.gamma) / (Complex::from(k.rate()) + (s + k.nu).powf(k.beta));
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::Pole { s: s.to_string() })
    }
}

/// Kernel distribution function `F(t)`, clamped to `[0, 1]`.
///
/// For large `νt` the series has about `νt` terms whose Mittag-Leffler factors are
/// evaluated in log space; the attainable absolute accuracy is then about
/// `1e-15·νt` rather than `tol`.
pub fn kernel_cdf<T: Real>(spec: &KernelSpec<T>, t: T, tol: T) -> Result<T> {
    let k = spec.checked_shape("kernel distribution function")?;
    if !(t >= T::zero()) || t.is_nan() {
        return Err(invalid("t", format!("must be non-negative, got {t}")));
    }
    if t == T::zero() {
        return Ok(T::zero());
    }
    if t.is_infinite() {
        return Ok(T::one());
    }
    // many terms contribute; each must be well inside the series tolerance
    let ml = ml_tol(tol * T::lit(0.01));
    let z = -k.rate() * t.powf(k.beta);
    let prefactor = k.gamma * t.powf(k.beta);
    let nut = k.nu * t;
    if nut == T::zero() {
        let m = ml_scaled(MlArgs::two_param(k.beta, k.beta + T::one(), z), T::zero(), ml)?;
        return Ok(clamp_unit(prefactor * m));
    }
    // term m carries (νt)^m e^{−νt}; fold it into the scale of the ML evaluation
    let ln_nut = nut.ln();
    let mut sum = T::zero();
    let mut previous = T::zero();
    for m in 0..SERIES_BUDGET {
        let mf = T::from_usize_lossy(m);
        let b = k.beta + mf + T::one();
        let term = prefactor * ml_scaled(MlArgs::two_param(k.beta, b, z), nut - mf * ln_nut, ml)?;
        sum = sum + term;
        if mf > nut && tail_is_negligible(term, previous, tol * (sum.abs() + T::min_positive_value())) {
            return Ok(clamp_unit(sum));
        }
        previous = term;
    }
    Err(Error::NonConvergence { what: "kernel distribution series", budget: SERIES_BUDGET })
}

/// Stopping test past the mode of a series whose terms shrink roughly
/// geometrically: the term and the estimated remaining tail are both within `bound`.
pub(crate) fn tail_is_negligible<T: Real>(term: T, previous: T, bound: T) -> bool {
    if term.abs() > bound {
        return false;
    }
    let ratio = if previous == T::zero() { T::zero() } else { (term / previous).abs() };
    ratio < T::one() && term.abs() * ratio / (T::one() - ratio) <= bound
}

fn clamp_unit<T: Real>(x: T) -> T {
    x.max(T::zero()).min(T::one())
}
