//! Numerical inversion of Laplace transforms on the positive half-line.
//!
//! Two independent algorithms are provided so they can check each other: the
//! fixed Talbot contour (Abate and Valkó, 2004) and Euler summation of the
//! Bromwich integral (Abate and Whitt, 2006). Both sample the transform only in
//! the right half-plane and assume a real-valued original, i.e.
//! `F(conj s) = conj F(s)`.

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Default number of Talbot contour nodes.
pub const DEFAULT_CONTOUR_POINTS: usize = 32;
/// Default number of Euler summation terms.
pub const DEFAULT_EULER_TERMS: usize = 41;
/// Below this `t` the caller-supplied limit is returned instead of inverting.
pub const SMALL_T: f64 = 1e-6;

/// A Laplace transform, analytic in the right half-plane.
pub trait LtFunction<T>: Sync {
    fn eval(&self, s: Complex<T>) -> Result<Complex<T>>;
}

impl<T, F> LtFunction<T> for F
where
    F: Fn(Complex<T>) -> Result<Complex<T>> + Sync + ?Sized,
{
    fn eval(&self, s: Complex<T>) -> Result<Complex<T>> {
        self(s)
    }
}

fn check_t<T: Real>(t: T) -> Result<()> {
    if t > T::zero() && t.is_finite() {
        Ok(())
    } else {
        Err(invalid("t", format!("must be finite and positive, got {t}")))
    }
}

/// Talbot contour node `k` of `n`: `(s, ds/dθ / i)`, scaled by `r = 2n/(5t)`.
fn talbot_node<T: Real>(k: usize, n: usize, r: T) -> (Complex<T>, Complex<T>) {
    let theta = T::from_usize_lossy(k) * T::PI() / T::from_usize_lossy(n);
    let cot = theta.cos() / theta.sin();
    let s = Complex::new(r * theta * cot, r * theta);
    let sigma = theta + (theta * cot - T::one()) * cot;
    (s, Complex::new(T::one(), sigma))
}

/// Fixed-Talbot approximation of the original of `f` at `t`.
pub fn invert_talbot<T: Real, F: LtFunction<T> + ?Sized>(f: &F, t: T, contour_points: usize) -> Result<T> {
    check_t(t)?;
    if !(16..=128).contains(&contour_points) {
        return Err(invalid("contour_points", format!("must lie in [16, 128], got {contour_points}")));
    }
    let n = contour_points;
    let r = T::lit(2.0) * T::from_usize_lossy(n) / (T::lit(5.0) * t);
    let mut sum = T::lit(0.5) * f.eval(Complex::from(r))?.re * (r * t).exp();
    for k in 1..n {
        let (s, w) = talbot_node(k, n, r);
        sum = sum + ((s * t).exp() * f.eval(s)? * w).re;
    }
    let value = r / T::from_usize_lossy(n) * sum;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow { what: "talbot inversion" })
    }
}

/// Largest relative imaginary part left when the Talbot sum runs over both
/// halves of the contour. Zero for transforms of real originals.
pub fn conjugate_symmetry_defect<T: Real, F: LtFunction<T> + ?Sized>(f: &F, t: T, contour_points: usize) -> Result<T> {
    check_t(t)?;
    let n = contour_points.max(2);
    let r = T::lit(2.0) * T::from_usize_lossy(n) / (T::lit(5.0) * t);
    let mut sum = f.eval(Complex::from(r))? * (r * t).exp();
    for k in 1..n {
        let (s, w) = talbot_node(k, n, r);
        // the lower half of the contour: s(−θ) = conj s(θ), ds(−θ) = conj ds(θ)
        sum = sum + (s * t).exp() * f.eval(s)? * w;
        sum = sum + (s.conj() * t).exp() * f.eval(s.conj())? * w.conj();
    }
    let scale = sum.re.abs().max(T::min_positive_value());
    Ok(sum.im.abs() / scale)
}

/// Euler-summation approximation of the original of `f` at `t` using
/// `terms = 2M + 1` transform evaluations.
pub fn invert_euler<T: Real, F: LtFunction<T> + ?Sized>(f: &F, t: T, terms: usize) -> Result<T> {
    check_t(t)?;
    if !(3..=121).contains(&terms) {
        return Err(invalid("terms", format!("must lie in [3, 121], got {terms}")));
    }
    let m = (terms - 1) / 2;
    let mf = T::from_usize_lossy(m);
    let ln10 = T::LN_10();
    let base = mf * ln10 / T::lit(3.0);
    let weights = euler_weights::<T>(m);
    let mut sum = T::zero();
    for (k, &eta) in weights.iter().enumerate() {
        let s = Complex::new(base, T::PI() * T::from_usize_lossy(k)) / t;
        sum = sum + eta * f.eval(s)?.re;
    }
    let value = (base).exp() / t * sum;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow { what: "euler inversion" })
    }
}

/// Signed weights `η_0 … η_{2M}` of the Euler algorithm.
fn euler_weights<T: Real>(m: usize) -> Vec<T> {
    let mut xi = vec![T::one(); 2 * m + 1];
    xi[0] = T::lit(0.5);
    let tail = T::lit(2.0).powi(-(m as i32));
    xi[2 * m] = tail;
    let mut binom = T::one();
    for k in 1..m {
        binom = binom * T::from_usize_lossy(m - k + 1) / T::from_usize_lossy(k);
        xi[2 * m - k] = xi[2 * m - k + 1] + tail * binom;
    }
    xi.iter()
        .enumerate()
        .map(|(k, &x)| if k % 2 == 0 { x } else { -x })
        .collect()
}

/// Result of [`invert_checked`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion<T> {
    pub value: T,
    /// `|talbot − euler|`; zero when the small-`t` limit was used.
    pub error_estimate: T,
}

/// Inverts with both algorithms and returns the Talbot value with the
/// disagreement as an error estimate.
///
/// For `t < 1e-6` returns `limit_at_zero` instead. A disagreement above
/// `100·tol·max(1, |value|)` is reported as an error.
pub fn invert_checked<T: Real, F: LtFunction<T> + ?Sized>(f: &F, t: T, tol: T, limit_at_zero: T) -> Result<Inversion<T>> {
    check_t(t)?;
    if !(tol >= T::lit(1e-8)) {
        return Err(invalid("tol", format!("must be at least 1e-8, got {tol}")));
    }
    if t < T::lit(SMALL_T) {
        return Ok(Inversion { value: limit_at_zero, error_estimate: T::zero() });
    }
    let talbot = invert_talbot(f, t, DEFAULT_CONTOUR_POINTS)?;
    let euler = invert_euler(f, t, DEFAULT_EULER_TERMS)?;
    let gap = (talbot - euler).abs();
    if gap > T::lit(100.0) * tol * talbot.abs().max(T::one()) {
        return Err(Error::InversionDisagreement { t: t.as_f64(), talbot: talbot.as_f64(), euler: euler.as_f64() });
    }
    Ok(Inversion { value: talbot, error_estimate: gap })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recip(s: Complex<f64>) -> Result<Complex<f64>> {
        Ok(s.inv())
    }

    #[test]
    fn constant_original() {
        assert!((invert_talbot(&recip, 3.0, DEFAULT_CONTOUR_POINTS).unwrap() - 1.0).abs() < 1e-8);
        assert!((invert_euler(&recip, 3.0, 41).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn exponential_original() {
        let f = |s: Complex<f64>| Ok((s + 1.0).inv());
        let want = (-1.0f64).exp();
        assert!((invert_talbot(&f, 1.0, DEFAULT_CONTOUR_POINTS).unwrap() - want).abs() < 1e-8);
        assert!((invert_euler(&f, 1.0, 41).unwrap() - want).abs() < 1e-8);
    }

    #[test]
    fn euler_weights_sum() {
        // Σ η_k vanishes up to the truncated binomial tail
        let w = euler_weights::<f64>(20);
        assert_eq!(w.len(), 41);
        assert_eq!(w[0], 0.5);
        assert_eq!(w[1], -1.0);
        assert_eq!(w[40], 2f64.powi(-20));
    }

    #[test]
    fn small_t_guard_and_rejections() {
        let v = invert_checked(&recip, 1e-7, 1e-8, 1.0).unwrap();
        assert_eq!(v.value, 1.0);
        assert!(invert_talbot(&recip, 0.0, 48).is_err());
        assert!(invert_talbot(&recip, 1.0, 8).is_err());
        assert!(invert_checked(&recip, 1.0, 1e-9, 1.0).is_err());
    }

    #[test]
    fn pole_on_the_right_is_reported() {
        // e^{2t}: the pole at s = 2 lies right of both contours at t = 10
        let f = |s: Complex<f64>| Ok((s - 2.0).inv());
        assert!(invert_checked(&f, 10.0, 1e-8, 0.0).is_err());
    }
}
