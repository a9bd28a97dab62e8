//! Extended-precision reference values, independent of the library's evaluation routes.

#![allow(dead_code)]

use rug::ops::Pow;
use rug::Float;

fn ln_gamma_f64(x: f64) -> f64 {
    Float::with_val(64, x).ln_gamma().to_f64()
}

/// Working precision (bits) large enough to absorb the cancellation of the
/// alternating series plus ~60 guard digits.
fn precision_for(a: f64, b: f64, c: f64, z: f64) -> Option<u32> {
    // the largest term is about exp(c·|z|^{1/a})
    if c.max(1.0) * z.abs().powf(1.0 / a) > 1100.0 {
        return None;
    }
    let ln_z = z.abs().ln();
    let mut peak = f64::NEG_INFINITY;
    let mut n = 0usize;
    let log0 = -ln_gamma_f64(b);
    loop {
        let nf = n as f64;
        let mut lt = nf * ln_z - ln_gamma_f64(a * nf + b);
        if c != 1.0 {
            lt += ln_gamma_f64(c + nf) - ln_gamma_f64(c) - ln_gamma_f64(nf + 1.0);
        }
        peak = peak.max(lt);
        if n > 10 && lt < peak - 120.0 {
            break;
        }
        n += 1;
        if n > 40_000 {
            return None;
        }
    }
    let spread = (peak - log0).max(0.0) / std::f64::consts::LN_2;
    if spread > 4000.0 {
        return None;
    }
    Some(spread as u32 + 256)
}

/// `M^c_{a,b}(z)` by direct summation of the defining series in MPFR arithmetic.
/// Returns `None` when the required precision is impractical.
pub fn ml_series(a: f64, b: f64, c: f64, z: f64) -> Option<f64> {
    ml_series_scaled(a, b, c, z, 0.0)
}

/// `e^{-log_scale}·M^c_{a,b}(z)`, scaled before rounding to `f64`.
pub fn ml_series_scaled(a: f64, b: f64, c: f64, z: f64, log_scale: f64) -> Option<f64> {
    // cancellation can leave a result far below the first term, so raise the
    // precision until two passes agree
    let mut prec = precision_for(a, b, c, z)?;
    let mut last = series_at(prec, a, b, c, z, log_scale)?;
    for _ in 0..12 {
        prec += prec / 2 + 64;
        let next = series_at(prec, a, b, c, z, log_scale)?;
        if (next - last).abs() <= 1e-16 * next.abs() {
            return Some(next);
        }
        last = next;
    }
    None
}

fn series_at(prec: u32, a: f64, b: f64, c: f64, z: f64, log_scale: f64) -> Option<f64> {
    let a = Float::with_val(prec, a);
    let b = Float::with_val(prec, b);
    let c = Float::with_val(prec, c);
    let z = Float::with_val(prec, z);
    let mut sum = Float::with_val(prec, 0);
    let mut poch = Float::with_val(prec, 1); // (c)_n / n!
    let mut zn = Float::with_val(prec, 1);
    let cutoff = Float::with_val(prec, 2).pow(-(prec as i32));
    let mut small_run = 0;
    for n in 0..200_000u32 {
        let arg = Float::with_val(prec, &a * n) + &b;
        let term = Float::with_val(prec, &poch * &zn) / arg.gamma();
        sum += &term;
        let bound = Float::with_val(prec, sum.clone().abs() * &cutoff);
        if n > 5 && term.abs() < bound {
            small_run += 1;
            if small_run > 3 {
                let scale = Float::with_val(prec, -log_scale).exp();
                return Some((sum * scale).to_f64());
            }
        } else {
            small_run = 0;
        }
        zn *= &z;
        poch *= Float::with_val(prec, &c + n);
        poch /= n + 1;
    }
    None
}

pub fn ml2(a: f64, b: f64, z: f64) -> Option<f64> {
    ml_series(a, b, 1.0, z)
}

pub fn gamma(x: f64) -> f64 {
    Float::with_val(256, x).gamma().to_f64()
}

/// Tanh-sinh quadrature on `[lo, hi]`, refined until two levels agree to `rel`.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel: f64) -> f64 {
    let half = 0.5 * (hi - lo);
    let pi2 = std::f64::consts::FRAC_PI_2;
    // node at x = tanh(π/2 sinh t); the distance to the nearer endpoint is
    // computed directly to keep resolution near the ends
    let node = |t: f64| -> Option<(f64, f64)> {
        let u = pi2 * t.sinh();
        let c = u.cosh();
        let w = pi2 * t.cosh() / (c * c);
        let gap = 1.0 / (u.abs().exp() * c); // 1 - |tanh u|
        if gap < 1e-300 || w < 1e-300 {
            return None;
        }
        let x = if t >= 0.0 { hi - half * gap } else { lo + half * gap };
        Some((x, w))
    };
    let sum_level = |h: f64, odd_only: bool| -> f64 {
        let mut acc = 0.0;
        let mut k: i64 = if odd_only { 1 } else { 0 };
        let step = if odd_only { 2 } else { 1 };
        loop {
            let t = k as f64 * h;
            let mut any = false;
            let pair = [t, -t];
            let nodes = if k == 0 { &pair[..1] } else { &pair[..] };
            for &tt in nodes {
                if let Some((x, w)) = node(tt) {
                    if x > lo && x < hi {
                        acc += w * f(x);
                        any = true;
                    }
                }
            }
            if !any || t > 6.0 {
                break;
            }
            k += step;
        }
        acc
    };
    let mut h = 0.5;
    let mut sum = sum_level(h, false);
    let mut prev = sum * h * half;
    for _ in 0..12 {
        h /= 2.0;
        sum += sum_level(h, true);
        let value = sum * h * half;
        if (value - prev).abs() <= rel * value.abs() {
            return value;
        }
        prev = value;
    }
    prev
}

/// `∫₀^∞ e^{-st} f(t) dt` for a kernel density `f` with an integrable `t^{β-1}`
/// singularity at the origin. On `(0, 1]` the substitution `u = t^β` removes it;
/// `[1, ∞)` is cut into doubling pieces.
pub fn laplace_of_density<F: Fn(f64) -> f64>(f: F, beta: f64, s: f64) -> f64 {
    let head = tanh_sinh(
        |u: f64| {
            let t = u.powf(1.0 / beta);
            if t == 0.0 {
                // the node weight is below 1e-100 here
                return 0.0;
            }
            // dt = (1/β) u^{1/β-1} du, and t^{β-1} u^{1/β-1} = 1 cancels the singularity
            (-s * t).exp() * f(t) * u.powf(1.0 / beta - 1.0) / beta
        },
        0.0,
        1.0,
        1e-13,
    );
    let mut total = head;
    let mut lo = 1.0;
    let mut small = 0;
    while lo < 1e7 {
        let hi = 2.0 * lo;
        let piece = tanh_sinh(|t: f64| (-s * t).exp() * f(t), lo, hi, 1e-12);
        total += piece;
        if piece.abs() < 1e-15 * total.abs() {
            small += 1;
            if small >= 2 {
                break;
            }
        } else {
            small = 0;
        }
        lo = hi;
    }
    total
}
