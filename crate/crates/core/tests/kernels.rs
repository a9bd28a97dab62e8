mod common;

use approx::assert_relative_eq;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tml_hawkes::kernels::{kernel_cdf, kernel_density, kernel_lt, KernelSpec};

const LT_POINTS: [f64; 6] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];

fn random_kernels(n: usize, seed: u64) -> Vec<KernelSpec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let beta = rng.random_range(0.3..=1.0);
            let nu: f64 = rng.random_range(0.0..2.0);
            // every other draw forces γ < ν^β so the Mittag-Leffler argument is positive
            let gamma = if i % 2 == 0 {
                rng.random_range(0.05..2.0)
            } else {
                (nu.powf(beta) * rng.random_range(0.1..0.9)).max(0.01)
            };
            KernelSpec::TemperedML { beta, nu, gamma }
        })
        .collect()
}

fn shape(k: &KernelSpec<f64>) -> (f64, f64, f64) {
    match *k {
        KernelSpec::TemperedML { beta, nu, gamma } => (beta, nu, gamma),
        KernelSpec::MittagLeffler { beta, gamma } => (beta, 0.0, gamma),
        KernelSpec::Exponential { gamma } => (1.0, 0.0, gamma),
        KernelSpec::None => unreachable!(),
    }
}

#[test]
fn density_transform_round_trip() {
    let mut kernels = random_kernels(20, 11);
    kernels.push(KernelSpec::TemperedML { beta: 0.9, nu: 1.0, gamma: 0.1 });
    for k in &kernels {
        let (beta, _, _) = shape(k);
        for &s in &LT_POINTS {
            let numeric = common::laplace_of_density(|t| kernel_density(k, t).unwrap(), beta, s);
            let closed = kernel_lt(k, Complex::new(s, 0.0)).unwrap();
            assert!(closed.im.abs() < 1e-15);
            let rel = (numeric - closed.re).abs() / closed.re;
            assert!(rel <= 1e-6, "{k:?} s={s}: numeric {numeric} closed {} rel {rel:e}", closed.re);
        }
    }
}

#[test]
fn transform_normalized_at_origin() {
    for k in random_kernels(20, 12) {
        let v = kernel_lt(&k, Complex::new(1e-8, 0.0)).unwrap();
        assert!((v.re - 1.0).abs() <= 1e-6, "{k:?}: {v}");
    }
}

/// Density after the substitution `u = t^β`; nodes whose `t` underflows carry no weight.
fn density_in_u(k: &KernelSpec<f64>, beta: f64, u: f64) -> f64 {
    let t = u.powf(1.0 / beta);
    if t == 0.0 {
        return 0.0;
    }
    kernel_density(k, t).unwrap() * u.powf(1.0 / beta - 1.0) / beta
}

#[test]
fn density_integrates_to_one() {
    for k in random_kernels(10, 13) {
        let (beta, nu, _) = shape(&k);
        let nu = nu.max(0.05);
        let k = KernelSpec::TemperedML { beta, nu, gamma: shape(&k).2 };
        // exponentially tempered: the doubling pieces reach far beyond the tail
        let mass = common::laplace_of_density(|t| kernel_density(&k, t).unwrap(), beta, 0.0);
        assert!((mass - 1.0).abs() <= 1e-6, "{k:?}: mass {mass}");
    }
    // heavy-tailed case: 1 − F(T) ≈ T^{-β}/(γ Γ(1−β)) + O(T^{-2β})
    for &(beta, gamma) in &[(0.5, 1.0), (0.8, 0.3), (0.95, 2.0)] {
        let k = KernelSpec::MittagLeffler { beta, gamma };
        let t_big: f64 = 1e12;
        let head = common::tanh_sinh(|u: f64| density_in_u(&k, beta, u), 0.0, 1.0, 1e-13);
        let mut body = 0.0;
        let mut lo = 1.0;
        while lo < t_big {
            body += common::tanh_sinh(|t| kernel_density(&k, t).unwrap(), lo, 2.0 * lo, 1e-12);
            lo *= 2.0;
        }
        let tail = lo.powf(-beta) / (gamma * common::gamma(1.0 - beta));
        let mass = head + body + tail;
        assert!((mass - 1.0).abs() <= 1e-6, "{k:?}: mass {mass}");
    }
}

#[test]
fn cdf_matches_integrated_density() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for k in random_kernels(12, 15) {
        for _ in 0..4 {
            let t1: f64 = rng.random_range(0.05..5.0);
            let t2 = t1 + rng.random_range(0.01..5.0);
            let mass = common::tanh_sinh(|t| kernel_density(&k, t).unwrap(), t1, t2, 1e-12);
            let diff = kernel_cdf(&k, t2, 1e-12).unwrap() - kernel_cdf(&k, t1, 1e-12).unwrap();
            assert!((diff - mass).abs() <= 1e-6, "{k:?} [{t1}, {t2}]: cdf diff {diff} quadrature {mass}");
        }
        // from the origin, through the u = t^β substitution
        let (beta, _, _) = shape(&k);
        let t = 1.7_f64;
        let head = common::tanh_sinh(
            |u: f64| density_in_u(&k, beta, u),
            0.0,
            t.powf(beta),
            1e-12,
        );
        assert!((kernel_cdf(&k, t, 1e-12).unwrap() - head).abs() <= 1e-6);
    }
}

#[test]
fn cdf_is_monotone_and_bounded() {
    for k in random_kernels(8, 16) {
        let mut last = 0.0;
        for i in 0..400 {
            let t = 1e-4 * 1.04f64.powi(i);
            let f = kernel_cdf(&k, t, 1e-10).unwrap_or_else(|e| panic!("{k:?} t={t}: {e:?}"));
            assert!((0.0..=1.0).contains(&f));
            assert!(f >= last - 1e-10, "{k:?} t={t}: {f} < {last}");
            last = f;
        }
    }
}

#[test]
fn special_cases_collapse() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let beta: f64 = rng.random_range(0.2..1.0);
        let gamma: f64 = rng.random_range(0.1..3.0);
        let nu: f64 = rng.random_range(0.0..3.0);
        let pairs = [
            (KernelSpec::TemperedML { beta, nu: 0.0, gamma }, KernelSpec::MittagLeffler { beta, gamma }),
            (KernelSpec::TemperedML { beta: 1.0, nu, gamma }, KernelSpec::Exponential { gamma }),
        ];
        for (x, y) in pairs {
            for &t in &[0.01, 0.3, 1.0, 4.0, 12.0] {
                let (dx, dy) = (kernel_density(&x, t).unwrap(), kernel_density(&y, t).unwrap());
                assert!((dx - dy).abs() <= 1e-10 * dx.abs().max(1.0), "{x:?} t={t}: {dx} vs {dy}");
                let (cx, cy) = (kernel_cdf(&x, t, 1e-12).unwrap(), kernel_cdf(&y, t, 1e-12).unwrap());
                assert!((cx - cy).abs() <= 1e-10, "{x:?} t={t}: {cx} vs {cy}");
            }
            for &s in &[Complex::new(0.3, 0.0), Complex::new(1.0, 4.0), Complex::new(7.0, -2.0)] {
                let (lx, ly) = (kernel_lt(&x, s).unwrap(), kernel_lt(&y, s).unwrap());
                assert!((lx - ly).norm() <= 1e-10 * ly.norm(), "{x:?} s={s}: {lx} vs {ly}");
            }
        }
    }
}

#[test]
fn documented_examples() {
    // Exponential(γ = 1) at t = 1
    assert_relative_eq!(kernel_density(&KernelSpec::Exponential { gamma: 1.0 }, 1.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-14);
    // tempering is invisible at β = 1: e^{-0.5}·e^{-0.5}
    let k = KernelSpec::TemperedML { beta: 1.0, nu: 0.5, gamma: 1.0 };
    assert_relative_eq!(kernel_density(&k, 1.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-13);
    // γ < ν^β: positive Mittag-Leffler argument, still a density
    let k = KernelSpec::TemperedML { beta: 0.9, nu: 1.0, gamma: 0.1 };
    assert!(kernel_density(&k, 2.0).unwrap() > 0.0);
    let f10 = kernel_cdf(&KernelSpec::TemperedML { beta: 0.9, nu: 0.01, gamma: 1.0 }, 10.0, 1e-12).unwrap();
    assert!(f10 > 0.9 && f10 < 1.0, "{f10}");
    assert_relative_eq!(kernel_cdf(&KernelSpec::Exponential { gamma: 1.0 }, 2f64.ln(), 1e-12).unwrap(), 0.5, max_relative = 1e-13);
    // transform: 1/(1 − ν^β + (ν+s)^β) at γ = 1
    let (beta, nu, s) = (0.7, 0.4, 2.5f64);
    let v = kernel_lt(&KernelSpec::TemperedML { beta, nu, gamma: 1.0 }, Complex::new(s, 0.0)).unwrap();
    assert_relative_eq!(v.re, 1.0 / (1.0 - nu.powf(beta) + (nu + s).powf(beta)), max_relative = 1e-15);
}

#[test]
fn density_is_positive_for_either_sign_of_the_argument() {
    for k in random_kernels(20, 18) {
        for i in 0..60 {
            let t = 1e-3 * 1.2f64.powi(i);
            assert!(kernel_density(&k, t).unwrap() > 0.0 || t > 100.0, "{k:?} t={t}");
        }
    }
}
