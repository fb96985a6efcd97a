#![allow(dead_code)]

//! Test-only oracles, independent of the library's quadrature and solvers.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use usvt::DenseMatrix;

/// Tanh-sinh quadrature of `f(x)` on `[a, b]`. `f` receives `x` computed as
/// an offset from the nearer endpoint so endpoint singularities are resolved.
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let h = 1.0 / 128.0;
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for k in -512i32..=512 {
        let t = k as f64 * h;
        let u = 0.5 * PI * t.sinh();
        let cosh_u = u.cosh();
        let weight = 0.5 * PI * t.cosh() / (cosh_u * cosh_u);
        // distance from the nearer endpoint: half * (1 - tanh|u|) = 2 half / (1 + e^{2|u|})
        let offset = 2.0 * half / (1.0 + (2.0 * u.abs()).exp());
        let x = if t < 0.0 { a + offset } else { b - offset };
        if x <= a || x >= b {
            continue;
        }
        sum += weight * f(x);
    }
    sum * half * h
}

pub fn mp_edges(gamma: f64) -> (f64, f64) {
    let r = gamma.sqrt();
    ((1.0 - r).powi(2), (1.0 + r).powi(2))
}

/// Marčenko–Pastur density written out independently of the library.
pub fn oracle_density(gamma: f64, x: f64) -> f64 {
    let (lo, hi) = mp_edges(gamma);
    if x <= lo || x >= hi {
        return 0.0;
    }
    ((hi - x) * (x - lo)).sqrt() / (2.0 * PI * gamma * x)
}

pub fn oracle_cdf(gamma: f64, x: f64) -> f64 {
    let (lo, hi) = mp_edges(gamma);
    if x <= lo {
        return 0.0;
    }
    if x >= hi {
        return 1.0;
    }
    tanh_sinh(|t| oracle_density(gamma, t), lo, x)
}

pub fn oracle_quantile(gamma: f64, p: f64) -> f64 {
    let (mut lo, mut hi) = mp_edges(gamma);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if oracle_cdf(gamma, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// At γ = 1, `√x` follows the quarter-circle law on `[0, 2]`.
pub fn quarter_circle_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 4.0 {
        return 1.0;
    }
    let s = x.sqrt();
    (s * (4.0 - s * s).sqrt() / 2.0 + 2.0 * (s / 2.0).asin()) / PI
}

/// Medians computed with 30-digit arithmetic (adaptive tanh-sinh quadrature
/// and a secant root finder) outside this code base.
pub const FROZEN_MEDIANS: [(f64, f64); 4] = [
    (1.0, 0.652_775_941_633_570_4),
    (0.5, 0.830_465_881_581_363_6),
    (0.2, 0.932_915_476_600_439_9),
    (0.04, 0.986_650_691_408_727_8),
];

pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng)).unwrap()
}

/// Sample proportion of `values` with `pred`.
pub fn fraction(values: &[f64], pred: impl Fn(f64) -> bool) -> f64 {
    values.iter().filter(|&&v| pred(v)).count() as f64 / values.len() as f64
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
