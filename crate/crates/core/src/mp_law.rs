//! The Marčenko–Pastur law with unit variance and aspect ratio `γ ∈ (0, 1]`.
//!
//! Integrals of the density are taken in the angle variable `θ` defined by
//! `x = γ₋ + (γ₊ − γ₋) sin²θ`. The square-root zeros at both support edges
//! cancel against the Jacobian, and at `γ = 1` the `x^{-1/2}` blow-up at the
//! origin cancels as well, so the integrand is smooth on `[0, π/2]`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quadrature;

const QUAD_TOL: f64 = 1e-14;
const BISECTION_WIDTH: f64 = 1e-12;

/// A probability level in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::invalid(format!("probability must lie in [0, 1], got {value}")))
        }
    }

    pub const HALF: Probability = Probability(0.5);

    pub(crate) fn clamped(value: f64) -> Self {
        Self(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Marčenko–Pastur distribution for aspect ratio `gamma`.
///
/// The median is computed lazily on first use and cached for the lifetime of
/// the instance.
#[derive(Debug)]
pub struct MpLaw {
    gamma: f64,
    lower: f64,
    upper: f64,
    median: OnceLock<f64>,
}

impl Clone for MpLaw {
    fn clone(&self) -> Self {
        let median = OnceLock::new();
        if let Some(&m) = self.median.get() {
            let _ = median.set(m);
        }
        Self {
            gamma: self.gamma,
            lower: self.lower,
            upper: self.upper,
            median,
        }
    }
}

impl MpLaw {
    /// `gamma` must lie in `(0, 1]`; callers with `m > n` pass `min/max`.
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::invalid(format!(
                "aspect ratio gamma must lie in (0, 1], got {gamma}"
            )));
        }
        let root = gamma.sqrt();
        Ok(Self {
            gamma,
            lower: (1.0 - root) * (1.0 - root),
            upper: (1.0 + root) * (1.0 + root),
            median: OnceLock::new(),
        })
    }

    /// Law for an `rows x cols` matrix: `γ = min/max`.
    pub fn for_shape(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("matrix dimensions must be positive"));
        }
        Self::new(rows.min(cols) as f64 / rows.max(cols) as f64)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Lower support edge `(1 − √γ)²`.
    pub fn lower_edge(&self) -> f64 {
        self.lower
    }

    /// Upper support edge `(1 + √γ)²`.
    pub fn upper_edge(&self) -> f64 {
        self.upper
    }

    fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn density(&self, x: f64) -> f64 {
        if !(x > self.lower && x < self.upper) {
            return 0.0;
        }
        let radicand = (self.upper - x) * (x - self.lower);
        radicand.max(0.0).sqrt() / (2.0 * PI * self.gamma * x)
    }

    /// Density times Jacobian, as a function of the angle variable.
    fn angular_integrand(&self, theta: f64) -> f64 {
        let s2 = theta.sin().powi(2);
        let c2 = 1.0 - s2;
        let w = self.width();
        // At γ = 1 the lower edge is 0 and s² cancels exactly.
        let ratio = if self.lower == 0.0 {
            1.0 / w
        } else {
            s2 / (self.lower + w * s2)
        };
        w * w * ratio * c2 / (PI * self.gamma)
    }

    fn angle_of(&self, x: f64) -> f64 {
        ((x - self.lower) / self.width()).clamp(0.0, 1.0).sqrt().asin()
    }

    fn angular_mass(&self, from: f64, to: f64) -> f64 {
        quadrature::integrate(|t| self.angular_integrand(t), from, to, QUAD_TOL)
    }

    pub fn cdf(&self, x: f64) -> Probability {
        if x <= self.lower {
            return Probability(0.0);
        }
        if x >= self.upper {
            return Probability(1.0);
        }
        let theta = self.angle_of(x);
        // Integrate over the shorter side of the support.
        let value = if theta <= FRAC_PI_2 / 2.0 {
            self.angular_mass(0.0, theta)
        } else {
            1.0 - self.angular_mass(theta, FRAC_PI_2)
        };
        Probability::clamped(value)
    }

    /// Mass of `[lo, hi] ∩ support`, integrated directly (no normalization assumed).
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let a = self.angle_of(lo.max(self.lower));
        let b = self.angle_of(hi.min(self.upper));
        self.angular_mass(a, b)
    }

    /// First moment, integrated numerically.
    pub fn mean(&self) -> f64 {
        let w = self.width();
        let c = w * w / (PI * self.gamma);
        quadrature::integrate(
            |t| {
                let s2 = t.sin().powi(2);
                c * s2 * (1.0 - s2)
            },
            0.0,
            FRAC_PI_2,
            QUAD_TOL,
        )
    }

    /// Inverse CDF by bisection on the support.
    pub fn quantile(&self, p: Probability) -> f64 {
        let p = p.value();
        if p == 0.0 {
            return self.lower;
        }
        if p == 1.0 {
            return self.upper;
        }
        let (mut lo, mut hi) = (self.lower, self.upper);
        while hi - lo > BISECTION_WIDTH {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid).value() < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = 0.5 * (lo + hi);
        debug_assert!((self.cdf(x).value() - p).abs() <= 1e-8);
        x
    }

    /// `μ_γ`, the median of the law.
    pub fn median(&self) -> f64 {
        *self.median.get_or_init(|| self.quantile(Probability::HALF))
    }
}
