//! Interior inequalities with explicit constants.
//!
//! One-dimensional estimates over sampled functions (shift-difference,
//! half-interval, interior bounds with constants sqrt(2) h, 2, 4h^2, 3) and
//! their fibered counterpart on grid masks, plus the interpolation constants
//! a(h) = 2h, b = sqrt(3) they imply.

mod fibered;
mod gridfn;
pub mod sweep;

pub use fibered::{fibered_interior_bound, interpolation_constants, verify_interpolation};
pub use gridfn::GridFunction;

use crate::error::{Error, Result};

/// Uniform samples of a function on (a, b), endpoints included.
#[derive(Debug, Clone)]
pub struct SampledFunction1D {
    a: f64,
    b: f64,
    values: Vec<f64>,
}

impl SampledFunction1D {
    pub fn new(a: f64, b: f64, values: Vec<f64>) -> Result<Self> {
        if !(a < b) {
            return Err(Error::Parameter(format!("empty interval ({a}, {b})")));
        }
        if values.len() < 16 {
            return Err(Error::Parameter(format!(
                "need at least 16 samples, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite sample".into()));
        }
        Ok(Self { a, b, values })
    }

    pub fn from_fn(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..n)
            .map(|i| f(a + (b - a) * i as f64 / (n - 1) as f64))
            .collect();
        Self::new(a, b, values)
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn spacing(&self) -> f64 {
        (self.b - self.a) / (self.values.len() - 1) as f64
    }

    /// Derivative samples: central differences inside, one-sided at the ends.
    pub fn derivative_samples(&self) -> Vec<f64> {
        let n = self.values.len();
        let d = self.spacing();
        let v = &self.values;
        (0..n)
            .map(|i| {
                if i == 0 {
                    (v[1] - v[0]) / d
                } else if i == n - 1 {
                    (v[n - 1] - v[n - 2]) / d
                } else {
                    (v[i + 1] - v[i - 1]) / (2.0 * d)
                }
            })
            .collect()
    }

    /// Trapezoid quadrature of g^2 over [lo, hi] for samples g, with linear
    /// interpolation of g at fractional cut points.
    fn integrate_sq(&self, g: &[f64], lo: f64, hi: f64) -> f64 {
        let d = self.spacing();
        let n = g.len();
        let at = |s: f64| -> f64 {
            // s in index space
            let i = (s.floor() as usize).min(n - 2);
            let w = s - i as f64;
            g[i] * (1.0 - w) + g[i + 1] * w
        };
        let s_lo = ((lo - self.a) / d).clamp(0.0, (n - 1) as f64);
        let s_hi = ((hi - self.a) / d).clamp(0.0, (n - 1) as f64);
        if s_hi <= s_lo {
            return 0.0;
        }
        let i_lo = s_lo.ceil() as usize;
        let i_hi = s_hi.floor() as usize;
        let mut total = 0.0;
        if i_lo as f64 > s_hi {
            // both cuts inside one cell
            let ga = at(s_lo);
            let gb = at(s_hi);
            return 0.5 * (ga * ga + gb * gb) * (s_hi - s_lo) * d;
        }
        if (i_lo as f64) > s_lo {
            let ga = at(s_lo);
            let gb = g[i_lo];
            total += 0.5 * (ga * ga + gb * gb) * (i_lo as f64 - s_lo) * d;
        }
        for i in i_lo..i_hi {
            total += 0.5 * (g[i] * g[i] + g[i + 1] * g[i + 1]) * d;
        }
        if s_hi > i_hi as f64 {
            let ga = g[i_hi];
            let gb = at(s_hi);
            total += 0.5 * (ga * ga + gb * gb) * (s_hi - i_hi as f64) * d;
        }
        total
    }

    pub fn l2_sq_on(&self, lo: f64, hi: f64) -> f64 {
        self.integrate_sq(&self.values, lo, hi)
    }

    pub fn h1_semi_sq_on(&self, lo: f64, hi: f64) -> f64 {
        self.integrate_sq(&self.derivative_samples(), lo, hi)
    }
}

/// Outcome of one inequality evaluation. The constants entering the
/// right-hand side are carried explicitly, never folded into tolerances.
#[derive(Debug, Clone)]
pub struct InequalityReport {
    pub rule: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub tolerance: f64,
    pub constants: Vec<(&'static str, f64)>,
}

impl InequalityReport {
    fn new(rule: &'static str, lhs: f64, rhs: f64, constants: Vec<(&'static str, f64)>) -> Self {
        let tolerance = 1e-6 * lhs.abs().max(rhs.abs()).max(1.0);
        Self {
            rule,
            lhs,
            rhs,
            slack: rhs - lhs,
            holds: lhs <= rhs + tolerance,
            tolerance,
            constants,
        }
    }
}

/// L2 norm and H1 seminorm of u over a subinterval.
pub fn norms_1d(u: &SampledFunction1D, sub: (f64, f64)) -> Result<(f64, f64)> {
    let (a, b) = u.interval();
    let eps = 1e-12 * (b - a);
    if sub.0 < a - eps || sub.1 > b + eps || !(sub.0 < sub.1) {
        return Err(Error::Parameter(format!(
            "subinterval ({}, {}) not inside ({a}, {b})",
            sub.0, sub.1
        )));
    }
    Ok((
        u.l2_sq_on(sub.0, sub.1).sqrt(),
        u.h1_semi_sq_on(sub.0, sub.1).sqrt(),
    ))
}

fn require_symmetric(u: &SampledFunction1D) -> Result<f64> {
    let (a, b) = u.interval();
    if (a + b).abs() > 1e-12 * (b - a).max(1.0) {
        return Err(Error::Parameter(format!(
            "interval ({a}, {b}) is not symmetric about 0"
        )));
    }
    Ok(b)
}

/// | ||u||_{L2(0,h)} - ||u||_{L2(-h,0)} |  <=  sqrt(2) h ||u'||_{L2(-h,h)}.
pub fn shift_difference_bound(u: &SampledFunction1D) -> Result<InequalityReport> {
    let h = require_symmetric(u)?;
    let lhs = (u.l2_sq_on(0.0, h).sqrt() - u.l2_sq_on(-h, 0.0).sqrt()).abs();
    let energy = u.h1_semi_sq_on(-h, h).sqrt();
    let rhs = std::f64::consts::SQRT_2 * h * energy;
    Ok(InequalityReport::new(
        "shift_difference",
        lhs,
        rhs,
        vec![("sqrt2", std::f64::consts::SQRT_2), ("h", h)],
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfInterval {
    Left,
    Right,
}

/// int over one half <= 2 int over the other half + 4h^2 int |u'|^2.
pub fn half_interval_bound(
    u: &SampledFunction1D,
    direction: HalfInterval,
) -> Result<InequalityReport> {
    let h = require_symmetric(u)?;
    let (target, other) = match direction {
        HalfInterval::Right => ((0.0, h), (-h, 0.0)),
        HalfInterval::Left => ((-h, 0.0), (0.0, h)),
    };
    let lhs = u.l2_sq_on(target.0, target.1);
    let rhs = 2.0 * u.l2_sq_on(other.0, other.1) + 4.0 * h * h * u.h1_semi_sq_on(-h, h);
    Ok(InequalityReport::new(
        "half_interval",
        lhs,
        rhs,
        vec![("two", 2.0), ("four_h_sq", 4.0 * h * h)],
    ))
}

/// int_a^b |u|^2 <= 3 int_{a+h}^{b-h} |u|^2 + 4h^2 int_a^b |u'|^2,
/// valid for h < (b-a)/4.
pub fn interior_bound_1d(u: &SampledFunction1D, h: f64) -> Result<InequalityReport> {
    let (a, b) = u.interval();
    if !(h > 0.0 && h < (b - a) / 4.0) {
        return Err(Error::Parameter(format!(
            "h = {h} outside (0, (b-a)/4) = (0, {})",
            (b - a) / 4.0
        )));
    }
    let lhs = u.l2_sq_on(a, b);
    let rhs = 3.0 * u.l2_sq_on(a + h, b - h) + 4.0 * h * h * u.h1_semi_sq_on(a, b);
    Ok(InequalityReport::new(
        "interior_1d",
        lhs,
        rhs,
        vec![("three", 3.0), ("four_h_sq", 4.0 * h * h)],
    ))
}
