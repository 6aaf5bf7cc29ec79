//! Boundary-profile functions over the unit base cube.
//!
//! A profile is a bounded function `f` on `[0,1]^(n-1)` whose graph, shifted
//! vertically through one unit, bounds an elementary domain. Profiles may be
//! closed-form, piecewise with jump discontinuities (1-D base only), sampled
//! on a uniform grid, or a countable accumulating-jump fixture.

use crate::error::{Error, Result};

/// Closed-form expression usable as a profile or as a piece of one.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedForm {
    Const(f64),
    /// `slope * x + intercept` (1-D base).
    Linear { slope: f64, intercept: f64 },
    /// `x * sin(1/x)`, extended by continuity with value 0 at x = 0.
    XSinInv,
    /// `y_scale * inner(x_offset + x_scale * x)`.
    Remap {
        inner: Box<ClosedForm>,
        x_scale: f64,
        x_offset: f64,
        y_scale: f64,
    },
}

impl ClosedForm {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ClosedForm::Const(c) => *c,
            ClosedForm::Linear { slope, intercept } => slope * x + intercept,
            ClosedForm::XSinInv => {
                if x == 0.0 {
                    0.0
                } else {
                    x * (1.0 / x).sin()
                }
            }
            ClosedForm::Remap {
                inner,
                x_scale,
                x_offset,
                y_scale,
            } => y_scale * inner.eval(x_offset + x_scale * x),
        }
    }

    /// Upper bound for |f| over the x-interval [lo, hi].
    fn bound_on(&self, lo: f64, hi: f64) -> f64 {
        match self {
            ClosedForm::Const(c) => c.abs(),
            ClosedForm::Linear { slope, intercept } => {
                (slope * lo + intercept).abs().max((slope * hi + intercept).abs())
            }
            // |x sin(1/x)| <= |x|
            ClosedForm::XSinInv => lo.abs().max(hi.abs()),
            ClosedForm::Remap {
                inner,
                x_scale,
                x_offset,
                y_scale,
            } => {
                let (a, b) = (x_offset + x_scale * lo, x_offset + x_scale * hi);
                y_scale.abs() * inner.bound_on(a.min(b), a.max(b))
            }
        }
    }

    pub fn bound(&self) -> f64 {
        self.bound_on(0.0, 1.0)
    }
}

/// A jump discontinuity with its one-sided limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpSpec {
    pub location: f64,
    pub left_limit: f64,
    pub right_limit: f64,
}

impl JumpSpec {
    pub fn size(&self) -> f64 {
        (self.right_limit - self.left_limit).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    ClosedForm(ClosedForm),
    /// Ordered breakpoints in (0,1); `pieces.len() == breaks.len() + 1`.
    /// Piece `i` covers `[breaks[i-1], breaks[i])` with the usual endpoint
    /// conventions; each piece is continuous on its closed subinterval.
    PiecewiseJump {
        breaks: Vec<f64>,
        pieces: Vec<ClosedForm>,
    },
    /// Uniform samples on [0,1] with linear interpolation between knots.
    Sampled { values: Vec<f64> },
    /// Right-continuous stair with jumps of size 2^-k at x_k = 1/2 + 2^-(k+2),
    /// k = 1, 2, ...; the jump locations accumulate at 1/2 from the right.
    AccumulatingDyadic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileFunction {
    base_dim: usize,
    kind: ProfileKind,
    bound: f64,
}

/// Number of jump discontinuities carried by a profile representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpCount {
    Finite(usize),
    Countable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub bounded: bool,
    pub jump_count: JumpCount,
    pub max_jump: f64,
}

impl ProfileFunction {
    pub fn closed_form(base_dim: usize, form: ClosedForm) -> Result<Self> {
        if base_dim == 0 {
            return Err(Error::Parameter("base_dim must be >= 1".into()));
        }
        if base_dim > 1 {
            match form {
                ClosedForm::Const(_) => {}
                _ => {
                    return Err(Error::Unsupported(
                        "only constant closed forms are defined over base_dim > 1".into(),
                    ))
                }
            }
        }
        let bound = form.bound();
        Ok(Self {
            base_dim,
            kind: ProfileKind::ClosedForm(form),
            bound,
        })
    }

    pub fn constant(base_dim: usize, c: f64) -> Result<Self> {
        Self::closed_form(base_dim, ClosedForm::Const(c))
    }

    /// Piecewise profile over a 1-D base; `pieces.len() == breaks.len() + 1`.
    pub fn piecewise(breaks: Vec<f64>, pieces: Vec<ClosedForm>) -> Result<Self> {
        if pieces.len() != breaks.len() + 1 {
            return Err(Error::Parameter(format!(
                "need {} pieces for {} breakpoints, got {}",
                breaks.len() + 1,
                breaks.len(),
                pieces.len()
            )));
        }
        for w in breaks.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Parameter(
                    "breakpoints must be strictly increasing".into(),
                ));
            }
        }
        if breaks.iter().any(|&b| b <= 0.0 || b >= 1.0) {
            return Err(Error::Parameter(
                "breakpoints must lie in the open unit interval".into(),
            ));
        }
        let bound = {
            let mut m: f64 = 0.0;
            let mut lo = 0.0;
            for (i, p) in pieces.iter().enumerate() {
                let hi = if i < breaks.len() { breaks[i] } else { 1.0 };
                m = m.max(p.bound_on(lo, hi));
                lo = hi;
            }
            m
        };
        Ok(Self {
            base_dim: 1,
            kind: ProfileKind::PiecewiseJump { breaks, pieces },
            bound,
        })
    }

    /// Piecewise-constant profile: `values.len() == breaks.len() + 1`.
    pub fn step(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let pieces = values.into_iter().map(ClosedForm::Const).collect();
        Self::piecewise(breaks, pieces)
    }

    pub fn sampled(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidData("need at least two samples".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("sampled profile has a non-finite value".into()));
        }
        let bound = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(Self {
            base_dim: 1,
            kind: ProfileKind::Sampled { values },
            bound,
        })
    }

    /// The accumulating-jump fixture: countably many jumps converging to 1/2.
    pub fn accumulating_dyadic() -> Self {
        Self {
            base_dim: 1,
            kind: ProfileKind::AccumulatingDyadic,
            bound: 1.0,
        }
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    /// Evaluate at a point of the closed base cube. At a breakpoint the right
    /// limit is returned.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.base_dim {
            return Err(Error::Dimension {
                expected: self.base_dim,
                got: x.len(),
            });
        }
        for &c in x {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::Domain(format!(
                    "coordinate {c} outside the closed base cube"
                )));
            }
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        match &self.kind {
            ProfileKind::ClosedForm(f) => f.eval(x[0.min(x.len().saturating_sub(1))]),
            ProfileKind::PiecewiseJump { breaks, pieces } => {
                let t = x[0];
                // index of the piece owning t, right-limit convention at breaks
                let idx = breaks.iter().take_while(|&&b| b <= t).count();
                pieces[idx].eval(t)
            }
            ProfileKind::Sampled { values } => {
                let t = x[0];
                let n = values.len();
                let s = t * (n - 1) as f64;
                let i = (s.floor() as usize).min(n - 2);
                let w = s - i as f64;
                values[i] * (1.0 - w) + values[i + 1] * w
            }
            ProfileKind::AccumulatingDyadic => dyadic_stair(x[0], true),
        }
    }

    /// One-sided limits at an interior point of a 1-D base.
    ///
    /// Declared jump structure is answered from the representation; closed
    /// forms fall back to a shrinking-window numerical limit (windows
    /// 1e-3 .. 1e-8, agreement tolerance 1e-7).
    pub fn one_sided_limits(&self, x0: f64) -> Result<(f64, f64)> {
        if self.base_dim != 1 {
            return Err(Error::Unsupported(
                "one-sided limits are defined only over a 1-D base".into(),
            ));
        }
        if !(0.0 < x0 && x0 < 1.0) {
            return Err(Error::Domain(format!("{x0} not in the open unit interval")));
        }
        match &self.kind {
            ProfileKind::ClosedForm(f) => Ok(window_limits(|t| f.eval(t), x0)),
            ProfileKind::Sampled { .. } => {
                let v = self.eval_unchecked(&[x0]);
                Ok((v, v))
            }
            ProfileKind::PiecewiseJump { breaks, pieces } => {
                if let Some(i) = breaks.iter().position(|&b| b == x0) {
                    // pieces are continuous up to their closed endpoints
                    Ok((pieces[i].eval(x0), pieces[i + 1].eval(x0)))
                } else {
                    let idx = breaks.iter().take_while(|&&b| b <= x0).count();
                    Ok(window_limits(|t| pieces[idx].eval(t), x0))
                }
            }
            ProfileKind::AccumulatingDyadic => {
                Ok((dyadic_stair(x0, false), dyadic_stair(x0, true)))
            }
        }
    }

    /// Jumps declared by the representation. For the accumulating fixture the
    /// first `limit` jumps are listed (largest first).
    pub fn jumps(&self, limit: usize) -> Vec<JumpSpec> {
        match &self.kind {
            ProfileKind::PiecewiseJump { breaks, pieces } => breaks
                .iter()
                .enumerate()
                .map(|(i, &b)| JumpSpec {
                    location: b,
                    left_limit: pieces[i].eval(b),
                    right_limit: pieces[i + 1].eval(b),
                })
                .filter(|j| j.size() > 0.0)
                .collect(),
            ProfileKind::AccumulatingDyadic => (1..=limit as u32)
                .map(|k| {
                    let x = 0.5 + (2f64).powi(-(k as i32) - 2);
                    JumpSpec {
                        location: x,
                        left_limit: dyadic_stair(x, false),
                        right_limit: dyadic_stair(x, true),
                    }
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Boundedness (dense sampling against the declared bound) plus the jump
    /// structure read off the representation.
    pub fn admissibility_report(&self) -> Result<AdmissibilityReport> {
        if let ProfileKind::Sampled { values } = &self.kind {
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidData(
                    "sampled profile has a non-finite value".into(),
                ));
            }
        }
        let bounded = if self.base_dim == 1 {
            let n = 10_001;
            (0..n).all(|i| {
                let t = i as f64 / (n - 1) as f64;
                self.eval_unchecked(&[t]).abs() <= self.bound + 1e-12
            })
        } else {
            // seeded low-discrepancy-ish probe of the base cube
            let mut state = 0x9e3779b97f4a7c15u64;
            let mut x = vec![0.0; self.base_dim];
            (0..10_000).all(|_| {
                for c in x.iter_mut() {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    *c = (state >> 11) as f64 / (1u64 << 53) as f64;
                }
                self.eval_unchecked(&x).abs() <= self.bound + 1e-12
            })
        };
        let (jump_count, max_jump) = match &self.kind {
            ProfileKind::ClosedForm(_) | ProfileKind::Sampled { .. } => (JumpCount::Finite(0), 0.0),
            ProfileKind::PiecewiseJump { .. } => {
                let js = self.jumps(usize::MAX);
                (
                    JumpCount::Finite(js.len()),
                    js.iter().fold(0.0f64, |m, j| m.max(j.size())),
                )
            }
            ProfileKind::AccumulatingDyadic => {
                let js = self.jumps(8);
                (
                    JumpCount::Countable,
                    js.iter().fold(0.0f64, |m, j| m.max(j.size())),
                )
            }
        };
        Ok(AdmissibilityReport {
            bounded,
            jump_count,
            max_jump,
        })
    }
}

/// Stair value of the accumulating-jump fixture. `include_tie` controls
/// whether a jump exactly at `x` is counted (right limit) or not (left limit).
fn dyadic_stair(x: f64, include_tie: bool) -> f64 {
    if x <= 0.5 {
        return 0.0;
    }
    // jumps at x_k = 1/2 + 2^-(k+2): x_k <= x  <=>  k >= -log2(4(x - 1/2))
    let z = -(4.0 * (x - 0.5)).log2();
    let mut k = z.ceil();
    if !include_tie && (k - z).abs() == 0.0 {
        k += 1.0;
    }
    let k = k.max(1.0);
    // sum_{j>=k} 2^-j
    (2f64).powf(1.0 - k)
}

/// Shrinking-window limit probe for a function continuous near x0. Windows
/// run 1e-3 down to 1e-8 (clamped so the probes stay inside the unit
/// interval) and stop once consecutive values agree to 1e-7.
fn window_limits(f: impl Fn(f64) -> f64, x0: f64) -> (f64, f64) {
    let max_w = (x0.min(1.0 - x0)) / 2.0;
    let mut left = f64::NAN;
    let mut right = f64::NAN;
    let mut prev: Option<(f64, f64)> = None;
    let mut w_raw = 1e-3f64;
    while w_raw >= 1e-8 {
        let w = w_raw.min(max_w);
        left = f(x0 - w);
        right = f(x0 + w);
        if let Some((pl, pr)) = prev {
            if (left - pl).abs() <= 1e-7 && (right - pr).abs() <= 1e-7 {
                break;
            }
        }
        prev = Some((left, right));
        w_raw *= 0.1;
    }
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn xsin() -> ProfileFunction {
        ProfileFunction::closed_form(1, ClosedForm::XSinInv).unwrap()
    }

    fn unit_step() -> ProfileFunction {
        ProfileFunction::step(vec![0.5], vec![0.0, 1.0]).unwrap()
    }

    #[test]
    fn evaluate_xsin_known_points() {
        let f = xsin();
        let x = 2.0 / std::f64::consts::PI;
        assert_abs_diff_eq!(f.evaluate(&[x]).unwrap(), x, epsilon = 1e-12);
        let x = 1.0 / std::f64::consts::PI;
        assert_abs_diff_eq!(f.evaluate(&[x]).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn evaluate_step_pieces() {
        let f = unit_step();
        assert_eq!(f.evaluate(&[0.25]).unwrap(), 0.0);
        assert_eq!(f.evaluate(&[0.75]).unwrap(), 1.0);
        // right-limit convention at the breakpoint
        assert_eq!(f.evaluate(&[0.5]).unwrap(), 1.0);
    }

    #[test]
    fn evaluate_rejects_outside_base() {
        let f = unit_step();
        assert!(matches!(f.evaluate(&[1.5]), Err(Error::Domain(_))));
        assert!(matches!(f.evaluate(&[0.1, 0.2]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn one_sided_limits_step() {
        let f = unit_step();
        let (l, r) = f.one_sided_limits(0.5).unwrap();
        assert_eq!((l, r), (0.0, 1.0));
    }

    #[test]
    fn one_sided_limits_xsin_interior() {
        let f = xsin();
        let expected = 0.3 * (1.0f64 / 0.3).sin();
        let (l, r) = f.one_sided_limits(0.3).unwrap();
        assert_abs_diff_eq!(l, expected, epsilon = 1e-6);
        assert_abs_diff_eq!(r, expected, epsilon = 1e-6);
    }

    #[test]
    fn one_sided_limits_constant() {
        let f = ProfileFunction::constant(1, 2.5).unwrap();
        for x0 in [0.1, 0.5, 0.9] {
            assert_eq!(f.one_sided_limits(x0).unwrap(), (2.5, 2.5));
        }
    }

    #[test]
    fn one_sided_limits_needs_1d() {
        let f = ProfileFunction::constant(2, 0.0).unwrap();
        assert!(matches!(f.one_sided_limits(0.5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn admissibility_step() {
        let rep = unit_step().admissibility_report().unwrap();
        assert!(rep.bounded);
        assert_eq!(rep.jump_count, JumpCount::Finite(1));
        assert_abs_diff_eq!(rep.max_jump, 1.0);
    }

    #[test]
    fn admissibility_xsin() {
        let rep = xsin().admissibility_report().unwrap();
        assert!(rep.bounded);
        assert_eq!(rep.jump_count, JumpCount::Finite(0));
    }

    #[test]
    fn admissibility_accumulating_dyadic() {
        let f = ProfileFunction::accumulating_dyadic();
        let rep = f.admissibility_report().unwrap();
        assert!(rep.bounded);
        assert_eq!(rep.jump_count, JumpCount::Countable);
        assert_abs_diff_eq!(rep.max_jump, 0.5);
    }

    #[test]
    fn dyadic_stair_jump_structure() {
        let f = ProfileFunction::accumulating_dyadic();
        // x_1 = 0.625 carries the largest jump: 2^-1
        let (l, r) = f.one_sided_limits(0.625).unwrap();
        assert_abs_diff_eq!(l, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-12);
        // continuous at the accumulation point
        let (l, r) = f.one_sided_limits(0.5).unwrap();
        assert_eq!((l, r), (0.0, 0.0));
        assert_eq!(f.evaluate(&[0.5]).unwrap(), 0.0);
    }

    #[test]
    fn sampled_exact_at_knots_linear_between() {
        let vals = vec![0.0, 1.0, 0.5, 2.0];
        let f = ProfileFunction::sampled(vals.clone()).unwrap();
        for (i, v) in vals.iter().enumerate() {
            let t = i as f64 / 3.0;
            assert_abs_diff_eq!(f.evaluate(&[t]).unwrap(), *v, epsilon = 1e-12);
        }
        let mid = f.evaluate(&[0.5]).unwrap(); // between knots 1 and 2
        assert_abs_diff_eq!(mid, 0.75, epsilon = 1e-12);
    }

    #[test]
    fn sampled_rejects_non_finite() {
        assert!(matches!(
            ProfileFunction::sampled(vec![0.0, f64::NAN, 1.0]),
            Err(Error::InvalidData(_))
        ));
    }

    #[test]
    fn piecewise_interval_lengths_sum_to_one() {
        let f = ProfileFunction::step(vec![0.25, 0.5, 0.75], vec![0.0, 1.0, 0.5, 0.25]).unwrap();
        if let ProfileKind::PiecewiseJump { breaks, .. } = f.kind() {
            let mut total = 0.0;
            let mut lo = 0.0;
            for &b in breaks.iter().chain(std::iter::once(&1.0)) {
                total += b - lo;
                lo = b;
            }
            assert_eq!(total, 1.0);
        } else {
            panic!("expected piecewise profile");
        }
    }

    #[test]
    fn evaluate_matches_limits_at_continuity_points() {
        for f in [xsin(), unit_step(), ProfileFunction::accumulating_dyadic()] {
            let n = 500;
            for i in 1..n {
                let t = i as f64 / n as f64;
                let (l, r) = f.one_sided_limits(t).unwrap();
                if (l - r).abs() < 1e-12 {
                    // continuity point: both limits match the value
                    assert_abs_diff_eq!(f.evaluate(&[t]).unwrap(), r, epsilon = 1e-6);
                }
            }
        }
    }
}
