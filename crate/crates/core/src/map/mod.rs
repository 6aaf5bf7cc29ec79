//! Homeomorphisms as rule-carriers: forward/inverse/Jacobian rules,
//! quasiisometry and dilatation estimators, compositions, and the pullback
//! operator on grid functions.

mod analysis;
mod pullback;

pub use analysis::{
    dilatation, dilatation_rows, quasiisometry_constant, singular_values, DilatationReport,
    DilatationSample, QIReport,
};
pub use pullback::{pullback, PullbackField};

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

type ForwardRule = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type InverseRule = Arc<dyn Fn(&[f64]) -> Option<Vec<f64>> + Send + Sync>;
type JacobianRule = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// A homeomorphism with a forward rule, optional inverse rule, and optional
/// analytic Jacobian rule. Immutable once built; estimators are pure given a
/// seed.
#[derive(Clone)]
pub struct SmoothMap {
    name: String,
    dim: usize,
    forward: ForwardRule,
    inverse: Option<InverseRule>,
    jacobian_rule: Option<JacobianRule>,
    /// points where the differential degenerates or is undefined
    singular_points: Vec<Vec<f64>>,
}

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothMap")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("has_inverse", &self.inverse.is_some())
            .field("has_jacobian_rule", &self.jacobian_rule.is_some())
            .finish()
    }
}

impl SmoothMap {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn has_jacobian_rule(&self) -> bool {
        self.jacobian_rule.is_some()
    }

    pub fn singular_points(&self) -> &[Vec<f64>] {
        &self.singular_points
    }

    pub fn forward(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: p.len(),
            });
        }
        let q = (self.forward)(p);
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singularity(format!("{p:?} under {}", self.name)));
        }
        Ok(q)
    }

    pub fn inverse(&self, q: &[f64]) -> Result<Option<Vec<f64>>> {
        let rule = self
            .inverse
            .as_ref()
            .ok_or_else(|| Error::Unsupported(format!("{} has no inverse rule", self.name)))?;
        if q.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: q.len(),
            });
        }
        Ok(rule(q))
    }

    pub fn identity(dim: usize) -> Self {
        SmoothMap {
            name: "identity".into(),
            dim,
            forward: Arc::new(|p: &[f64]| p.to_vec()),
            inverse: Some(Arc::new(|q: &[f64]| Some(q.to_vec()))),
            jacobian_rule: Some(Arc::new(move |_: &[f64]| DMatrix::identity(dim, dim))),
            singular_points: Vec::new(),
        }
    }

    /// Similarity S_k(x) = k x.
    pub fn similarity(dim: usize, k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::Parameter(format!("similarity ratio {k} must be positive")));
        }
        Ok(SmoothMap {
            name: format!("similarity({k})"),
            dim,
            forward: Arc::new(move |p: &[f64]| p.iter().map(|x| k * x).collect()),
            inverse: Some(Arc::new(move |q: &[f64]| {
                Some(q.iter().map(|x| x / k).collect())
            })),
            jacobian_rule: Some(Arc::new(move |_: &[f64]| {
                DMatrix::identity(dim, dim) * k
            })),
            singular_points: Vec::new(),
        })
    }

    /// The spiral map in Cartesian target coordinates:
    /// F(s,t) = (rho cos th, rho sin th) with rho = s, th = 2 pi ln(t/s^2).
    ///
    /// The angle is unbounded, so a planar arctangent alone cannot invert F;
    /// the inverse rule picks the unique winding branch whose preimage lands
    /// in the strip {s < t < 2s} and reports None outside the image of that
    /// strip.
    pub fn spiral() -> Self {
        SmoothMap {
            name: "spiral".into(),
            dim: 2,
            forward: Arc::new(|p: &[f64]| {
                let (s, t) = (p[0], p[1]);
                if s <= 0.0 || t <= 0.0 {
                    return vec![f64::NAN, f64::NAN];
                }
                let theta = TAU * (t / (s * s)).ln();
                vec![s * theta.cos(), s * theta.sin()]
            }),
            inverse: Some(Arc::new(|q: &[f64]| {
                let rho = q[0].hypot(q[1]);
                if rho <= 0.0 {
                    return None;
                }
                let a = q[1].atan2(q[0]);
                // branch m with a + tau m in (-tau ln rho, -tau ln rho + tau ln 2)
                let z = (-TAU * rho.ln() - a) / TAU;
                let m = z.floor() + 1.0;
                if m >= z + std::f64::consts::LN_2 {
                    return None;
                }
                let theta = a + TAU * m;
                Some(vec![rho, rho * rho * (theta / TAU).exp()])
            })),
            jacobian_rule: Some(Arc::new(|p: &[f64]| {
                let (s, t) = (p[0], p[1]);
                let theta = TAU * (t / (s * s)).ln();
                let (sin, cos) = theta.sin_cos();
                let w = TAU * s / t;
                DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        cos + 2.0 * TAU * sin,
                        -w * sin,
                        sin - 2.0 * TAU * cos,
                        w * cos,
                    ],
                )
            })),
            singular_points: vec![vec![0.0, 0.0]],
        }
    }

    /// The radial power map x -> x |x|^(1/alpha - 1); its inverse is the
    /// power map with exponent alpha -> 1/alpha.
    pub fn power(dim: usize, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::Parameter(format!("alpha = {alpha} must be positive")));
        }
        let beta = 1.0 / alpha;
        let fwd = move |p: &[f64]| -> Vec<f64> {
            let r: f64 = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if r == 0.0 {
                return vec![0.0; p.len()];
            }
            let scale = r.powf(beta - 1.0);
            p.iter().map(|x| x * scale).collect()
        };
        let inv = move |q: &[f64]| -> Option<Vec<f64>> {
            let r: f64 = q.iter().map(|x| x * x).sum::<f64>().sqrt();
            if r == 0.0 {
                return Some(vec![0.0; q.len()]);
            }
            let scale = r.powf(alpha - 1.0);
            Some(q.iter().map(|x| x * scale).collect())
        };
        Ok(SmoothMap {
            name: format!("power({alpha})"),
            dim,
            forward: Arc::new(fwd),
            inverse: Some(Arc::new(inv)),
            jacobian_rule: Some(Arc::new(move |p: &[f64]| {
                // r^(b-1) I + (b-1) r^(b-3) x x^T
                let n = p.len();
                let r: f64 = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                let s1 = r.powf(beta - 1.0);
                let s2 = (beta - 1.0) * r.powf(beta - 3.0);
                DMatrix::from_fn(n, n, |i, j| {
                    let diag = if i == j { s1 } else { 0.0 };
                    diag + s2 * p[i] * p[j]
                })
            })),
            singular_points: if (beta - 1.0).abs() > 1e-15 {
                vec![vec![0.0; dim]]
            } else {
                Vec::new()
            },
        })
    }

    /// `outer` after `inner`. Inverse and Jacobian rules chain when both
    /// factors carry them.
    pub fn compose(outer: &SmoothMap, inner: &SmoothMap) -> Result<SmoothMap> {
        if outer.dim != inner.dim {
            return Err(Error::Dimension {
                expected: outer.dim,
                got: inner.dim,
            });
        }
        let name = format!("{}.{}", outer.name, inner.name);
        let (of, inf) = (outer.forward.clone(), inner.forward.clone());
        let forward: ForwardRule = Arc::new(move |p: &[f64]| of(&inf(p)));
        let inverse: Option<InverseRule> = match (&outer.inverse, &inner.inverse) {
            (Some(oi), Some(ii)) => {
                let (oi, ii) = (oi.clone(), ii.clone());
                Some(Arc::new(move |q: &[f64]| oi(q).and_then(|mid| ii(&mid))))
            }
            _ => None,
        };
        let jacobian_rule: Option<JacobianRule> = match (&outer.jacobian_rule, &inner.jacobian_rule)
        {
            (Some(oj), Some(ij)) => {
                let (oj, ij, inf) = (oj.clone(), ij.clone(), inner.forward.clone());
                Some(Arc::new(move |p: &[f64]| {
                    let mid = inf(p);
                    oj(&mid) * ij(p)
                }))
            }
            _ => None,
        };
        Ok(SmoothMap {
            name,
            dim: outer.dim,
            forward,
            inverse,
            jacobian_rule,
            singular_points: inner.singular_points.clone(),
        })
    }
}

/// Jacobi matrix at p: the analytic rule when present, otherwise central
/// differences with step 1e-6 (1 + |p|).
pub fn jacobian(map: &SmoothMap, p: &[f64]) -> Result<DMatrix<f64>> {
    if p.len() != map.dim {
        return Err(Error::Dimension {
            expected: map.dim,
            got: p.len(),
        });
    }
    for s in &map.singular_points {
        let d2: f64 = s.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
        if d2.sqrt() < 1e-12 {
            return Err(Error::Singularity(format!("{p:?} under {}", map.name)));
        }
    }
    if let Some(rule) = &map.jacobian_rule {
        let j = rule(p);
        if j.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singularity(format!("{p:?} under {}", map.name)));
        }
        return Ok(j);
    }
    finite_difference_jacobian(map, p)
}

pub fn finite_difference_jacobian(map: &SmoothMap, p: &[f64]) -> Result<DMatrix<f64>> {
    let n = map.dim;
    let norm: f64 = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    let delta = 1e-6 * (1.0 + norm);
    let mut j = DMatrix::zeros(n, n);
    let mut hi = p.to_vec();
    let mut lo = p.to_vec();
    for col in 0..n {
        hi[col] = p[col] + delta;
        lo[col] = p[col] - delta;
        let fh = map.forward(&hi)?;
        let fl = map.forward(&lo)?;
        for row in 0..n {
            j[(row, col)] = (fh[row] - fl[row]) / (2.0 * delta);
        }
        hi[col] = p[col];
        lo[col] = p[col];
    }
    Ok(j)
}

/// Max error of the similarity-composition identity for the spiral map:
/// S_{e^-(n-1)} o phi o S_{e^(n-1)} agrees with phi on the band T_n
/// (the winding angle shifts by a whole number of turns).
pub fn spiral_composition_check(n: u32, samples: usize, seed: u64) -> Result<f64> {
    use rand::SeedableRng;
    let spiral = SmoothMap::spiral();
    let k = ((n as f64) - 1.0).exp();
    let pre = SmoothMap::similarity(2, k)?;
    let post = SmoothMap::similarity(2, 1.0 / k)?;
    let composed = SmoothMap::compose(&post, &SmoothMap::compose(&spiral, &pre)?)?;
    let band = crate::domain::catalog::spiral_band(n);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let points = analysis::sample_in_domain(&band, samples, &mut rng)?;
    let mut max_err = 0.0f64;
    for p in &points {
        let a = spiral.forward(p)?;
        let b = composed.forward(p)?;
        let err = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        max_err = max_err.max(err);
    }
    Ok(max_err)
}
