//! Rough-domain construction: elementary domains under affine maps, shrunk
//! subdomains, finite unions, polygonal approximants, and the named example
//! domains, plus rasterization to grid masks and boundary topology.

mod affine;
pub mod approx;
pub mod catalog;
mod polygon;
pub mod raster;
pub mod topology;

pub use affine::AffineMap;
pub use polygon::Polygon;
pub use raster::{Grid, GridMask};

use crate::error::{Error, Result};
use crate::profile::ProfileFunction;

/// How a shrink parameter h acts on an elementary domain.
///
/// `AllDirections` shrinks every base coordinate and the vertical fiber
/// (the subcube `[h, 1-h]^n` shifted by the profile); `VerticalOnly` shrinks
/// only the fiber, which is the variant produced fiberwise by the
/// one-dimensional interior inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShrinkMode {
    AllDirections,
    VerticalOnly,
}

/// The open set between a profile graph and its unit vertical shift over the
/// base cube, carried through an invertible affine map.
#[derive(Debug, Clone)]
pub struct ElementaryDomain {
    profile: ProfileFunction,
    dim: usize,
    shrink_h: f64,
    shrink_mode: ShrinkMode,
    affine: AffineMap,
}

impl ElementaryDomain {
    /// Standard elementary domain (identity affine part).
    pub fn standard(profile: ProfileFunction) -> Self {
        let dim = profile.base_dim() + 1;
        Self {
            profile,
            dim,
            shrink_h: 0.0,
            shrink_mode: ShrinkMode::AllDirections,
            affine: AffineMap::identity(dim),
        }
    }

    pub fn new(profile: ProfileFunction, affine: AffineMap) -> Result<Self> {
        let dim = profile.base_dim() + 1;
        if affine.dim() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: affine.dim(),
            });
        }
        Ok(Self {
            profile,
            dim,
            shrink_h: 0.0,
            shrink_mode: ShrinkMode::AllDirections,
            affine,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn profile(&self) -> &ProfileFunction {
        &self.profile
    }

    pub fn affine(&self) -> &AffineMap {
        &self.affine
    }

    pub fn shrink_h(&self) -> f64 {
        self.shrink_h
    }

    pub fn shrink_mode(&self) -> ShrinkMode {
        self.shrink_mode
    }

    /// The shrunk subdomain U_h. Always relative to the unshrunk domain.
    pub fn shrink(&self, h: f64, mode: ShrinkMode) -> Result<Self> {
        if !(0.0..1.0 / 3.0).contains(&h) {
            return Err(Error::Parameter(format!(
                "shrink parameter h = {h} outside [0, 1/3)"
            )));
        }
        if self.shrink_h != 0.0 {
            return Err(Error::Parameter(
                "shrink applies to the unshrunk domain".into(),
            ));
        }
        let mut d = self.clone();
        d.shrink_h = h;
        d.shrink_mode = mode;
        Ok(d)
    }

    /// Apply a further affine map to the whole domain.
    pub fn transformed(&self, a: &AffineMap) -> Result<Self> {
        let mut d = self.clone();
        d.affine = a.compose(&self.affine)?;
        Ok(d)
    }

    fn contains_unchecked(&self, p: &[f64]) -> bool {
        let n = self.dim;
        let mut q = vec![0.0; n];
        self.affine.apply_inverse(p, &mut q);
        let (h, base_h) = match self.shrink_mode {
            ShrinkMode::AllDirections => (self.shrink_h, self.shrink_h),
            ShrinkMode::VerticalOnly => (self.shrink_h, 0.0),
        };
        for &c in &q[..n - 1] {
            if !(c > base_h && c < 1.0 - base_h) {
                return false;
            }
        }
        let f = self.profile.eval_unchecked(&q[..n - 1]);
        q[n - 1] > f + h && q[n - 1] < f + 1.0 - h
    }

    /// Conservative bounding box (ignores shrink): the affine image of
    /// base cube x [-M, 1+M], M the profile bound.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim;
        let m = self.profile.bound();
        let mut lo = vec![0.0; n];
        let mut hi = vec![1.0; n];
        lo[n - 1] = -m;
        hi[n - 1] = 1.0 + m;
        self.affine.image_bbox(&lo, &hi)
    }
}

/// Axis-aligned box with per-face closedness flags. Closed faces matter for
/// the rectangle-chain construction, where the small rectangles include their
/// bottom edge so the union meets the square below.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub closed_lo: Vec<bool>,
    pub closed_hi: Vec<bool>,
}

impl BoxDomain {
    pub fn open(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        let n = lo.len();
        Self {
            lo,
            hi,
            closed_lo: vec![false; n],
            closed_hi: vec![false; n],
        }
    }

    fn contains_unchecked(&self, p: &[f64]) -> bool {
        for i in 0..self.lo.len() {
            let lo_ok = if self.closed_lo[i] {
                p[i] >= self.lo[i]
            } else {
                p[i] > self.lo[i]
            };
            let hi_ok = if self.closed_hi[i] {
                p[i] <= self.hi[i]
            } else {
                p[i] < self.hi[i]
            };
            if !(lo_ok && hi_ok) {
                return false;
            }
        }
        true
    }
}

/// Planar image of the strip triangle `{s_lo < s < s_hi, s < t < 2s}` under
/// the spiral map `(s,t) -> (s cos th, s sin th)`, `th = 2 pi ln(t/s^2)`.
///
/// Membership is decided analytically: a point with polar radius `rho` and
/// base angle `a` lies in the image iff some branch `a + 2 pi m` falls inside
/// the window `(-2 pi ln rho, -2 pi ln rho + 2 pi ln 2)`; the window is
/// narrower than a full turn, so at most one branch qualifies.
#[derive(Debug, Clone, PartialEq)]
pub struct SpiralDomain {
    pub s_lo: f64,
    pub s_hi: f64,
}

impl SpiralDomain {
    fn contains_unchecked(&self, p: &[f64]) -> bool {
        let rho = p[0].hypot(p[1]);
        if !(rho > self.s_lo && rho < self.s_hi) {
            return false;
        }
        let a = p[1].atan2(p[0]);
        // branch index window: m in (z, z + ln 2)
        let z = (-2.0 * std::f64::consts::PI * rho.ln() - a) / std::f64::consts::TAU;
        let m = z.floor() + 1.0;
        m < z + std::f64::consts::LN_2
    }
}

/// A geometric domain: an elementary domain, a polygonal Lipschitz part, a
/// box, the spiral image, or a finite union.
#[derive(Debug, Clone)]
pub enum Domain {
    Elementary(ElementaryDomain),
    Box(BoxDomain),
    Polygon(Polygon),
    Spiral(SpiralDomain),
    Union(Vec<Domain>),
}

impl Domain {
    pub fn union(parts: Vec<Domain>) -> Result<Domain> {
        if parts.is_empty() {
            return Err(Error::Parameter("union needs at least one part".into()));
        }
        let dim = parts[0].dim();
        for p in &parts {
            if p.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: p.dim(),
                });
            }
        }
        Ok(Domain::Union(parts))
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Elementary(d) => d.dim(),
            Domain::Box(b) => b.lo.len(),
            Domain::Polygon(_) | Domain::Spiral(_) => 2,
            Domain::Union(parts) => parts[0].dim(),
        }
    }

    /// Interior membership. Boundary points (exact equality on an open face)
    /// report false.
    pub fn contains(&self, p: &[f64]) -> Result<bool> {
        if p.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: p.len(),
            });
        }
        Ok(self.contains_unchecked(p))
    }

    pub(crate) fn contains_unchecked(&self, p: &[f64]) -> bool {
        match self {
            Domain::Elementary(d) => d.contains_unchecked(p),
            Domain::Box(b) => b.contains_unchecked(p),
            Domain::Polygon(poly) => poly.contains(p[0], p[1]),
            Domain::Spiral(s) => s.contains_unchecked(p),
            Domain::Union(parts) => parts.iter().any(|d| d.contains_unchecked(p)),
        }
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::Elementary(d) => d.bounding_box(),
            Domain::Box(b) => (b.lo.clone(), b.hi.clone()),
            Domain::Polygon(p) => {
                let (lo, hi) = p.bbox();
                (lo.to_vec(), hi.to_vec())
            }
            Domain::Spiral(s) => (vec![-s.s_hi; 2], vec![s.s_hi; 2]),
            Domain::Union(parts) => {
                let n = self.dim();
                let mut lo = vec![f64::INFINITY; n];
                let mut hi = vec![f64::NEG_INFINITY; n];
                for part in parts {
                    let (plo, phi) = part.bounding_box();
                    for i in 0..n {
                        lo[i] = lo[i].min(plo[i]);
                        hi[i] = hi[i].max(phi[i]);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Shrink by h where defined: elementary domains directly, unions
    /// part-by-part. Other variants carry no profile structure to shrink.
    pub fn shrink(&self, h: f64, mode: ShrinkMode) -> Result<Domain> {
        match self {
            Domain::Elementary(d) => Ok(Domain::Elementary(d.shrink(h, mode)?)),
            Domain::Union(parts) => {
                let shrunk: Result<Vec<Domain>> =
                    parts.iter().map(|p| p.shrink(h, mode)).collect();
                Ok(Domain::Union(shrunk?))
            }
            _ => Err(Error::Unsupported(
                "shrink is defined for elementary domains and their unions".into(),
            )),
        }
    }
}

impl From<ElementaryDomain> for Domain {
    fn from(d: ElementaryDomain) -> Self {
        Domain::Elementary(d)
    }
}
