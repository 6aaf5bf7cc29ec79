//! Inner Lipschitz approximants of planar elementary domains.
//!
//! For a profile with finitely many (or tail-summable) jumps the domain
//! between the curves `f + h/2` and `f + 1 - h/2` is squeezed to a polygon
//! V_h with U_h subset V_h subset U: piecewise-linear interpolation of f on a
//! grid refined until the per-cell oscillation drops below h/4, with straight
//! vertical segments bridging each jump. Straight segments stand in for any
//! smooth bridging curve; a Lipschitz boundary is all that is required.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Domain, ElementaryDomain, Polygon};
use crate::error::{Error, Result};
use crate::profile::ProfileKind;

#[derive(Debug, Clone, Copy)]
pub struct ApproxOptions {
    pub knot_budget: usize,
    pub containment_samples: usize,
    pub seed: u64,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        Self {
            knot_budget: 200_000,
            containment_samples: 100_000,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContainmentReport {
    pub samples: usize,
    /// points of U_h that fell outside V_h
    pub inner_violations: usize,
    /// points of V_h that fell outside U
    pub outer_violations: usize,
}

impl ContainmentReport {
    pub fn holds(&self) -> bool {
        self.inner_violations == 0 && self.outer_violations == 0
    }
}

#[derive(Debug, Clone)]
pub struct LipschitzApproximant {
    /// V_h in standard (pre-affine) coordinates.
    pub polygon: Polygon,
    /// V_h carried through the domain's affine part.
    pub domain: Domain,
    pub knot_count: usize,
    pub containment: ContainmentReport,
}

struct Piece {
    a: f64,
    b: f64,
    va: f64,
    vb: f64,
}

pub fn lipschitz_approximant(domain: &ElementaryDomain, h: f64) -> Result<LipschitzApproximant> {
    lipschitz_approximant_opts(domain, h, ApproxOptions::default())
}

pub fn lipschitz_approximant_opts(
    domain: &ElementaryDomain,
    h: f64,
    opts: ApproxOptions,
) -> Result<LipschitzApproximant> {
    if domain.dim() != 2 {
        return Err(Error::Unsupported(
            "Lipschitz approximants are built over a 1-D base".into(),
        ));
    }
    if !(h > 0.0 && h < 1.0 / 3.0) {
        return Err(Error::Parameter(format!("h = {h} outside (0, 1/3)")));
    }
    if domain.shrink_h() != 0.0 {
        return Err(Error::Parameter(
            "approximant applies to the unshrunk domain".into(),
        ));
    }
    let profile = domain.profile();

    // continuity pieces with one-sided endpoint values
    let jump_locs: Vec<f64> = match profile.kind() {
        ProfileKind::ClosedForm(_) | ProfileKind::Sampled { .. } => Vec::new(),
        ProfileKind::PiecewiseJump { breaks, .. } => breaks.clone(),
        ProfileKind::AccumulatingDyadic => {
            // jumps of size 2^-k; only those at least h/8 need explicit bridges,
            // the tail oscillates less than h/4 inside a single piece
            let k_cut = (8.0 / h).log2().ceil() as usize;
            let mut locs: Vec<f64> = profile
                .jumps(k_cut)
                .into_iter()
                .filter(|j| j.size() >= h / 8.0)
                .map(|j| j.location)
                .collect();
            locs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            locs
        }
    };
    let mut pieces = Vec::new();
    let mut lo = 0.0;
    for &loc in jump_locs.iter().chain(std::iter::once(&1.0)) {
        // the representations are right-continuous, so evaluation at the left
        // endpoint gives the right limit; the right endpoint needs the left
        // limit, answered exactly at declared breakpoints
        let va = profile.eval_unchecked(&[lo]);
        let vb = if loc == 1.0 {
            profile.eval_unchecked(&[1.0])
        } else {
            profile.one_sided_limits(loc)?.0
        };
        pieces.push(Piece {
            a: lo,
            b: loc,
            va,
            vb,
        });
        lo = loc;
    }

    // refine knots per piece until sampled oscillation < h/4
    let mut knots: Vec<(f64, f64)> = Vec::new(); // (x, f) along the graph, jumps doubled
    let mut knot_count = 0usize;
    for piece in &pieces {
        let piece_knots = refine_piece(profile, piece, h, opts.knot_budget)?;
        knot_count += piece_knots.len();
        if knot_count > opts.knot_budget {
            return Err(Error::ApproximationFailure(format!(
                "knot budget {} exceeded on piece [{}, {}]",
                opts.knot_budget, piece.a, piece.b
            )));
        }
        knots.extend(piece_knots);
    }

    // polygon: lower polyline at f + h/2 left to right, right edge, upper
    // polyline at f + 1 - h/2 right to left, closed by the left edge
    let mut vertices: Vec<[f64; 2]> = Vec::with_capacity(2 * knots.len() + 2);
    for &(x, f) in &knots {
        push_vertex(&mut vertices, [x, f + h / 2.0]);
    }
    for &(x, f) in knots.iter().rev() {
        push_vertex(&mut vertices, [x, f + 1.0 - h / 2.0]);
    }
    let polygon = Polygon::new(vertices);
    let affine = domain.affine().clone();
    let mapped = polygon.map_vertices(|v| {
        let out = affine.apply_vec(&v);
        [out[0], out[1]]
    });

    let containment = check_containment(domain, &polygon, h, &opts);
    Ok(LipschitzApproximant {
        polygon,
        domain: Domain::Polygon(mapped),
        knot_count,
        containment,
    })
}

fn push_vertex(vertices: &mut Vec<[f64; 2]>, v: [f64; 2]) {
    if let Some(last) = vertices.last() {
        if (last[0] - v[0]).abs() < 1e-15 && (last[1] - v[1]).abs() < 1e-15 {
            return;
        }
    }
    vertices.push(v);
}

/// Knots of the piecewise-linear interpolant on [piece.a, piece.b], endpoints
/// carrying their one-sided values.
fn refine_piece(
    profile: &crate::profile::ProfileFunction,
    piece: &Piece,
    h: f64,
    budget: usize,
) -> Result<Vec<(f64, f64)>> {
    let eval = |x: f64| -> f64 {
        if x <= piece.a {
            piece.va
        } else if x >= piece.b {
            piece.vb
        } else {
            profile.eval_unchecked(&[x])
        }
    };
    let threshold = h / 4.0;
    let mut queue = vec![(piece.a, piece.b)];
    let mut accepted: Vec<(f64, f64)> = Vec::new();
    let mut worst = (0.0f64, piece.a, piece.b);
    while let Some((a, b)) = queue.pop() {
        if accepted.len() + queue.len() > budget {
            return Err(Error::ApproximationFailure(format!(
                "oscillation {:.3e} >= h/4 = {:.3e} still unresolved on [{:.6}, {:.6}] with budget {}",
                worst.0, threshold, worst.1, worst.2, budget
            )));
        }
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        const PROBES: usize = 17;
        for i in 0..=PROBES {
            let x = a + (b - a) * i as f64 / PROBES as f64;
            let v = eval(x);
            min = min.min(v);
            max = max.max(v);
        }
        let osc = max - min;
        if osc < threshold || (b - a) < 1e-13 {
            accepted.push((a, b));
        } else {
            if osc > worst.0 {
                worst = (osc, a, b);
            }
            let mid = 0.5 * (a + b);
            queue.push((mid, b));
            queue.push((a, mid));
        }
    }
    accepted.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    let mut knots: Vec<(f64, f64)> = Vec::with_capacity(accepted.len() + 1);
    knots.push((piece.a, piece.va));
    for &(_, b) in &accepted {
        let v = if b >= piece.b { piece.vb } else { eval(b) };
        knots.push((b, v));
    }
    Ok(knots)
}

/// Sample U_h subset V_h subset U in standard coordinates.
fn check_containment(
    domain: &ElementaryDomain,
    polygon: &Polygon,
    h: f64,
    opts: &ApproxOptions,
) -> ContainmentReport {
    let profile = domain.profile();
    let m = profile.bound();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let in_u = |x: f64, y: f64| -> bool {
        if !(x > 0.0 && x < 1.0) {
            return false;
        }
        let f = profile.eval_unchecked(&[x]);
        y > f && y < f + 1.0
    };
    let in_uh = |x: f64, y: f64| -> bool {
        if !(x > h && x < 1.0 - h) {
            return false;
        }
        let f = profile.eval_unchecked(&[x]);
        y > f + h && y < f + 1.0 - h
    };
    let mut inner_violations = 0usize;
    let mut outer_violations = 0usize;
    let half = opts.containment_samples / 2;
    let mut accepted = 0usize;
    while accepted < half {
        let x = rng.gen_range(0.0..1.0);
        let y = rng.gen_range(-m..(1.0 + m));
        if in_uh(x, y) {
            accepted += 1;
            if !polygon.contains(x, y) {
                inner_violations += 1;
            }
        }
    }
    accepted = 0;
    let (lo, hi) = polygon.bbox();
    while accepted < half {
        let x = rng.gen_range(lo[0]..hi[0]);
        let y = rng.gen_range(lo[1]..hi[1]);
        if polygon.contains(x, y) {
            accepted += 1;
            if !in_u(x, y) {
                outer_violations += 1;
            }
        }
    }
    ContainmentReport {
        samples: 2 * half,
        inner_violations,
        outer_violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{AffineMap, ElementaryDomain};
    use crate::profile::{ClosedForm, ProfileFunction};

    #[test]
    fn constant_profile_gives_rectangle() {
        let u = ElementaryDomain::standard(ProfileFunction::constant(1, 0.0).unwrap());
        let v = lipschitz_approximant(&u, 0.2).unwrap();
        assert_eq!(v.polygon.vertices().len(), 4);
        assert!(v.containment.holds());
    }

    #[test]
    fn step_profile_containment_holds() {
        let u = ElementaryDomain::standard(
            ProfileFunction::step(vec![0.5], vec![0.0, 1.0]).unwrap(),
        );
        let v = lipschitz_approximant(&u, 0.3).unwrap();
        assert!(
            v.containment.holds(),
            "violations: {:?}",
            v.containment
        );
    }

    #[test]
    fn accumulating_profile_containment_holds() {
        let u = ElementaryDomain::standard(ProfileFunction::accumulating_dyadic());
        let v = lipschitz_approximant(&u, 0.25).unwrap();
        assert!(v.containment.holds(), "violations: {:?}", v.containment);
    }

    fn xsin_tail_domain(eps0: f64) -> ElementaryDomain {
        // f(x) = x sin(1/x) over the base (eps0, 1/pi), unit fiber
        let w = 1.0 / std::f64::consts::PI - eps0;
        let profile = ProfileFunction::closed_form(
            1,
            ClosedForm::Remap {
                inner: Box::new(ClosedForm::XSinInv),
                x_scale: w,
                x_offset: eps0,
                y_scale: 1.0,
            },
        )
        .unwrap();
        let affine = AffineMap::scale_translate(&[w, 1.0], &[eps0, 0.0]).unwrap();
        ElementaryDomain::new(profile, affine).unwrap()
    }

    #[test]
    fn oscillating_profile_knots_grow_toward_singularity() {
        let coarse = lipschitz_approximant(&xsin_tail_domain(0.05), 0.1).unwrap();
        let fine = lipschitz_approximant(&xsin_tail_domain(0.02), 0.1).unwrap();
        assert!(coarse.containment.holds(), "{:?}", coarse.containment);
        assert!(fine.containment.holds(), "{:?}", fine.containment);
        assert!(
            fine.knot_count > coarse.knot_count,
            "{} vs {}",
            fine.knot_count,
            coarse.knot_count
        );
    }

    #[test]
    fn knot_budget_exhaustion_reports_failure() {
        let opts = ApproxOptions {
            knot_budget: 8,
            ..Default::default()
        };
        let err = lipschitz_approximant_opts(&xsin_tail_domain(0.01), 0.05, opts).unwrap_err();
        assert!(matches!(err, Error::ApproximationFailure(_)), "{err}");
    }

    #[test]
    fn rejects_bad_h() {
        let u = ElementaryDomain::standard(ProfileFunction::constant(1, 0.0).unwrap());
        assert!(lipschitz_approximant(&u, 0.0).is_err());
        assert!(lipschitz_approximant(&u, 0.34).is_err());
    }
}
