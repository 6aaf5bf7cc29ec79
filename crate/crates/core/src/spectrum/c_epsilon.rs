//! Finite-dimensional realization of the two-sided compactness criterion:
//! for nested norms ||.||_1 >= ||.||_2 >= ||.||_3, estimate the smallest
//! constant c(eps) with ||u||_2 <= eps ||u||_1 + c(eps) ||u||_3.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::raster::{rasterize, rasterize_on};
use crate::domain::{Domain, ShrinkMode};
use crate::error::{Error, Result};
use crate::spectrum::forms::DiscreteForms;
use crate::trig::standard_normal;

pub const MAX_TRIPLE_DIM: usize = 200;

/// Three nested symmetric positive-definite forms on R^d.
#[derive(Debug, Clone)]
pub struct NormTriple {
    d: usize,
    n1: DMatrix<f64>,
    n2: DMatrix<f64>,
    n3: DMatrix<f64>,
}

impl NormTriple {
    pub fn new(n1: DMatrix<f64>, n2: DMatrix<f64>, n3: DMatrix<f64>) -> Result<Self> {
        let d = n1.nrows();
        if d == 0 || d > MAX_TRIPLE_DIM {
            return Err(Error::Parameter(format!(
                "triple dimension {d} outside 1..={MAX_TRIPLE_DIM}"
            )));
        }
        for (name, m) in [("N1", &n1), ("N2", &n2), ("N3", &n3)] {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::Dimension {
                    expected: d,
                    got: m.nrows().max(m.ncols()),
                });
            }
            let asym = (m - m.transpose()).abs().max();
            if asym > 1e-10 * m.abs().max().max(1.0) {
                return Err(Error::Parameter(format!("{name} is not symmetric")));
            }
            if Cholesky::new(m.clone()).is_none() {
                return Err(Error::Parameter(format!("{name} is singular or indefinite")));
            }
        }
        let triple = Self { d, n1, n2, n3 };
        // ordering as quadratic forms, probed on random vectors
        let mut rng = ChaCha8Rng::seed_from_u64(0x0123_4567);
        for _ in 0..1000 {
            let u: Vec<f64> = (0..d).map(|_| standard_normal(&mut rng)).collect();
            let q1 = triple.quad(&triple.n1, &u);
            let q2 = triple.quad(&triple.n2, &u);
            let q3 = triple.quad(&triple.n3, &u);
            let tol = 1e-9 * q1.max(1.0);
            if q1 + tol < q2 || q2 + tol < q3 {
                return Err(Error::Parameter(
                    "norms are not nested: need ||u||_1 >= ||u||_2 >= ||u||_3".into(),
                ));
            }
        }
        Ok(triple)
    }

    pub fn euclidean(d: usize) -> Result<Self> {
        let id = DMatrix::identity(d, d);
        Self::new(id.clone(), id.clone(), id)
    }

    pub fn diagonal(d1: &[f64], d2: &[f64], d3: &[f64]) -> Result<Self> {
        let d = d1.len();
        let build = |v: &[f64]| DMatrix::from_fn(d, d, |i, j| if i == j { v[i] } else { 0.0 });
        Self::new(build(d1), build(d2), build(d3))
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    fn quad(&self, m: &DMatrix<f64>, u: &[f64]) -> f64 {
        let v = DVector::from_column_slice(u);
        (v.transpose() * m * &v)[(0, 0)]
    }

    pub fn norms(&self, u: &[f64]) -> (f64, f64, f64) {
        (
            self.quad(&self.n1, u).max(0.0).sqrt(),
            self.quad(&self.n2, u).max(0.0).sqrt(),
            self.quad(&self.n3, u).max(0.0).sqrt(),
        )
    }
}

/// Objective (||u||_2 - eps ||u||_1) / ||u||_3; scale-invariant, so it is
/// maximized over directions.
fn objective(triple: &NormTriple, eps: f64, u: &DVector<f64>) -> f64 {
    let q1 = (u.transpose() * &triple.n1 * u)[(0, 0)].max(0.0).sqrt();
    let q2 = (u.transpose() * &triple.n2 * u)[(0, 0)].max(0.0).sqrt();
    let q3 = (u.transpose() * &triple.n3 * u)[(0, 0)].max(0.0).sqrt();
    (q2 - eps * q1) / q3
}

/// Projected gradient ascent on the ||.||_1-unit sphere from one start.
fn ascend(triple: &NormTriple, eps: f64, start: DVector<f64>) -> DVector<f64> {
    let normalize = |u: &DVector<f64>| -> DVector<f64> {
        let q1 = (u.transpose() * &triple.n1 * u)[(0, 0)].sqrt();
        u / q1
    };
    let mut u = normalize(&start);
    let mut g = objective(triple, eps, &u);
    for _ in 0..200 {
        let n1u = &triple.n1 * &u;
        let n2u = &triple.n2 * &u;
        let n3u = &triple.n3 * &u;
        let q2 = u.dot(&n2u).max(1e-300).sqrt();
        let q3 = u.dot(&n3u).max(1e-300).sqrt();
        // d/du [(sqrt(q2) - eps)/sqrt(q3)] with q1 pinned to 1
        let grad = n2u / (q2 * q3) - n3u * ((q2 - eps) / (q3 * q3 * q3));
        // project onto the tangent space of the N1 sphere
        let along = grad.dot(&n1u);
        let tangent = grad - &u * along;
        if tangent.norm() <= 1e-12 * (1.0 + g.abs()) {
            break;
        }
        let mut step = 0.5;
        let mut advanced = false;
        while step > 1e-12 {
            let cand = normalize(&(&u + &tangent * step));
            let gc = objective(triple, eps, &cand);
            if gc > g + 1e-16 {
                u = cand;
                g = gc;
                advanced = true;
                break;
            }
            step *= 0.5;
        }
        if !advanced {
            break;
        }
    }
    u
}

/// Table of (eps, c(eps)), eps sorted ascending. The estimator runs
/// `starts` random projected ascents per eps, pools every stationary point,
/// and evaluates the pooled candidates under each eps; with a shared
/// candidate set the table is nonincreasing by construction, and it is
/// clamped below at zero.
pub fn find_c_epsilon(
    triple: &NormTriple,
    eps_list: &[f64],
    starts: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if eps_list.is_empty() {
        return Err(Error::Parameter("empty epsilon list".into()));
    }
    if eps_list.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Parameter("every epsilon must be positive".into()));
    }
    let mut eps_sorted: Vec<f64> = eps_list.to_vec();
    eps_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let d = triple.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<DVector<f64>> = Vec::new();
    for &eps in &eps_sorted {
        for _ in 0..starts {
            let start = DVector::from_fn(d, |_, _| standard_normal(&mut rng));
            candidates.push(ascend(triple, eps, start));
        }
    }
    let table: Vec<(f64, f64)> = eps_sorted
        .iter()
        .map(|&eps| {
            let best = candidates
                .iter()
                .map(|u| objective(triple, eps, u))
                .fold(f64::NEG_INFINITY, f64::max);
            (eps, best.max(0.0))
        })
        .collect();
    debug_assert!(table.windows(2).all(|w| w[0].1 >= w[1].1 - 1e-12));
    Ok(table)
}

/// A Sobolev-flavored triple on a coarse mask: N1 the H1 form, N2 the L2
/// form, N3 the L2 form of the vertical-only shrink blended with a delta of
/// the full mass so that it stays positive-definite:
/// N3 = (1-delta) M_h + delta M, which keeps N2 - N3 = (1-delta)(M - M_h)
/// positive semidefinite.
pub fn sobolev_triple(domain: &Domain, cells_per_unit: usize, h: f64) -> Result<NormTriple> {
    let mask = rasterize(domain, cells_per_unit)?;
    let d = mask.cell_count();
    if d > MAX_TRIPLE_DIM {
        return Err(Error::Parameter(format!(
            "{d} cells exceed the {MAX_TRIPLE_DIM}-dimensional triple budget; coarsen the grid"
        )));
    }
    let forms = DiscreteForms::assemble(&mask)?;
    let shrunk = domain.shrink(h, ShrinkMode::VerticalOnly)?;
    let sub = rasterize_on(mask.grid().clone(), &shrunk)?;
    let w = forms.face_weight();
    let vol = forms.cell_volume();
    let mut n1 = DMatrix::zeros(d, d);
    for i in 0..d {
        n1[(i, i)] = w * forms.degree(i) as f64 + vol;
        for &j in forms.neighbors_of(i) {
            n1[(i, j as usize)] -= w;
        }
    }
    let n2 = DMatrix::from_fn(d, d, |i, j| if i == j { vol } else { 0.0 });
    let delta = 1e-6;
    let n3 = DMatrix::from_fn(d, d, |i, j| {
        if i != j {
            return 0.0;
        }
        let flat = mask.included()[i] as usize;
        let in_sub = sub.is_included(flat);
        if in_sub {
            (1.0 - delta) * vol + delta * vol
        } else {
            delta * vol
        }
    });
    NormTriple::new(n1, n2, n3)
}
