//! Singular values, dilatation estimates, and quasiisometry constants.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{jacobian, SmoothMap};
use crate::domain::Domain;
use crate::error::{Error, Result};

const MIN_DET: f64 = 1e-12;

/// Singular values sorted ascending. 2x2 matrices take a closed-form path;
/// larger matrices go through an SVD.
pub fn singular_values(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData("non-finite matrix entry".into()));
    }
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Dimension {
            expected: n,
            got: m.ncols(),
        });
    }
    if n == 2 {
        let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let q1 = a * a + b * b + c * c + d * d;
        let det = a * d - b * c;
        let s = (q1 + 2.0 * det.abs()).sqrt();
        let t = (q1 - 2.0 * det.abs()).max(0.0).sqrt();
        return Ok(vec![0.5 * (s - t), 0.5 * (s + t)]);
    }
    let svd = m.clone().svd(false, false);
    let mut vals: Vec<f64> = svd.singular_values.iter().copied().collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(vals)
}

/// Per-sample Jacobian analysis.
#[derive(Debug, Clone)]
pub struct DilatationSample {
    pub point: Vec<f64>,
    pub abs_det: f64,
    pub singular_values: Vec<f64>,
    /// ||J||_F^2 / |det J|
    pub frob_ratio: f64,
    /// lambda_n / (lambda_1 ... lambda_{n-1})
    pub geom_ratio: f64,
}

/// Ess-sup estimates of the two dilatation functionals over a sample set.
///
/// `k_frob` uses the Frobenius norm of Def-style dilatation; `k_geom` the
/// singular-value form; they bracket each other by a dimensional factor.
/// `det_shells` traces max |det| over dyadic shells approaching the nearest
/// declared singular point (outermost shell first); a monotone rise across
/// the innermost shells flags an unbounded-looking determinant.
#[derive(Debug, Clone)]
pub struct DilatationReport {
    pub k_frob: f64,
    pub k_geom: f64,
    pub min_abs_det: f64,
    pub max_abs_det: f64,
    pub sample_count: usize,
    pub det_shells: Vec<(f64, f64)>,
    pub unbounded_det_suspected: bool,
}

pub fn dilatation_rows(map: &SmoothMap, samples: &[Vec<f64>]) -> Result<Vec<DilatationSample>> {
    let mut rows = Vec::with_capacity(samples.len());
    for p in samples {
        let j = jacobian(map, p)?;
        let abs_det = j.determinant().abs();
        if abs_det < MIN_DET {
            return Err(Error::DegenerateJacobian {
                sample: format!("{p:?}"),
                min_det: MIN_DET,
            });
        }
        let sv = singular_values(&j)?;
        let frob_sq: f64 = j.iter().map(|v| v * v).sum();
        let lambda_n = *sv.last().expect("square matrix");
        rows.push(DilatationSample {
            point: p.clone(),
            abs_det,
            singular_values: sv,
            frob_ratio: frob_sq / abs_det,
            geom_ratio: lambda_n * lambda_n / abs_det,
        });
    }
    Ok(rows)
}

pub fn dilatation(map: &SmoothMap, samples: &[Vec<f64>]) -> Result<DilatationReport> {
    if samples.is_empty() {
        return Err(Error::Parameter("empty sample set".into()));
    }
    let rows = dilatation_rows(map, samples)?;
    let mut k_frob = 0.0f64;
    let mut k_geom = 0.0f64;
    let mut min_det = f64::INFINITY;
    let mut max_det = 0.0f64;
    for r in &rows {
        k_frob = k_frob.max(r.frob_ratio);
        k_geom = k_geom.max(r.geom_ratio);
        min_det = min_det.min(r.abs_det);
        max_det = max_det.max(r.abs_det);
    }
    let det_shells = if map.singular_points().is_empty() {
        Vec::new()
    } else {
        let dist = |p: &[f64]| -> f64 {
            map.singular_points()
                .iter()
                .map(|s| {
                    s.iter()
                        .zip(p)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(f64::INFINITY, f64::min)
        };
        let d_max = rows.iter().map(|r| dist(&r.point)).fold(0.0f64, f64::max);
        let mut shells: Vec<(f64, f64)> = Vec::new();
        for r in &rows {
            let d = dist(&r.point);
            let shell = if d <= 0.0 {
                usize::MAX
            } else {
                ((d_max / d).log2().floor() as i64).clamp(0, 40) as usize
            };
            if shell == usize::MAX {
                continue;
            }
            while shells.len() <= shell {
                shells.push((d_max / (2f64).powi(shells.len() as i32), 0.0));
            }
            shells[shell].1 = shells[shell].1.max(r.abs_det);
        }
        shells.retain(|&(_, m)| m > 0.0);
        shells
    };
    // a determinant that doubles across dyadic shells toward the singular
    // point looks unbounded; comparing two shells apart tolerates a sparsely
    // populated innermost shell
    let unbounded_det_suspected = det_shells.len() >= 3 && {
        let t = det_shells.len();
        det_shells[t - 1].1 > 2.0 * det_shells[t - 3].1
    };
    Ok(DilatationReport {
        k_frob,
        k_geom,
        min_abs_det: min_det,
        max_abs_det: max_det,
        sample_count: rows.len(),
        det_shells,
        unbounded_det_suspected,
    })
}

/// Quasiisometry estimate: a certified lower bound on any admissible Q.
#[derive(Debug, Clone, Copy)]
pub struct QIReport {
    pub q_est: f64,
    pub ball_radius: f64,
    pub pair_count: usize,
}

/// Uniform rejection sampling inside a domain.
pub(crate) fn sample_in_domain(
    domain: &Domain,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<f64>>> {
    let (lo, hi) = domain.bounding_box();
    let n = lo.len();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    let limit = count.saturating_mul(10_000).max(1_000_000);
    let mut p = vec![0.0; n];
    while out.len() < count {
        attempts += 1;
        if attempts > limit {
            return Err(Error::Parameter(
                "rejection sampling failed: domain too thin for its bounding box".into(),
            ));
        }
        for i in 0..n {
            p[i] = rng.gen_range(lo[i]..hi[i]);
        }
        if domain.contains_unchecked(&p) {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| crate::trig::standard_normal(rng)).collect();
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Sample pairs y, z in balls B(x, r) inside the domain and maximize the
/// two-sided distortion max(ratio, 1/ratio). The radius is caller-supplied
/// and echoed in the report: the result is a lower bound on any Q valid at
/// that radius, not Q itself.
pub fn quasiisometry_constant(
    map: &SmoothMap,
    domain: &Domain,
    r: f64,
    trials: usize,
    seed: u64,
) -> Result<QIReport> {
    use rand::SeedableRng;
    if !(r > 0.0) {
        return Err(Error::Parameter(format!("ball radius {r} must be positive")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = domain.dim();
    // admissible centers: ball probes stay inside the domain
    let mut centers: Vec<Vec<f64>> = Vec::new();
    let mut attempts = 0usize;
    let wanted = 64.min(trials.max(1));
    while centers.len() < wanted {
        attempts += 1;
        if attempts > 200_000 {
            if centers.is_empty() {
                return Err(Error::Parameter(format!(
                    "no admissible ball centers at radius {r}; try a smaller radius"
                )));
            }
            break;
        }
        let cand = sample_in_domain(domain, 1, &mut rng)?.pop().expect("one sample");
        let ok = (0..24).all(|_| {
            let u = random_unit(&mut rng, n);
            let probe: Vec<f64> = cand.iter().zip(&u).map(|(c, d)| c + r * d).collect();
            domain.contains_unchecked(&probe)
        });
        if ok {
            centers.push(cand);
        }
    }
    let mut q_est = 1.0f64;
    let mut pairs = 0usize;
    let mut guard = 0usize;
    while pairs < trials {
        guard += 1;
        if guard > trials * 100 {
            break;
        }
        let x = &centers[pairs % centers.len()];
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            let u = random_unit(rng, n);
            let rad = r * rng.gen::<f64>().powf(1.0 / n as f64);
            x.iter().zip(&u).map(|(c, d)| c + rad * d).collect()
        };
        let y = draw(&mut rng);
        let z = draw(&mut rng);
        if !domain.contains_unchecked(&y) || !domain.contains_unchecked(&z) {
            continue;
        }
        let dist: f64 = y
            .iter()
            .zip(&z)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if dist < 1e-14 {
            continue;
        }
        let fy = map.forward(&y)?;
        let fz = map.forward(&z)?;
        let img: f64 = fy
            .iter()
            .zip(&fz)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let ratio = img / dist;
        if ratio > 0.0 {
            q_est = q_est.max(ratio).max(1.0 / ratio);
        }
        pairs += 1;
    }
    Ok(QIReport {
        q_est,
        ball_radius: r,
        pair_count: pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::catalog;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;

    #[test]
    fn singular_values_identity_and_diag() {
        let sv = singular_values(&DMatrix::identity(2, 2)).unwrap();
        assert_eq!(sv, vec![1.0, 1.0]);
        let sv = singular_values(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 3.0])).unwrap();
        assert_eq!(sv, vec![1.0, 3.0]);
    }

    #[test]
    fn singular_values_product_matches_det() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.5, -1.0, 3.0, 0.2, 0.1, 0.4, 1.5]);
        let sv = singular_values(&m).unwrap();
        let prod: f64 = sv.iter().product();
        let det = m.determinant().abs();
        assert!((prod - det).abs() <= 1e-9 * det);
    }

    #[test]
    fn spiral_jacobian_singular_value_identities() {
        let spiral = SmoothMap::spiral();
        let p = [0.5, 0.75];
        let j = jacobian(&spiral, &p).unwrap();
        let sv = singular_values(&j).unwrap();
        let tau = std::f64::consts::TAU;
        let pi = std::f64::consts::PI;
        assert_abs_diff_eq!(sv[0] * sv[1], tau * 0.5 / 0.75, epsilon = 1e-9);
        let frob = 1.0 + 16.0 * pi * pi + (tau * 0.5 / 0.75).powi(2);
        assert_abs_diff_eq!(sv[0] * sv[0] + sv[1] * sv[1], frob, epsilon = 1e-8);
    }

    #[test]
    fn identity_dilatation() {
        let id = SmoothMap::identity(2);
        let samples = vec![vec![0.1, 0.2], vec![0.5, 0.6], vec![0.9, 0.1]];
        let rep = dilatation(&id, &samples).unwrap();
        assert_abs_diff_eq!(rep.k_frob, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rep.k_geom, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn similarity_dilatation_is_scale_free() {
        for k in [0.1, 1.0, 7.3] {
            let s = SmoothMap::similarity(2, k).unwrap();
            let samples = vec![vec![0.3, 0.4]];
            let rep = dilatation(&s, &samples).unwrap();
            assert_abs_diff_eq!(rep.k_frob, 2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(rep.k_geom, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn power_map_dilatation_closed_form() {
        let phi = SmoothMap::power(2, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let dom = catalog::rectangle_chain(2.0, 40).unwrap();
        let samples = sample_in_domain(&dom, 2000, &mut rng).unwrap();
        let rep = dilatation(&phi, &samples).unwrap();
        // beta = 1/2: K_frob = (1 + beta^2)/beta = 2.5, K_geom = 1/beta = 2
        assert_abs_diff_eq!(rep.k_frob, 2.5, epsilon = 1e-6);
        assert_abs_diff_eq!(rep.k_geom, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn frob_geom_bracketing_invariant() {
        let spiral = SmoothMap::spiral();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let band = catalog::spiral_band(1);
        let samples = sample_in_domain(&band, 500, &mut rng).unwrap();
        let rows = dilatation_rows(&spiral, &samples).unwrap();
        for r in rows {
            assert!(r.geom_ratio <= r.frob_ratio + 1e-9);
            assert!(r.frob_ratio <= 2.0 * r.geom_ratio + 1e-9);
        }
    }

    #[test]
    fn degenerate_jacobian_is_reported() {
        use std::sync::Arc;
        // a rank-deficient linear map via composition of projections is not
        // constructible from the catalog; build one directly
        let squash = SmoothMap {
            name: "squash".into(),
            dim: 2,
            forward: Arc::new(|p: &[f64]| vec![p[0], 0.0]),
            inverse: None,
            jacobian_rule: None,
            singular_points: Vec::new(),
        };
        let err = dilatation(&squash, &[vec![0.3, 0.3]]).unwrap_err();
        assert!(matches!(err, Error::DegenerateJacobian { .. }), "{err}");
    }

    #[test]
    fn power_map_det_growth_flagged() {
        // beta < 1: |det| ~ r^(2(beta-1)) grows toward the origin
        let phi = SmoothMap::power(2, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let dom = catalog::rectangle_chain(1.0, 40).unwrap();
        let samples = sample_in_domain(&dom, 4000, &mut rng).unwrap();
        let rep = dilatation(&phi, &samples).unwrap();
        assert!(rep.unbounded_det_suspected, "shells: {:?}", rep.det_shells);
        // alpha < 1 shrinks the determinant toward the origin instead
        let phi_flat = SmoothMap::power(2, 0.5).unwrap();
        let rep = dilatation(&phi_flat, &samples).unwrap();
        assert!(!rep.unbounded_det_suspected, "shells: {:?}", rep.det_shells);
    }

    #[test]
    fn identity_quasiisometry() {
        let id = SmoothMap::identity(2);
        let dom = catalog::unit_cube(2).unwrap();
        let rep = quasiisometry_constant(&id, &dom, 0.05, 2000, 3).unwrap();
        assert_abs_diff_eq!(rep.q_est, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn similarity_quasiisometry_is_exact() {
        let s2 = SmoothMap::similarity(2, 2.0).unwrap();
        let dom = catalog::unit_cube(2).unwrap();
        let rep = quasiisometry_constant(&s2, &dom, 0.05, 2000, 3).unwrap();
        assert_abs_diff_eq!(rep.q_est, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn qi_estimate_monotone_in_trials() {
        let spiral = SmoothMap::spiral();
        let band = catalog::spiral_band(1);
        let r = 0.01 * (-2.0f64).exp();
        let small = quasiisometry_constant(&spiral, &band, r, 500, 11).unwrap();
        let large = quasiisometry_constant(&spiral, &band, r, 2000, 11).unwrap();
        assert!(large.q_est >= small.q_est - 1e-12);
    }

    #[test]
    fn qi_rejects_radius_larger_than_domain() {
        let id = SmoothMap::identity(2);
        let dom = catalog::unit_cube(2).unwrap();
        let err = quasiisometry_constant(&id, &dom, 5.0, 10, 3).unwrap_err();
        assert!(matches!(err, Error::Parameter(_)));
    }

    #[test]
    fn qi_product_law_on_matched_pairs() {
        // Q_est(S_k o phi o S_k1) <= k1 k Q_est(phi) (1 + 1e-6) when the
        // composed map is probed on the pre-scaled copies of the same pairs
        let spiral = SmoothMap::spiral();
        let band = catalog::spiral_band(1);
        let (k, k1) = (2.0, 1.5);
        let composed = SmoothMap::compose(
            &SmoothMap::similarity(2, k).unwrap(),
            &SmoothMap::compose(&spiral, &SmoothMap::similarity(2, k1).unwrap()).unwrap(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let r = 0.005;
        let centers = sample_in_domain(&band, 200, &mut rng).unwrap();
        let mut q_base = 1.0f64;
        let mut q_comp = 1.0f64;
        let ratio = |m: &SmoothMap, y: &[f64], z: &[f64]| -> f64 {
            let fy = m.forward(y).unwrap();
            let fz = m.forward(z).unwrap();
            let num: f64 = fy.iter().zip(&fz).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let den: f64 = y.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            num / den
        };
        for x in &centers {
            for _ in 0..20 {
                let u = random_unit(&mut rng, 2);
                let v = random_unit(&mut rng, 2);
                let y: Vec<f64> = x.iter().zip(&u).map(|(c, d)| c + r * d).collect();
                let z: Vec<f64> = x.iter().zip(&v).map(|(c, d)| c + r * d).collect();
                if !band.contains_unchecked(&y) || !band.contains_unchecked(&z) {
                    continue;
                }
                let rb = ratio(&spiral, &y, &z);
                q_base = q_base.max(rb).max(1.0 / rb);
                let ys: Vec<f64> = y.iter().map(|c| c / k1).collect();
                let zs: Vec<f64> = z.iter().map(|c| c / k1).collect();
                let rc = ratio(&composed, &ys, &zs);
                q_comp = q_comp.max(rc).max(1.0 / rc);
            }
        }
        assert!(
            q_comp <= k1 * k * q_base * (1.0 + 1e-6),
            "{q_comp} vs {}",
            k1 * k * q_base
        );
    }
}
