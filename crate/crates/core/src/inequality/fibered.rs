use super::gridfn::GridFunction;
use super::InequalityReport;
use crate::domain::raster::rasterize_on;
use crate::domain::{Domain, ElementaryDomain, ShrinkMode};
use crate::error::{Error, Result};

/// Fibered interior bound on an elementary domain:
/// int_U |u|^2 <= 3 int_{U_h} |u|^2 + 4h^2 int_U |grad u|^2.
///
/// With `VerticalOnly` this is the one-dimensional interior bound integrated
/// over the base and must hold up to quadrature tolerance; `AllDirections`
/// is exposed as an experiment and its outcome is reported, not asserted.
pub fn fibered_interior_bound(
    u: &GridFunction,
    domain: &ElementaryDomain,
    h: f64,
    mode: ShrinkMode,
) -> Result<InequalityReport> {
    if !(h > 0.0 && h < 1.0 / 3.0) {
        return Err(Error::Parameter(format!("h = {h} outside (0, 1/3)")));
    }
    if domain.shrink_h() != 0.0 {
        return Err(Error::Parameter(
            "the fibered bound applies to the unshrunk domain".into(),
        ));
    }
    let shrunk: Domain = domain.shrink(h, mode)?.into();
    let sub = rasterize_on(u.mask().grid().clone(), &shrunk)?;
    let lhs = u.l2_sq();
    let rhs = 3.0 * u.l2_sq_on(&sub)? + 4.0 * h * h * u.grad_sq_integral();
    let tolerance = 1e-6 * lhs.abs().max(rhs.abs()).max(1.0);
    Ok(InequalityReport {
        rule: "fibered_interior",
        lhs,
        rhs,
        slack: rhs - lhs,
        holds: lhs <= rhs + tolerance,
        tolerance,
        constants: vec![("three", 3.0), ("four_h_sq", 4.0 * h * h)],
    })
}

/// The interpolation constants implied by the fibered bound:
/// sqrt(3 A + 4h^2 B) <= sqrt(3) sqrt(A) + 2h sqrt(B) gives
/// ||u||_{L2(U)} <= 2h ||u||_{H1(U)} + sqrt(3) ||u||_{L2(U_h)},
/// i.e. a(h) = 2h and b = sqrt(3).
pub fn interpolation_constants(h: f64) -> Result<(f64, f64)> {
    if !(h > 0.0 && h < 1.0 / 3.0) {
        return Err(Error::Parameter(format!("h = {h} outside (0, 1/3)")));
    }
    Ok((2.0 * h, 3f64.sqrt()))
}

/// Check ||u||_{L2(U)} <= 2h ||u||_{H1(U)} + sqrt(3) ||u||_{L2(U_h)} with the
/// vertical-only shrink.
pub fn verify_interpolation(
    u: &GridFunction,
    domain: &ElementaryDomain,
    h: f64,
) -> Result<InequalityReport> {
    let (a, b) = interpolation_constants(h)?;
    let shrunk: Domain = domain.shrink(h, ShrinkMode::VerticalOnly)?.into();
    let sub = rasterize_on(u.mask().grid().clone(), &shrunk)?;
    let lhs = u.l2_norm();
    let rhs = a * u.h1_norm() + b * u.l2_sq_on(&sub)?.sqrt();
    let tolerance = 1e-6 * lhs.abs().max(rhs.abs()).max(1.0);
    Ok(InequalityReport {
        rule: "interpolation",
        lhs,
        rhs,
        slack: rhs - lhs,
        holds: lhs <= rhs + tolerance,
        tolerance,
        constants: vec![("a", a), ("b", b)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::catalog;
    use crate::domain::raster::rasterize;
    use crate::trig::TrigPoly;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_square_elem() -> ElementaryDomain {
        ElementaryDomain::standard(crate::profile::ProfileFunction::constant(1, 0.0).unwrap())
    }

    #[test]
    fn constant_on_unit_square() {
        let dom = unit_square_elem();
        let mask = rasterize(&dom.clone().into(), 50).unwrap();
        let u = GridFunction::constant(&mask, 1.0);
        let r = fibered_interior_bound(&u, &dom, 0.2, ShrinkMode::VerticalOnly).unwrap();
        assert_abs_diff_eq!(r.lhs, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.rhs, 1.8, epsilon = 1e-12);
        assert!(r.holds);
    }

    #[test]
    fn vertical_coordinate_matches_1d_closed_form() {
        let dom = unit_square_elem();
        let mask = rasterize(&dom.clone().into(), 200).unwrap();
        let u = GridFunction::from_fn(&mask, |p| p[1]).unwrap();
        let r = fibered_interior_bound(&u, &dom, 0.2, ShrinkMode::VerticalOnly).unwrap();
        // fiber-wise identical to the 1-D case: lhs = 1/3, rhs = 0.504 + 0.16
        assert_abs_diff_eq!(r.lhs, 1.0 / 3.0, epsilon = 2e-3);
        assert_abs_diff_eq!(r.rhs, 0.664, epsilon = 4e-3);
        assert!(r.holds);
    }

    #[test]
    fn random_trig_on_step_domain_holds() {
        let dom = match catalog::default_step_domain() {
            Domain::Elementary(e) => e,
            _ => unreachable!(),
        };
        let mask = rasterize(&dom.clone().into(), 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for h in [0.05, 0.1, 0.2] {
            for _ in 0..20 {
                let poly = TrigPoly::random(2, 3, &mut rng);
                let u = GridFunction::from_fn(&mask, |p| poly.eval(p)).unwrap();
                let r = fibered_interior_bound(&u, &dom, h, ShrinkMode::VerticalOnly).unwrap();
                assert!(
                    r.slack >= -1e-6 * r.lhs,
                    "h={h} slack {} lhs {}",
                    r.slack,
                    r.lhs
                );
            }
        }
    }

    #[test]
    fn interpolation_constant_values() {
        let (a, b) = interpolation_constants(0.1).unwrap();
        assert_abs_diff_eq!(a, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 1.7320508075688772, epsilon = 1e-12);
        assert!(interpolation_constants(0.4).is_err());
    }

    #[test]
    fn interpolation_on_constant_function() {
        let dom = unit_square_elem();
        let mask = rasterize(&dom.clone().into(), 50).unwrap();
        let u = GridFunction::constant(&mask, 1.0);
        let r = verify_interpolation(&u, &dom, 0.1).unwrap();
        assert_abs_diff_eq!(r.lhs, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.rhs, 0.2 + 3f64.sqrt() * 0.8f64.sqrt(), epsilon = 1e-12);
        assert!(r.holds);
    }
}
