//! Named example domains addressable from the CLI.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::{AffineMap, BoxDomain, Domain, ElementaryDomain, Polygon, SpiralDomain};
use crate::error::{Error, Result};
use crate::profile::{ClosedForm, ProfileFunction};

/// The open unit cube (0,1)^n as an elementary domain with zero profile.
pub fn unit_cube(n: usize) -> Result<Domain> {
    if n < 2 {
        return Err(Error::Parameter("unit_cube needs dimension >= 2".into()));
    }
    Ok(ElementaryDomain::standard(ProfileFunction::constant(n - 1, 0.0)?).into())
}

/// Elementary domain over a piecewise-constant profile on the unit base.
pub fn step_domain(breaks: Vec<f64>, values: Vec<f64>) -> Result<Domain> {
    Ok(ElementaryDomain::standard(ProfileFunction::step(breaks, values)?).into())
}

/// Default single-step domain: profile 0 on [0, 1/2), 1 on [1/2, 1].
pub fn default_step_domain() -> Domain {
    step_domain(vec![0.5], vec![0.0, 1.0]).expect("valid step profile")
}

/// The two parts (U, V) of the component-count example:
/// U = {0 < x1 < 1/pi, x1 sin(1/x1) < x2 < x1 sin(1/x1) + 4},
/// V = (0, 1/pi) x (-2, 0).
pub(crate) fn sin_component_parts() -> (ElementaryDomain, BoxDomain) {
    // standard profile rescaled so the affine image has fiber height 4:
    // f~(u) = (1/4) (u/pi) sin(pi/u), affine = diag(1/pi, 4)
    let profile = ProfileFunction::closed_form(
        1,
        ClosedForm::Remap {
            inner: Box::new(ClosedForm::XSinInv),
            x_scale: 1.0 / PI,
            x_offset: 0.0,
            y_scale: 0.25,
        },
    )
    .expect("valid profile");
    let affine = AffineMap::scale_translate(&[1.0 / PI, 4.0], &[0.0, 0.0]).expect("diagonal");
    let u = ElementaryDomain::new(profile, affine).expect("dimensions match");
    let v = BoxDomain::open(vec![0.0, -2.0], vec![1.0 / PI, 0.0]);
    (u, v)
}

/// Union U cup V whose boundary has countably many connected components.
pub fn sin_component_domain() -> Result<Domain> {
    let (u, v) = sin_component_parts();
    Domain::union(vec![u.into(), Domain::Box(v)])
}

/// The triangle T = {0 < s < 1, s < t < 2s} (preimage of the spiral domain).
pub fn spiral_triangle() -> Domain {
    Domain::Polygon(Polygon::new(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 2.0]]))
}

/// The band T_n = {e^-(n+1) < s < e^-(n-1), s < t < 2s}.
pub fn spiral_band(n: u32) -> Domain {
    let a = (-(n as f64 + 1.0)).exp();
    let b = (-(n as f64 - 1.0)).exp();
    Domain::Polygon(Polygon::new(vec![
        [a, a],
        [b, b],
        [b, 2.0 * b],
        [a, 2.0 * a],
    ]))
}

/// Image of T under the spiral map: an elementary spiral plane domain.
pub fn spiral_domain() -> Domain {
    Domain::Spiral(SpiralDomain { s_lo: 0.0, s_hi: 1.0 })
}

/// Image of T_n under the spiral map.
pub fn spiral_domain_band(n: u32) -> Domain {
    Domain::Spiral(SpiralDomain {
        s_lo: (-(n as f64 + 1.0)).exp(),
        s_hi: (-(n as f64 - 1.0)).exp(),
    })
}

/// Union of rectangles T_k = {|x1 - 2^-ak| <= 2^-a(k+2), 0 <= x2 < 2^-a(k+2)}
/// over k = 1..k_max with the square Q = (0,1) x (-1,0). The infinite chain is
/// truncated: tail rectangles fall below cell resolution at any desk-scale
/// grid. k_max defaults to 40.
pub fn rectangle_chain(alpha: f64, k_max: usize) -> Result<Domain> {
    if !(alpha > 0.0) {
        return Err(Error::Parameter(format!("alpha = {alpha} must be positive")));
    }
    if k_max == 0 {
        return Err(Error::Parameter("k_max must be at least 1".into()));
    }
    let mut parts = vec![Domain::Box(BoxDomain::open(
        vec![0.0, -1.0],
        vec![1.0, 0.0],
    ))];
    for k in 1..=k_max {
        let c = (2f64).powf(-alpha * k as f64);
        let r = (2f64).powf(-alpha * (k as f64 + 2.0));
        parts.push(Domain::Box(BoxDomain {
            lo: vec![c - r, 0.0],
            hi: vec![c + r, r],
            closed_lo: vec![true, true],
            closed_hi: vec![true, false],
        }));
    }
    Domain::union(parts)
}

pub const DEFAULT_CHAIN_KMAX: usize = 40;

/// Catalog dispatcher: name plus numeric parameters.
///
/// Names: `unit_cube` (param `dim`), `unit_square`, `step` (default single
/// step), `sin_component`, `spiral_triangle`, `spiral`, `rectangle_chain`
/// (params `alpha`, `k_max`).
pub fn by_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Domain> {
    match name {
        "unit_cube" => {
            let dim = params.get("dim").copied().unwrap_or(2.0) as usize;
            unit_cube(dim)
        }
        "unit_square" => unit_cube(2),
        "step" | "step_domain" => Ok(default_step_domain()),
        "sin_component" | "sin_component_domain" => sin_component_domain(),
        "spiral_triangle" => Ok(spiral_triangle()),
        "spiral" | "spiral_domain" => Ok(spiral_domain()),
        "rectangle_chain" => {
            let alpha = params.get("alpha").copied().unwrap_or(1.0);
            let k_max = params
                .get("k_max")
                .map(|&k| k as usize)
                .unwrap_or(DEFAULT_CHAIN_KMAX);
            rectangle_chain(alpha, k_max)
        }
        other => Err(Error::UnknownName(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cube_membership() {
        let d = unit_cube(2).unwrap();
        assert!(d.contains(&[0.5, 0.5]).unwrap());
        assert!(!d.contains(&[1.5, 0.5]).unwrap());
    }

    #[test]
    fn rectangle_chain_first_rectangle() {
        // alpha = 1: T_1 = {|x1 - 1/2| <= 1/8, 0 <= x2 < 1/8}
        let d = rectangle_chain(1.0, 40).unwrap();
        assert!(d.contains(&[0.5, 0.0]).unwrap()); // closed bottom edge
        assert!(d.contains(&[0.375, 0.01]).unwrap()); // closed left edge
        assert!(d.contains(&[0.625, 0.124]).unwrap());
        assert!(!d.contains(&[0.5, 0.125]).unwrap()); // open top
        assert!(!d.contains(&[0.626, 0.01]).unwrap());
        assert!(!d.contains(&[0.7, 0.05]).unwrap()); // between T_1 and nothing
    }

    #[test]
    fn rectangle_chain_rejects_bad_alpha() {
        assert!(rectangle_chain(0.0, 40).is_err());
        assert!(rectangle_chain(-1.0, 40).is_err());
    }

    #[test]
    fn sin_component_membership_examples() {
        let d = sin_component_domain().unwrap();
        assert!(d.contains(&[0.1, -1.0]).unwrap()); // inside V
        // f(0.1) + 4 = 0.1 sin(10) + 4 ~ 3.9456, so 5.0 is above U
        assert!(!d.contains(&[0.1, 5.0]).unwrap());
        assert!(d.contains(&[0.1, 3.9]).unwrap());
        assert!(d.contains(&[1.0 / (2.0 * PI), 1.0]).unwrap());
    }

    #[test]
    fn spiral_domain_contains_map_images() {
        // the image of an interior point of T must lie in the spiral domain
        let d = spiral_domain();
        let (s, t) = (0.5f64, 0.75f64);
        let theta = 2.0 * PI * (t / (s * s)).ln();
        let p = [s * theta.cos(), s * theta.sin()];
        assert!(d.contains(&p).unwrap());
        // rho >= 1 is outside
        assert!(!d.contains(&[0.9, 0.9]).unwrap());
    }

    #[test]
    fn dispatcher_knows_all_names() {
        let params = BTreeMap::new();
        for name in [
            "unit_cube",
            "unit_square",
            "step",
            "sin_component",
            "spiral_triangle",
            "spiral",
            "rectangle_chain",
        ] {
            assert!(by_name(name, &params).is_ok(), "missing {name}");
        }
        assert!(matches!(
            by_name("nonsense", &params),
            Err(Error::UnknownName(_))
        ));
    }
}
