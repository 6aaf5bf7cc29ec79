//! The interpolation (condition-2) margin check on rasterized domains:
//! ||u||_{L2(D)} <= a ||u||_{H1(D)} + b ||u||_{L2(D_h)} over random trial
//! functions, with D_h the vertical-only shrink on the same grid.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::raster::{rasterize, rasterize_on};
use crate::domain::{Domain, ShrinkMode};
use crate::error::{Error, Result};
use crate::inequality::GridFunction;
use crate::trig::TrigPoly;

#[derive(Debug, Clone)]
pub struct Condition2Report {
    pub h: f64,
    pub a: f64,
    pub b: f64,
    pub trials: usize,
    pub min_slack: f64,
    pub failures: usize,
    pub cells_per_unit: usize,
}

impl Condition2Report {
    pub fn all_pass(&self) -> bool {
        self.failures == 0
    }
}

pub fn condition2_check(
    domain: &Domain,
    cells_per_unit: usize,
    h: f64,
    a: f64,
    b: f64,
    trials: usize,
    seed: u64,
) -> Result<Condition2Report> {
    let mask = rasterize(domain, cells_per_unit)?;
    let shrunk = domain.shrink(h, ShrinkMode::VerticalOnly)?;
    let sub = rasterize_on(mask.grid().clone(), &shrunk).map_err(|e| match e {
        Error::DegenerateDomain(_) => Error::DegenerateDomain(format!(
            "shrink by h = {h} leaves no cells at {cells_per_unit} cells/unit"
        )),
        other => other,
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_slack = f64::INFINITY;
    let mut failures = 0usize;
    for _ in 0..trials {
        let poly = TrigPoly::random(domain.dim(), 4, &mut rng);
        let u = GridFunction::from_fn(&mask, |p| poly.eval(p))?;
        let l2 = u.l2_norm();
        let h1 = u.h1_norm();
        let l2h = u.l2_sq_on(&sub)?.sqrt();
        let slack = a * h1 + b * l2h - l2;
        min_slack = min_slack.min(slack);
        if slack < -1e-6 {
            failures += 1;
        }
    }
    Ok(Condition2Report {
        h,
        a,
        b,
        trials,
        min_slack,
        failures,
        cells_per_unit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::catalog;
    use crate::inequality::interpolation_constants;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_on_unit_square_slack() {
        let dom = catalog::unit_cube(2).unwrap();
        let mask = rasterize(&dom, 40).unwrap();
        let shrunk = dom.shrink(0.1, ShrinkMode::VerticalOnly).unwrap();
        let sub = rasterize_on(mask.grid().clone(), &shrunk).unwrap();
        let u = GridFunction::constant(&mask, 1.0);
        let slack = 0.2 * u.h1_norm() + 3f64.sqrt() * u.l2_sq_on(&sub).unwrap().sqrt()
            - u.l2_norm();
        assert_abs_diff_eq!(slack, 0.2 + 3f64.sqrt() * 0.8f64.sqrt() - 1.0, epsilon = 1e-12);
    }

    #[test]
    fn random_trials_on_step_domain_pass() {
        let dom = catalog::default_step_domain();
        let (a, b) = interpolation_constants(0.1).unwrap();
        let rep = condition2_check(&dom, 48, 0.1, a, b, 50, 7).unwrap();
        assert!(rep.all_pass(), "min slack {}", rep.min_slack);
        assert!(rep.min_slack > -1e-6);
    }

    #[test]
    fn zero_constants_fail_everything() {
        let dom = catalog::default_step_domain();
        let rep = condition2_check(&dom, 32, 0.1, 0.0, 0.0, 20, 7).unwrap();
        assert_eq!(rep.failures, 20);
        assert!(rep.min_slack < 0.0);
    }

    #[test]
    fn shrink_unsupported_domain_errors() {
        let dom = catalog::spiral_domain();
        assert!(condition2_check(&dom, 32, 0.1, 0.2, 1.7, 5, 7).is_err());
    }
}
