//! Random trigonometric polynomials with exact derivatives.
//!
//! The test family used throughout the property suites:
//! `u(x) = sum_k c_k cos(pi k.x + phi_k)` with integer wave vectors
//! `|k|_inf <= K` and standard-normal coefficients. Smooth, cheap to
//! differentiate exactly, and dense enough for desk-scale checks.

use rand::Rng;

#[derive(Debug, Clone)]
pub struct TrigPoly {
    dim: usize,
    /// (coefficient, wave vector, phase)
    terms: Vec<(f64, Vec<i32>, f64)>,
}

impl TrigPoly {
    /// Draw a random polynomial with max frequency `k_max` per axis.
    pub fn random(dim: usize, k_max: u32, rng: &mut impl Rng) -> Self {
        let mut terms = Vec::new();
        let mut wave = vec![0i32; dim];
        gen_waves(dim, k_max as i32, &mut wave, 0, &mut |w: &[i32]| {
            let c = standard_normal(rng);
            let phi = rng.gen::<f64>() * std::f64::consts::TAU;
            terms.push((c, w.to_vec(), phi));
        });
        TrigPoly { dim, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let mut s = 0.0;
        for (c, k, phi) in &self.terms {
            let mut arg = *phi;
            for (ki, xi) in k.iter().zip(x) {
                arg += std::f64::consts::PI * (*ki as f64) * xi;
            }
            s += c * arg.cos();
        }
        s
    }

    /// Exact gradient.
    pub fn grad(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        out.fill(0.0);
        for (c, k, phi) in &self.terms {
            let mut arg = *phi;
            for (ki, xi) in k.iter().zip(x) {
                arg += std::f64::consts::PI * (*ki as f64) * xi;
            }
            let s = -c * arg.sin() * std::f64::consts::PI;
            for (o, ki) in out.iter_mut().zip(k) {
                *o += s * (*ki as f64);
            }
        }
    }

    /// Exact derivative for 1-D polynomials.
    pub fn deriv1(&self, x: f64) -> f64 {
        let mut g = [0.0];
        self.grad(&[x], &mut g);
        g[0]
    }
}

/// Enumerate wave vectors with |k|_inf <= k_max, first nonzero component
/// positive (the mirrored vector spans the same basis function).
fn gen_waves(dim: usize, k_max: i32, wave: &mut [i32], axis: usize, emit: &mut impl FnMut(&[i32])) {
    if axis == dim {
        if let Some(first) = wave.iter().find(|&&k| k != 0) {
            if *first < 0 {
                return;
            }
        }
        emit(wave);
        return;
    }
    for k in -k_max..=k_max {
        wave[axis] = k;
        gen_waves(dim, k_max, wave, axis + 1, emit);
    }
}

/// Box-Muller standard normal.
pub fn standard_normal(rng: &mut impl Rng) -> f64 {
    loop {
        let u1: f64 = rng.gen();
        if u1 <= f64::MIN_POSITIVE {
            continue;
        }
        let u2: f64 = rng.gen();
        return (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = TrigPoly::random(2, 3, &mut rng);
        let p = [0.31, 0.57];
        let mut g = [0.0, 0.0];
        u.grad(&p, &mut g);
        let d = 1e-6;
        for axis in 0..2 {
            let mut hi = p;
            let mut lo = p;
            hi[axis] += d;
            lo[axis] -= d;
            let fd = (u.eval(&hi) - u.eval(&lo)) / (2.0 * d);
            assert!((fd - g[axis]).abs() < 1e-5, "axis {axis}: fd {fd} vs {}", g[axis]);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let a = TrigPoly::random(1, 8, &mut ChaCha8Rng::seed_from_u64(42));
        let b = TrigPoly::random(1, 8, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a.eval(&[0.4]), b.eval(&[0.4]));
    }
}
