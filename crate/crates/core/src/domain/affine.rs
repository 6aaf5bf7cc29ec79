use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Invertible affine map `p -> A p + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
    translation: DVector<f64>,
    det: f64,
}

impl AffineMap {
    pub fn new(matrix: DMatrix<f64>, translation: Vec<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n || translation.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: translation.len().max(matrix.ncols()),
            });
        }
        let det = matrix.clone().lu().determinant();
        if det.abs() <= 1e-12 {
            return Err(Error::Parameter(format!(
                "affine matrix is singular (|det| = {:e})",
                det.abs()
            )));
        }
        let inverse = matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Parameter("affine matrix is not invertible".into()))?;
        Ok(Self {
            matrix,
            inverse,
            translation: DVector::from_vec(translation),
            det,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n), vec![0.0; n]).expect("identity is invertible")
    }

    /// Diagonal scaling plus translation.
    pub fn scale_translate(scales: &[f64], translation: &[f64]) -> Result<Self> {
        let n = scales.len();
        let m = DMatrix::from_fn(n, n, |i, j| if i == j { scales[i] } else { 0.0 });
        Self::new(m, translation.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn translation(&self) -> &DVector<f64> {
        &self.translation
    }

    pub fn apply(&self, p: &[f64], out: &mut [f64]) {
        for i in 0..self.dim() {
            let mut s = self.translation[i];
            for j in 0..self.dim() {
                s += self.matrix[(i, j)] * p[j];
            }
            out[i] = s;
        }
    }

    pub fn apply_vec(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.apply(p, &mut out);
        out
    }

    pub fn apply_inverse(&self, p: &[f64], out: &mut [f64]) {
        for i in 0..self.dim() {
            let mut s = 0.0;
            for j in 0..self.dim() {
                s += self.inverse[(i, j)] * (p[j] - self.translation[j]);
            }
            out[i] = s;
        }
    }

    /// `self` after `other`: `p -> self(other(p))`.
    pub fn compose(&self, other: &AffineMap) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let m = &self.matrix * &other.matrix;
        let t = &self.matrix * &other.translation + &self.translation;
        Self::new(m, t.iter().copied().collect())
    }

    /// Axis-aligned bounding box of the image of the box [lo, hi].
    pub fn image_bbox(&self, lo: &[f64], hi: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim();
        let mut center = vec![0.0; n];
        let mut half = vec![0.0; n];
        for i in 0..n {
            center[i] = 0.5 * (lo[i] + hi[i]);
            half[i] = 0.5 * (hi[i] - lo[i]);
        }
        let c_img = self.apply_vec(&center);
        let mut out_lo = vec![0.0; n];
        let mut out_hi = vec![0.0; n];
        for i in 0..n {
            let mut r = 0.0;
            for j in 0..n {
                r += self.matrix[(i, j)].abs() * half[j];
            }
            out_lo[i] = c_img[i] - r;
            out_hi[i] = c_img[i] + r;
        }
        (out_lo, out_hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let a = AffineMap::new(
            DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -0.5, 3.0]),
            vec![0.7, -1.2],
        )
        .unwrap();
        let p = [0.3, 0.9];
        let q = a.apply_vec(&p);
        let mut back = [0.0, 0.0];
        a.apply_inverse(&q, &mut back);
        assert!((back[0] - p[0]).abs() < 1e-12);
        assert!((back[1] - p[1]).abs() < 1e-12);
    }

    #[test]
    fn rejects_singular() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(AffineMap::new(m, vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn compose_order() {
        let s2 = AffineMap::scale_translate(&[2.0, 2.0], &[0.0, 0.0]).unwrap();
        let shift = AffineMap::scale_translate(&[1.0, 1.0], &[1.0, 0.0]).unwrap();
        // scale after shift: p -> 2(p + e1)
        let c = s2.compose(&shift).unwrap();
        assert_eq!(c.apply_vec(&[0.0, 0.0]), vec![2.0, 0.0]);
    }
}
