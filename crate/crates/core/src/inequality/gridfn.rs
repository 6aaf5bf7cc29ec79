use crate::domain::raster::GridMask;
use crate::error::{Error, Result};

/// Real values on the included cells of a mask.
#[derive(Debug, Clone)]
pub struct GridFunction {
    mask: GridMask,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(mask: GridMask, values: Vec<f64>) -> Result<Self> {
        if values.len() != mask.cell_count() {
            return Err(Error::Dimension {
                expected: mask.cell_count(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite grid value".into()));
        }
        Ok(Self { mask, values })
    }

    pub fn from_fn(mask: &GridMask, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let g = mask.grid();
        let mut center = vec![0.0; g.dim()];
        let values = mask
            .included()
            .iter()
            .map(|&flat| {
                g.cell_center(flat as usize, &mut center);
                f(&center)
            })
            .collect();
        Self::new(mask.clone(), values)
    }

    pub fn constant(mask: &GridMask, c: f64) -> Self {
        Self {
            mask: mask.clone(),
            values: vec![c; mask.cell_count()],
        }
    }

    pub fn mask(&self) -> &GridMask {
        &self.mask
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// int |u|^2 over the mask (cell-sum quadrature).
    pub fn l2_sq(&self) -> f64 {
        let vol = self.mask.grid().cell_volume();
        self.values.iter().map(|v| v * v).sum::<f64>() * vol
    }

    /// int |u|^2 over a sub-mask on the same grid.
    pub fn l2_sq_on(&self, sub: &GridMask) -> Result<f64> {
        if !sub.subset_of(&self.mask) {
            return Err(Error::Parameter(
                "sub-mask is not contained in the function's mask".into(),
            ));
        }
        let vol = sub.grid().cell_volume();
        let mut total = 0.0;
        for &flat in sub.included() {
            let local = self
                .mask
                .local_index(flat as usize)
                .expect("subset guarantees inclusion");
            let v = self.values[local];
            total += v * v;
        }
        Ok(total * vol)
    }

    /// Mask-aware gradient samples: central differences where both axis
    /// neighbors are included, one-sided where one is, zero contribution
    /// where neither is.
    pub fn gradient_sq_samples(&self) -> Vec<f64> {
        let g = self.mask.grid();
        let dim = g.dim();
        let d = g.spacing;
        let strides: Vec<i64> = {
            let mut s = vec![1i64; dim];
            for i in 1..dim {
                s[i] = s[i - 1] * g.dims[i - 1] as i64;
            }
            s
        };
        let mut out = vec![0.0; self.values.len()];
        for (local, &flat) in self.mask.included().iter().enumerate() {
            let flat = flat as i64;
            let multi = g.multi(flat as usize);
            let mut grad_sq = 0.0;
            for axis in 0..dim {
                let minus = if multi[axis] > 0 {
                    self.mask.local_index((flat - strides[axis]) as usize)
                } else {
                    None
                };
                let plus = if multi[axis] + 1 < g.dims[axis] {
                    self.mask.local_index((flat + strides[axis]) as usize)
                } else {
                    None
                };
                let v = self.values[local];
                let der = match (minus, plus) {
                    (Some(m), Some(p)) => (self.values[p] - self.values[m]) / (2.0 * d),
                    (Some(m), None) => (v - self.values[m]) / d,
                    (None, Some(p)) => (self.values[p] - v) / d,
                    (None, None) => 0.0,
                };
                grad_sq += der * der;
            }
            out[local] = grad_sq;
        }
        out
    }

    /// int |grad u|^2 over the mask.
    pub fn grad_sq_integral(&self) -> f64 {
        let vol = self.mask.grid().cell_volume();
        self.gradient_sq_samples().iter().sum::<f64>() * vol
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_sq().sqrt()
    }

    /// Full H1 norm: sqrt(||u||_2^2 + ||grad u||_2^2).
    pub fn h1_norm(&self) -> f64 {
        (self.l2_sq() + self.grad_sq_integral()).sqrt()
    }
}
