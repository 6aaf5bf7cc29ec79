//! Natural (Neumann-type) discretization of the Dirichlet and L2 forms on a
//! grid mask. Faces with a missing neighbor contribute nothing, which is the
//! discrete natural boundary condition.

use crate::domain::raster::GridMask;
use crate::domain::topology::mask_components;
use crate::error::{Error, Result};

/// Stiffness and mass forms over the included cells of a mask.
///
/// The stiffness realizes sum over interior faces of (difference/spacing)^2
/// times cell volume, stored as a cell adjacency graph with a uniform face
/// weight spacing^(n-2); the mass is spacing^n on the diagonal. The stiffness
/// annihilates constants exactly: its row entries are integer multiples of
/// the face weight.
#[derive(Debug, Clone)]
pub struct DiscreteForms {
    mask: GridMask,
    offsets: Vec<u32>,
    neighbors: Vec<u32>,
    face_weight: f64,
    cell_volume: f64,
}

impl DiscreteForms {
    /// Assemble on a connected mask; a disconnected mask is a topology error
    /// listing component sizes (assemble per component instead).
    pub fn assemble(mask: &GridMask) -> Result<Self> {
        let (_, sizes) = mask_components(mask);
        if sizes.len() != 1 {
            return Err(Error::Topology(sizes.len(), sizes));
        }
        Ok(Self::assemble_unchecked(mask))
    }

    /// One `DiscreteForms` per face-connected component, largest first.
    pub fn assemble_components(mask: &GridMask) -> Result<Vec<DiscreteForms>> {
        let (labels, sizes) = mask_components(mask);
        if sizes.len() == 1 {
            return Ok(vec![Self::assemble_unchecked(mask)]);
        }
        let grid = mask.grid();
        let mut out = Vec::with_capacity(sizes.len());
        for comp in 0..sizes.len() {
            let mut cells = vec![false; grid.len()];
            for (local, &flat) in mask.included().iter().enumerate() {
                if labels[local] == comp as u32 {
                    cells[flat as usize] = true;
                }
            }
            let sub = GridMask::from_cells(grid.clone(), cells)?;
            out.push(Self::assemble_unchecked(&sub));
        }
        Ok(out)
    }

    fn assemble_unchecked(mask: &GridMask) -> Self {
        let grid = mask.grid();
        let dim = grid.dim();
        let strides: Vec<i64> = {
            let mut s = vec![1i64; dim];
            for i in 1..dim {
                s[i] = s[i - 1] * grid.dims[i - 1] as i64;
            }
            s
        };
        let n = mask.cell_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        offsets.push(0u32);
        for &flat in mask.included() {
            let flat = flat as i64;
            let multi = grid.multi(flat as usize);
            for axis in 0..dim {
                for dir in [-1i64, 1] {
                    let m = multi[axis] as i64 + dir;
                    if m < 0 || m >= grid.dims[axis] as i64 {
                        continue;
                    }
                    if let Some(local) = mask.local_index((flat + dir * strides[axis]) as usize) {
                        neighbors.push(local as u32);
                    }
                }
            }
            offsets.push(neighbors.len() as u32);
        }
        DiscreteForms {
            mask: mask.clone(),
            offsets,
            neighbors,
            face_weight: grid.spacing.powi(dim as i32 - 2),
            cell_volume: grid.cell_volume(),
        }
    }

    pub fn mask(&self) -> &GridMask {
        &self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.cell_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn face_weight(&self) -> f64 {
        self.face_weight
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    pub fn degree(&self, i: usize) -> usize {
        (self.offsets[i + 1] - self.offsets[i]) as usize
    }

    pub fn neighbors_of(&self, i: usize) -> &[u32] {
        &self.neighbors[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    /// y = stiffness * x.
    pub fn apply_stiffness(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.len());
        for i in 0..self.len() {
            let deg = self.degree(i) as f64;
            let mut sum = 0.0;
            for &j in self.neighbors_of(i) {
                sum += x[j as usize];
            }
            y[i] = self.face_weight * (deg * x[i] - sum);
        }
    }

    /// y = mass * x (diagonal).
    pub fn apply_mass(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..x.len() {
            y[i] = self.cell_volume * x[i];
        }
    }

    /// Row sums of the assembled stiffness matrix, computed entry-wise the
    /// way the matrix is defined.
    pub fn stiffness_row_sums(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let mut sum = self.face_weight * self.degree(i) as f64;
                for _ in self.neighbors_of(i) {
                    sum -= self.face_weight;
                }
                sum
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::catalog;
    use crate::domain::raster::{rasterize, Grid, GridMask};

    fn single_cell_mask() -> GridMask {
        let grid = Grid {
            origin: vec![0.0, 0.0],
            spacing: 1.0,
            dims: vec![1, 1],
        };
        GridMask::from_cells(grid, vec![true]).unwrap()
    }

    #[test]
    fn single_cell_forms() {
        let forms = DiscreteForms::assemble(&single_cell_mask()).unwrap();
        let x = [2.0];
        let mut y = [1.0];
        forms.apply_stiffness(&x, &mut y);
        assert_eq!(y[0], 0.0);
        forms.apply_mass(&x, &mut y);
        assert_eq!(y[0], 2.0); // cell area 1
    }

    #[test]
    fn two_cell_mask_has_one_face_term() {
        let grid = Grid {
            origin: vec![0.0, 0.0],
            spacing: 0.5,
            dims: vec![2, 1],
        };
        let mask = GridMask::from_cells(grid, vec![true, true]).unwrap();
        let forms = DiscreteForms::assemble(&mask).unwrap();
        assert_eq!(forms.degree(0), 1);
        assert_eq!(forms.degree(1), 1);
        // energy of (0, 1): one face, weight spacing^0 = 1 in 2-D
        let x = [0.0, 1.0];
        let mut y = [0.0, 0.0];
        forms.apply_stiffness(&x, &mut y);
        let energy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        assert_eq!(energy, 1.0);
    }

    #[test]
    fn row_sums_vanish_exactly_on_unit_square() {
        let mask = rasterize(&catalog::unit_cube(2).unwrap(), 64).unwrap();
        let forms = DiscreteForms::assemble(&mask).unwrap();
        assert!(forms.stiffness_row_sums().iter().all(|&s| s == 0.0));
        // the constant vector is annihilated exactly as well
        let x = vec![0.3; forms.len()];
        let mut y = vec![1.0; forms.len()];
        forms.apply_stiffness(&x, &mut y);
        assert!(y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn disconnected_mask_is_topology_error() {
        let d = crate::domain::Domain::union(vec![
            crate::domain::Domain::Box(crate::domain::BoxDomain::open(
                vec![0.0, 0.0],
                vec![1.0, 1.0],
            )),
            crate::domain::Domain::Box(crate::domain::BoxDomain::open(
                vec![2.0, 0.0],
                vec![3.0, 1.0],
            )),
        ])
        .unwrap();
        let mask = rasterize(&d, 8).unwrap();
        match DiscreteForms::assemble(&mask) {
            Err(Error::Topology(n, sizes)) => {
                assert_eq!(n, 2);
                assert_eq!(sizes.len(), 2);
            }
            other => panic!("expected topology error, got {other:?}"),
        }
        let per = DiscreteForms::assemble_components(&mask).unwrap();
        assert_eq!(per.len(), 2);
    }

    #[test]
    fn unit_step_domain_splits_into_two_components() {
        // a jump of size one disconnects the open set between the graphs
        let mask = rasterize(&catalog::default_step_domain(), 16).unwrap();
        match DiscreteForms::assemble(&mask) {
            Err(Error::Topology(2, _)) => {}
            other => panic!("expected two components, got {other:?}"),
        }
    }

    #[test]
    fn stiffness_is_symmetric_psd_on_random_vectors() {
        use rand::{Rng, SeedableRng};
        // half-height step: the bands overlap, so the domain stays connected
        let dom = catalog::step_domain(vec![0.5], vec![0.0, 0.5]).unwrap();
        let mask = rasterize(&dom, 16).unwrap();
        let forms = DiscreteForms::assemble(&mask).unwrap();
        let n = forms.len();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let z: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut ax = vec![0.0; n];
            let mut az = vec![0.0; n];
            forms.apply_stiffness(&x, &mut ax);
            forms.apply_stiffness(&z, &mut az);
            let xtaz: f64 = x.iter().zip(&az).map(|(a, b)| a * b).sum();
            let ztax: f64 = z.iter().zip(&ax).map(|(a, b)| a * b).sum();
            assert!((xtaz - ztax).abs() < 1e-10 * xtaz.abs().max(1.0));
            let xtax: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum();
            assert!(xtax >= -1e-12);
        }
    }
}
