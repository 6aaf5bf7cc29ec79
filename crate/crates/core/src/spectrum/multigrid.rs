//! Galerkin multigrid V-cycle for the shifted operator A + sigma M, used as
//! the preconditioner inside the blocked eigensolver.
//!
//! Coarsening aggregates 2^n fine cells by halving multi-indices; restriction
//! sums over children and prolongation injects, so each coarse operator is
//! the exact Galerkin product of the finer one.

use std::collections::HashMap;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::forms::DiscreteForms;

struct Level {
    n: usize,
    offsets: Vec<u32>,
    neighbors: Vec<u32>,
    weights: Vec<f64>,
    diag: Vec<f64>,
    /// fine local index -> coarse local index (on the next level)
    parent: Vec<u32>,
}

impl Level {
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut s = self.diag[i] * x[i];
            let lo = self.offsets[i] as usize;
            let hi = self.offsets[i + 1] as usize;
            for e in lo..hi {
                s -= self.weights[e] * x[self.neighbors[e] as usize];
            }
            y[i] = s;
        }
    }

    fn jacobi_sweep(&self, b: &[f64], x: &mut [f64], scratch: &mut [f64], omega: f64) {
        self.apply(x, scratch);
        for i in 0..self.n {
            x[i] += omega * (b[i] - scratch[i]) / self.diag[i];
        }
    }
}

pub struct MgPreconditioner {
    levels: Vec<Level>,
    coarse: Cholesky<f64, Dyn>,
    coarse_n: usize,
}

const COARSEST_MAX: usize = 400;
const SMOOTH_SWEEPS: usize = 2;
const JACOBI_OMEGA: f64 = 0.7;

impl MgPreconditioner {
    /// Build the hierarchy for T = A + sigma M over the mask of `forms`.
    pub fn new(forms: &DiscreteForms, sigma: f64) -> Self {
        let mask = forms.mask();
        let grid = mask.grid();
        let dim = grid.dim();
        let n = forms.len();
        // finest level straight from the forms
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            diag.push(forms.face_weight() * forms.degree(i) as f64 + sigma * forms.cell_volume());
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0u32);
        let mut neighbors = Vec::new();
        let mut weights = Vec::new();
        for i in 0..n {
            for &j in forms.neighbors_of(i) {
                neighbors.push(j);
                weights.push(forms.face_weight());
            }
            offsets.push(neighbors.len() as u32);
        }
        let mut coords: Vec<Vec<u32>> = mask
            .included()
            .iter()
            .map(|&flat| grid.multi(flat as usize).iter().map(|&m| m as u32).collect())
            .collect();
        let mut levels = vec![Level {
            n,
            offsets,
            neighbors,
            weights,
            diag,
            parent: Vec::new(),
        }];
        loop {
            let fine_n = levels.last().unwrap().n;
            if fine_n <= COARSEST_MAX {
                break;
            }
            let (level_parent, coarse_level, coarse_coords) =
                coarsen(levels.last().unwrap(), &coords, dim);
            let coarse_n = coarse_level.n;
            levels.last_mut().unwrap().parent = level_parent;
            if coarse_n * 10 > fine_n * 9 {
                // coarsening stalled; factor what we have
                levels.push(coarse_level);
                break;
            }
            levels.push(coarse_level);
            coords = coarse_coords;
        }
        let last = levels.last().unwrap();
        let mut dense = DMatrix::zeros(last.n, last.n);
        for i in 0..last.n {
            dense[(i, i)] = last.diag[i];
            let lo = last.offsets[i] as usize;
            let hi = last.offsets[i + 1] as usize;
            for e in lo..hi {
                dense[(i, last.neighbors[e] as usize)] -= last.weights[e];
            }
        }
        let coarse = Cholesky::new(dense).expect("shifted operator is positive definite");
        let coarse_n = last.n;
        MgPreconditioner {
            levels,
            coarse,
            coarse_n,
        }
    }

    pub fn levels(&self) -> usize {
        self.levels.len()
    }

    pub fn coarse_size(&self) -> usize {
        self.coarse_n
    }

    /// Approximate solve of T z = r by one V-cycle.
    pub fn apply(&self, r: &[f64], z: &mut [f64]) {
        self.vcycle(0, r, z);
    }

    fn vcycle(&self, l: usize, b: &[f64], x: &mut [f64]) {
        let level = &self.levels[l];
        if l + 1 == self.levels.len() {
            let sol = self.coarse.solve(&DVector::from_column_slice(b));
            x.copy_from_slice(sol.as_slice());
            return;
        }
        x.fill(0.0);
        let mut scratch = vec![0.0; level.n];
        for _ in 0..SMOOTH_SWEEPS {
            level.jacobi_sweep(b, x, &mut scratch, JACOBI_OMEGA);
        }
        // restrict residual by summing over children
        level.apply(x, &mut scratch);
        let coarse_n = self.levels[l + 1].n;
        let mut rc = vec![0.0; coarse_n];
        for i in 0..level.n {
            rc[level.parent[i] as usize] += b[i] - scratch[i];
        }
        let mut xc = vec![0.0; coarse_n];
        self.vcycle(l + 1, &rc, &mut xc);
        for i in 0..level.n {
            x[i] += xc[level.parent[i] as usize];
        }
        for _ in 0..SMOOTH_SWEEPS {
            level.jacobi_sweep(b, x, &mut scratch, JACOBI_OMEGA);
        }
    }
}

/// Galerkin coarse operator for parent aggregation by halved multi-indices.
fn coarsen(fine: &Level, coords: &[Vec<u32>], dim: usize) -> (Vec<u32>, Level, Vec<Vec<u32>>) {
    let mut key_to_id: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut coarse_coords: Vec<Vec<u32>> = Vec::new();
    let mut parent = Vec::with_capacity(fine.n);
    for c in coords {
        let key: Vec<u32> = c.iter().map(|&m| m / 2).collect();
        let id = *key_to_id.entry(key.clone()).or_insert_with(|| {
            coarse_coords.push(key.clone());
            (coarse_coords.len() - 1) as u32
        });
        parent.push(id);
    }
    let nc = coarse_coords.len();
    let mut diag = vec![0.0; nc];
    let mut off: HashMap<(u32, u32), f64> = HashMap::new();
    for i in 0..fine.n {
        let ci = parent[i];
        diag[ci as usize] += fine.diag[i];
        let lo = fine.offsets[i] as usize;
        let hi = fine.offsets[i + 1] as usize;
        for e in lo..hi {
            let j = fine.neighbors[e] as usize;
            let cj = parent[j];
            if ci == cj {
                diag[ci as usize] -= fine.weights[e];
            } else {
                *off.entry((ci, cj)).or_insert(0.0) += fine.weights[e];
            }
        }
    }
    let mut adjacency: Vec<Vec<(u32, f64)>> = vec![Vec::new(); nc];
    for (&(ci, cj), &w) in &off {
        adjacency[ci as usize].push((cj, w));
    }
    for list in adjacency.iter_mut() {
        list.sort_by_key(|&(j, _)| j);
    }
    let mut offsets = Vec::with_capacity(nc + 1);
    offsets.push(0u32);
    let mut neighbors = Vec::new();
    let mut weights = Vec::new();
    for list in &adjacency {
        for &(j, w) in list {
            neighbors.push(j);
            weights.push(w);
        }
        offsets.push(neighbors.len() as u32);
    }
    let _ = dim;
    let coarse = Level {
        n: nc,
        offsets,
        neighbors,
        weights,
        diag,
        parent: Vec::new(),
    };
    (parent, coarse, coarse_coords)
}
