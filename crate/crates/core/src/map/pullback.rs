//! The composition operator u -> u o phi on grid functions.

use super::SmoothMap;
use crate::domain::raster::GridMask;
use crate::error::{Error, Result};
use crate::inequality::GridFunction;

#[derive(Debug, Clone)]
pub struct PullbackField {
    pub field: GridFunction,
    /// target cells whose image missed the source mask
    pub invalid_cells: usize,
}

/// Evaluate (phi* u)(p) = u(phi(p)) at the centers of the target mask,
/// multilinear interpolation on the source grid with weights renormalized
/// over included source cells. Cells mapping outside the source are dropped
/// from the result mask; more than 1% of them is a coverage error.
pub fn pullback(u: &GridFunction, map: &SmoothMap, target: &GridMask) -> Result<PullbackField> {
    let src_mask = u.mask();
    let src_grid = src_mask.grid();
    let tgt_grid = target.grid();
    if map.dim() != tgt_grid.dim() || src_grid.dim() != map.dim() {
        return Err(Error::Dimension {
            expected: map.dim(),
            got: tgt_grid.dim(),
        });
    }
    let n = tgt_grid.dim();
    let corners = 1usize << n;
    let mut center = vec![0.0; n];
    let mut cells = vec![false; tgt_grid.len()];
    let mut values = Vec::with_capacity(target.cell_count());
    let mut invalid = 0usize;
    for &flat in target.included() {
        tgt_grid.cell_center(flat as usize, &mut center);
        let q = match map.forward(&center) {
            Ok(q) => q,
            Err(_) => {
                invalid += 1;
                continue;
            }
        };
        // position in source cell-center coordinates
        let mut base = vec![0i64; n];
        let mut frac = vec![0.0; n];
        let mut in_grid = true;
        for i in 0..n {
            let s = (q[i] - src_grid.origin[i]) / src_grid.spacing - 0.5;
            let b = s.floor();
            if b < -1.0 || b >= src_grid.dims[i] as f64 {
                in_grid = false;
                break;
            }
            base[i] = b as i64;
            frac[i] = s - b;
        }
        if !in_grid {
            invalid += 1;
            continue;
        }
        let mut acc = 0.0;
        let mut weight = 0.0;
        for corner in 0..corners {
            let mut w = 1.0;
            let mut ok = true;
            let mut flat_src = 0i64;
            let mut stride = 1i64;
            for i in 0..n {
                let up = (corner >> i) & 1 == 1;
                let idx = base[i] + if up { 1 } else { 0 };
                w *= if up { frac[i] } else { 1.0 - frac[i] };
                if idx < 0 || idx >= src_grid.dims[i] as i64 {
                    ok = false;
                    break;
                }
                flat_src += idx * stride;
                stride *= src_grid.dims[i] as i64;
            }
            if !ok || w == 0.0 {
                continue;
            }
            if let Some(local) = src_mask.local_index(flat_src as usize) {
                acc += w * u.values()[local];
                weight += w;
            }
        }
        if weight < 1e-9 {
            invalid += 1;
            continue;
        }
        cells[flat as usize] = true;
        values.push(acc / weight);
    }
    let total = target.cell_count();
    if invalid * 100 > total {
        return Err(Error::Coverage { invalid, total });
    }
    let mask = GridMask::from_cells(tgt_grid.clone(), cells)?;
    Ok(PullbackField {
        field: GridFunction::new(mask, values)?,
        invalid_cells: invalid,
    })
}
