//! Boundary topology of rasterized domains.

use super::raster::GridMask;
use crate::error::{Error, Result};

/// Count connected components of the boundary of a 2-D mask.
///
/// The boundary set consists of the excluded cells 8-adjacent to an included
/// cell, taken inside the mask's bounding box dilated by one cell; its
/// 8-connected components are counted. 4-connectivity would split diagonal
/// contacts and overcount.
pub fn boundary_components(mask: &GridMask) -> Result<usize> {
    let g = mask.grid();
    if g.dim() != 2 {
        return Err(Error::Unsupported("boundary labeling is 2-D only".into()));
    }
    if mask.cell_count() == 0 {
        return Err(Error::DegenerateDomain("empty mask".into()));
    }
    let (nx, ny) = (g.dims[0] as i64, g.dims[1] as i64);
    // dilated box: indices in [-1, n]
    let (ex, ey) = (nx + 2, ny + 2);
    let idx = |i: i64, j: i64| ((j + 1) * ex + (i + 1)) as usize;
    let inside_mask = |i: i64, j: i64| {
        i >= 0 && i < nx && j >= 0 && j < ny && mask.is_included((j * nx + i) as usize)
    };
    let mut boundary = vec![false; (ex * ey) as usize];
    for j in -1..=ny {
        for i in -1..=nx {
            if inside_mask(i, j) {
                continue;
            }
            'probe: for dj in -1..=1i64 {
                for di in -1..=1i64 {
                    if (di != 0 || dj != 0) && inside_mask(i + di, j + dj) {
                        boundary[idx(i, j)] = true;
                        break 'probe;
                    }
                }
            }
        }
    }
    // label 8-connected components of the boundary set
    let mut seen = vec![false; boundary.len()];
    let mut components = 0usize;
    let mut stack = Vec::new();
    for j in -1..=ny {
        for i in -1..=nx {
            let s = idx(i, j);
            if !boundary[s] || seen[s] {
                continue;
            }
            components += 1;
            seen[s] = true;
            stack.push((i, j));
            while let Some((ci, cj)) = stack.pop() {
                for dj in -1..=1i64 {
                    for di in -1..=1i64 {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let (ni, nj) = (ci + di, cj + dj);
                        if ni < -1 || ni > nx || nj < -1 || nj > ny {
                            continue;
                        }
                        let t = idx(ni, nj);
                        if boundary[t] && !seen[t] {
                            seen[t] = true;
                            stack.push((ni, nj));
                        }
                    }
                }
            }
        }
    }
    Ok(components)
}

/// Face-connected (4-connectivity in 2-D) components of the included cells.
/// Returns per-cell component labels (by local index) and component sizes,
/// largest first relabeled 0, 1, ...
pub fn mask_components(mask: &GridMask) -> (Vec<u32>, Vec<usize>) {
    let g = mask.grid();
    let n = mask.cell_count();
    let mut label = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    let dims = &g.dims;
    let strides: Vec<usize> = {
        let mut s = vec![1usize; dims.len()];
        for i in 1..dims.len() {
            s[i] = s[i - 1] * dims[i - 1];
        }
        s
    };
    for start in 0..n {
        if label[start] != u32::MAX {
            continue;
        }
        let comp = sizes.len() as u32;
        let mut size = 0usize;
        label[start] = comp;
        stack.push(start);
        while let Some(local) = stack.pop() {
            size += 1;
            let flat = mask.included()[local] as usize;
            let multi = g.multi(flat);
            for axis in 0..dims.len() {
                for dir in [-1i64, 1] {
                    let m = multi[axis] as i64 + dir;
                    if m < 0 || m >= dims[axis] as i64 {
                        continue;
                    }
                    let nflat = (flat as i64 + dir * strides[axis] as i64) as usize;
                    if let Some(nlocal) = mask.local_index(nflat) {
                        if label[nlocal] == u32::MAX {
                            label[nlocal] = comp;
                            stack.push(nlocal);
                        }
                    }
                }
            }
        }
        sizes.push(size);
    }
    // relabel so that component 0 is the largest
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by_key(|&c| std::cmp::Reverse(sizes[c]));
    let mut remap = vec![0u32; sizes.len()];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new as u32;
    }
    for l in label.iter_mut() {
        *l = remap[*l as usize];
    }
    let sorted_sizes: Vec<usize> = order.iter().map(|&c| sizes[c]).collect();
    (label, sorted_sizes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::raster::{rasterize, GridMask};
    use crate::domain::{BoxDomain, Domain};
    use crate::domain::raster::Grid;

    #[test]
    fn full_square_has_one_boundary_component() {
        let d = Domain::Box(BoxDomain::open(vec![0.0, 0.0], vec![1.0, 1.0]));
        let mask = rasterize(&d, 16).unwrap();
        assert_eq!(boundary_components(&mask).unwrap(), 1);
    }

    #[test]
    fn annulus_has_two_boundary_components() {
        let grid = Grid::covering(&[0.0, 0.0], &[1.0, 1.0], 16).unwrap();
        let nx = grid.dims[0];
        let ny = grid.dims[1];
        let mut cells = vec![false; grid.len()];
        for j in 0..ny {
            for i in 0..nx {
                let hole = (4..12).contains(&i) && (4..12).contains(&j);
                cells[j * nx + i] = !hole;
            }
        }
        let mask = GridMask::from_cells(grid, cells).unwrap();
        assert_eq!(boundary_components(&mask).unwrap(), 2);
    }

    #[test]
    fn two_blobs_have_two_mask_components() {
        let d = Domain::union(vec![
            Domain::Box(BoxDomain::open(vec![0.0, 0.0], vec![1.0, 1.0])),
            Domain::Box(BoxDomain::open(vec![2.0, 0.0], vec![3.0, 1.0])),
        ])
        .unwrap();
        let mask = rasterize(&d, 8).unwrap();
        let (_, sizes) = mask_components(&mask);
        assert_eq!(sizes.len(), 2);
        assert_eq!(sizes[0], sizes[1]);
    }
}
