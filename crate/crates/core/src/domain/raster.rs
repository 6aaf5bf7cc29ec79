//! Uniform grids and boolean cell masks.
//!
//! A cell belongs to a mask iff the domain contains its center; this keeps
//! rasterization monotone under domain inclusion and trivially consistent
//! under refinement.

use std::fmt::Write as _;

use super::Domain;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub origin: Vec<f64>,
    pub spacing: f64,
    pub dims: Vec<usize>,
}

impl Grid {
    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim() as i32)
    }

    /// Row-major flat index (first axis fastest).
    pub fn flat(&self, multi: &[usize]) -> usize {
        let mut idx = 0;
        let mut stride = 1;
        for (i, &m) in multi.iter().enumerate() {
            idx += m * stride;
            stride *= self.dims[i];
        }
        idx
    }

    pub fn multi(&self, flat: usize) -> Vec<usize> {
        let mut rest = flat;
        self.dims
            .iter()
            .map(|&d| {
                let m = rest % d;
                rest /= d;
                m
            })
            .collect()
    }

    pub fn cell_center(&self, flat: usize, out: &mut [f64]) {
        let mut rest = flat;
        for (i, &d) in self.dims.iter().enumerate() {
            let m = rest % d;
            rest /= d;
            out[i] = self.origin[i] + (m as f64 + 0.5) * self.spacing;
        }
    }

    /// Grid aligned to multiples of `1/cells_per_unit` covering [lo, hi].
    pub fn covering(lo: &[f64], hi: &[f64], cells_per_unit: usize) -> Result<Grid> {
        if cells_per_unit < 2 {
            return Err(Error::Parameter(
                "cells_per_unit must be at least 2".into(),
            ));
        }
        let spacing = 1.0 / cells_per_unit as f64;
        let mut origin = Vec::with_capacity(lo.len());
        let mut dims = Vec::with_capacity(lo.len());
        for i in 0..lo.len() {
            if !(hi[i] > lo[i]) {
                return Err(Error::DegenerateDomain(format!(
                    "empty bounding box on axis {i}"
                )));
            }
            let o = (lo[i] / spacing).floor() * spacing;
            origin.push(o);
            dims.push(((hi[i] - o) / spacing).ceil().max(1.0) as usize);
        }
        Ok(Grid {
            origin,
            spacing,
            dims,
        })
    }
}

/// Boolean cell mask on a grid, with a cached list of included cells and the
/// inverse map from flat grid index to local (included-cell) index.
#[derive(Debug, Clone)]
pub struct GridMask {
    grid: Grid,
    cells: Vec<bool>,
    included: Vec<u32>,
    local: Vec<u32>,
}

const NOT_INCLUDED: u32 = u32::MAX;

impl GridMask {
    pub fn from_cells(grid: Grid, cells: Vec<bool>) -> Result<Self> {
        if cells.len() != grid.len() {
            return Err(Error::Dimension {
                expected: grid.len(),
                got: cells.len(),
            });
        }
        let mut included = Vec::new();
        let mut local = vec![NOT_INCLUDED; cells.len()];
        for (i, &b) in cells.iter().enumerate() {
            if b {
                local[i] = included.len() as u32;
                included.push(i as u32);
            }
        }
        Ok(Self {
            grid,
            cells,
            included,
            local,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cell_count(&self) -> usize {
        self.included.len()
    }

    pub fn included(&self) -> &[u32] {
        &self.included
    }

    pub fn is_included(&self, flat: usize) -> bool {
        self.cells[flat]
    }

    /// Local index of an included cell, if any.
    pub fn local_index(&self, flat: usize) -> Option<usize> {
        match self.local[flat] {
            NOT_INCLUDED => None,
            l => Some(l as usize),
        }
    }

    pub fn area(&self) -> f64 {
        self.cell_count() as f64 * self.grid.cell_volume()
    }

    /// True if every included cell of `self` is included in `other`
    /// (same grid required).
    pub fn subset_of(&self, other: &GridMask) -> bool {
        self.grid == other.grid
            && self
                .included
                .iter()
                .all(|&i| other.cells[i as usize])
    }
}

/// Rasterize a domain on its own aligned covering grid.
pub fn rasterize(domain: &Domain, cells_per_unit: usize) -> Result<GridMask> {
    let (lo, hi) = domain.bounding_box();
    let grid = Grid::covering(&lo, &hi, cells_per_unit)?;
    rasterize_on(grid, domain)
}

/// Rasterize a domain on a caller-supplied grid (for shared-grid masks).
pub fn rasterize_on(grid: Grid, domain: &Domain) -> Result<GridMask> {
    if grid.dim() != domain.dim() {
        return Err(Error::Dimension {
            expected: domain.dim(),
            got: grid.dim(),
        });
    }
    let mut cells = vec![false; grid.len()];
    let mut center = vec![0.0; grid.dim()];
    for (flat, cell) in cells.iter_mut().enumerate() {
        grid.cell_center(flat, &mut center);
        *cell = domain.contains_unchecked(&center);
    }
    let mask = GridMask::from_cells(grid, cells)?;
    if mask.cell_count() == 0 {
        return Err(Error::DegenerateDomain(
            "no cell centers fall inside the domain at this resolution".into(),
        ));
    }
    Ok(mask)
}

/// Text serialization, portable-graymap style: a short header followed by
/// 0/1 cells, one grid row per line.
pub fn write_mask(mask: &GridMask) -> String {
    let g = mask.grid();
    let mut s = String::new();
    s.push_str("RM1\n");
    let _ = writeln!(s, "{}", g.dim());
    let dims: Vec<String> = g.dims.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(s, "{}", dims.join(" "));
    let origin: Vec<String> = g.origin.iter().map(|o| format!("{o:.17e}")).collect();
    let _ = writeln!(s, "{}", origin.join(" "));
    let _ = writeln!(s, "{:.17e}", g.spacing);
    let row = g.dims[0];
    for chunk in mask.cells.chunks(row) {
        let line: Vec<&str> = chunk.iter().map(|&b| if b { "1" } else { "0" }).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s
}

pub fn read_mask(text: &str) -> Result<GridMask> {
    let mut lines = text.lines();
    let magic = lines.next().ok_or_else(|| Error::InvalidData("empty mask file".into()))?;
    if magic.trim() != "RM1" {
        return Err(Error::InvalidData(format!("bad magic {magic:?}")));
    }
    let parse_err = |what: &str| Error::InvalidData(format!("mask file: bad {what}"));
    let dim: usize = lines
        .next()
        .and_then(|l| l.trim().parse().ok())
        .ok_or_else(|| parse_err("dimension"))?;
    let dims: Vec<usize> = lines
        .next()
        .map(|l| l.split_whitespace().filter_map(|t| t.parse().ok()).collect())
        .filter(|v: &Vec<usize>| v.len() == dim)
        .ok_or_else(|| parse_err("dims"))?;
    let origin: Vec<f64> = lines
        .next()
        .map(|l| l.split_whitespace().filter_map(|t| t.parse().ok()).collect())
        .filter(|v: &Vec<f64>| v.len() == dim)
        .ok_or_else(|| parse_err("origin"))?;
    let spacing: f64 = lines
        .next()
        .and_then(|l| l.trim().parse().ok())
        .ok_or_else(|| parse_err("spacing"))?;
    let grid = Grid {
        origin,
        spacing,
        dims,
    };
    let mut cells = Vec::with_capacity(grid.len());
    for line in lines {
        for tok in line.split_whitespace() {
            match tok {
                "0" => cells.push(false),
                "1" => cells.push(true),
                other => return Err(Error::InvalidData(format!("bad cell token {other:?}"))),
            }
        }
    }
    GridMask::from_cells(grid, cells)
}

/// SVG rendering for 2-D masks: filled cells, horizontal runs merged.
pub fn mask_to_svg(mask: &GridMask) -> Result<String> {
    let g = mask.grid();
    if g.dim() != 2 {
        return Err(Error::Unsupported("SVG rendering is 2-D only".into()));
    }
    let (nx, ny) = (g.dims[0], g.dims[1]);
    let target_w = 800.0;
    let px = target_w / nx as f64;
    let w = nx as f64 * px;
    let h = ny as f64 * px;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w:.1}\" height=\"{h:.1}\" viewBox=\"0 0 {w:.1} {h:.1}\">"
    );
    let _ = writeln!(s, "<rect width=\"{w:.1}\" height=\"{h:.1}\" fill=\"white\"/>");
    for j in 0..ny {
        let mut i = 0;
        while i < nx {
            if mask.cells[j * nx + i] {
                let start = i;
                while i < nx && mask.cells[j * nx + i] {
                    i += 1;
                }
                // SVG y grows downward; grid row 0 is the bottom
                let x = start as f64 * px;
                let y = (ny - 1 - j) as f64 * px;
                let rw = (i - start) as f64 * px;
                let _ = writeln!(
                    s,
                    "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{rw:.2}\" height=\"{px:.2}\" fill=\"#33557f\"/>"
                );
            } else {
                i += 1;
            }
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::catalog;
    use crate::domain::{ElementaryDomain, ShrinkMode};
    use crate::profile::ProfileFunction;

    fn unit_square() -> Domain {
        ElementaryDomain::standard(ProfileFunction::constant(1, 0.0).unwrap()).into()
    }

    #[test]
    fn unit_square_two_cells_per_unit() {
        let mask = rasterize(&unit_square(), 2).unwrap();
        assert_eq!(mask.grid().dims, vec![2, 2]);
        assert_eq!(mask.cell_count(), 4);
    }

    #[test]
    fn shrunk_mask_is_subset_on_same_grid() {
        let u = ElementaryDomain::standard(ProfileFunction::step(vec![0.5], vec![0.0, 1.0]).unwrap());
        let full: Domain = u.clone().into();
        let mask = rasterize(&full, 32).unwrap();
        let shrunk: Domain = u.shrink(0.2, ShrinkMode::VerticalOnly).unwrap().into();
        let sub = rasterize_on(mask.grid().clone(), &shrunk).unwrap();
        assert!(sub.subset_of(&mask));
        assert!(sub.cell_count() < mask.cell_count());
    }

    #[test]
    fn rasterize_matches_per_cell_oracle_on_rectangle_chain() {
        let dom = catalog::rectangle_chain(1.0, 40).unwrap();
        let mask = rasterize(&dom, 256).unwrap();
        // independent per-cell membership loop
        let g = mask.grid().clone();
        let mut count = 0usize;
        let mut c = vec![0.0; 2];
        for flat in 0..g.len() {
            g.cell_center(flat, &mut c);
            if dom.contains(&c).unwrap() {
                count += 1;
                assert!(mask.is_included(flat));
            } else {
                assert!(!mask.is_included(flat));
            }
        }
        assert_eq!(count, mask.cell_count());
    }

    #[test]
    fn mask_area_converges_under_refinement() {
        let dom = catalog::sin_component_domain().unwrap();
        let a64 = rasterize(&dom, 64).unwrap().area();
        let a256 = rasterize(&dom, 256).unwrap().area();
        // fiber-length oracle: the union fiber over x has length
        // 6 - max(0, -x sin(1/x)) because U dips into V where f < 0
        let exact = {
            let n = 400_000;
            let b = 1.0 / std::f64::consts::PI;
            let mut total = 0.0;
            for i in 0..n {
                let x = b * (i as f64 + 0.5) / n as f64;
                let f = x * (1.0 / x).sin();
                total += 6.0 - (-f).max(0.0);
            }
            total * b / n as f64
        };
        assert!((a256 - exact).abs() < (a64 - exact).abs());
        assert!((a256 - exact).abs() < 0.02 * exact);
    }

    #[test]
    fn mask_round_trip() {
        let dom = catalog::sin_component_domain().unwrap();
        let mask = rasterize(&dom, 32).unwrap();
        let text = write_mask(&mask);
        let back = read_mask(&text).unwrap();
        assert_eq!(back.cell_count(), mask.cell_count());
        assert_eq!(back.grid(), mask.grid());
        assert!(back.subset_of(&mask) && mask.subset_of(&back));
    }

    #[test]
    fn degenerate_mask_errors() {
        // a sliver far from any cell center at coarse resolution
        let b = Domain::Box(crate::domain::BoxDomain::open(
            vec![0.2501, 0.2501],
            vec![0.2502, 0.2502],
        ));
        assert!(matches!(
            rasterize(&b, 2),
            Err(Error::DegenerateDomain(_))
        ));
    }

    #[test]
    fn svg_emits_rects() {
        let mask = rasterize(&unit_square(), 4).unwrap();
        let svg = mask_to_svg(&mask).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<rect"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
