/// Simple planar polygon with even-odd point membership.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<[f64; 2]>,
}

impl Polygon {
    pub fn new(vertices: Vec<[f64; 2]>) -> Self {
        assert!(vertices.len() >= 3, "polygon needs at least 3 vertices");
        Polygon { vertices }
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// Even-odd ray casting. Points on the boundary are unspecified, which is
    /// acceptable for measure-zero sets under sampling and rasterization.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let mut inside = false;
        let n = self.vertices.len();
        for i in 0..n {
            let [x1, y1] = self.vertices[i];
            let [x2, y2] = self.vertices[(i + 1) % n];
            if (y1 > y) != (y2 > y) {
                let t = (y - y1) / (y2 - y1);
                let xi = x1 + t * (x2 - x1);
                if x < xi {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn bbox(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Map each vertex through `f`. The image of a simple polygon under an
    /// affine map is again a simple polygon.
    pub fn map_vertices(&self, mut f: impl FnMut([f64; 2]) -> [f64; 2]) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|&v| f(v)).collect(),
        }
    }
}
