//! Data points plus the exact combinatorial general-position checks.

use crate::error::{Error, Result};
use crate::vecmath::{dot, sub};

/// Relative tolerance for collinearity tests. Three points count as collinear
/// when the parallelogram area they span is at most `tol * M^2`, where `M` is
/// the largest coordinate magnitude among them.
pub const COLLINEARITY_TOL: f64 = 1e-9;

/// A set of `n` distinct non-zero points in `R^d`, immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

/// Outcome of the exhaustive collinearity scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneralPosition {
    pub no_3_collinear: bool,
    pub no_4_collinear: bool,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        let d = points[0].len();
        if d == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        for p in &points {
            if p.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: p.len() });
            }
        }
        let n = points.len();
        let mut data = Vec::with_capacity(n * d);
        for p in &points {
            data.extend_from_slice(p);
        }
        let ps = PointSet { data, n, d };
        for j in 0..n {
            if ps.point(j).iter().all(|&c| c == 0.0) {
                return Err(Error::ZeroPoint { index: j });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if ps.point(i) == ps.point(j) {
                    return Err(Error::DuplicatePoint { first: i, second: j });
                }
            }
        }
        Ok(ps)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.data[j * self.d..(j + 1) * self.d]
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    /// Largest coordinate magnitude over the whole set; scale factor for
    /// relative tolerances.
    pub fn coordinate_scale(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.d];
        for p in self.iter_points() {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi;
            }
        }
        let inv = 1.0 / self.n as f64;
        c.iter().map(|v| v * inv).collect()
    }

    fn triple_collinear(&self, a: usize, b: usize, c: usize) -> bool {
        let u = sub(self.point(b), self.point(a));
        let v = sub(self.point(c), self.point(a));
        // squared parallelogram area via the Gram determinant, valid in any dimension
        let area_sq = dot(&u, &u) * dot(&v, &v) - dot(&u, &v) * dot(&u, &v);
        let m = [a, b, c]
            .iter()
            .flat_map(|&j| self.point(j))
            .fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let thr = COLLINEARITY_TOL * m * m;
        area_sq <= thr * thr
    }

    /// Exhaustive scan over all triples and quadruples.
    pub fn general_position(&self) -> GeneralPosition {
        let n = self.n;
        let mut no3 = true;
        let mut no4 = true;
        for a in 0..n {
            for b in a + 1..n {
                // all points collinear with the line (a, b)
                let mut on_line = 0usize;
                for c in b + 1..n {
                    if self.triple_collinear(a, b, c) {
                        on_line += 1;
                        no3 = false;
                    }
                }
                if on_line >= 2 {
                    no4 = false;
                }
            }
        }
        GeneralPosition {
            no_3_collinear: no3,
            no_4_collinear: no4,
        }
    }
}
