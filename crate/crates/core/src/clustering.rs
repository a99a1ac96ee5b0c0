//! Clusterings, clustering vectors and site vectors.

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::point_set::PointSet;
use crate::vecmath::norm2;

/// A partition of point indices `0..n` into `k` labeled clusters.
///
/// Cluster labels are significant: relabelings are distinct clusterings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clustering {
    assignment: Vec<usize>,
    k: usize,
    shape: Vec<usize>,
}

impl Clustering {
    pub fn from_assignment(assignment: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidK);
        }
        if assignment.is_empty() {
            return Err(Error::InvalidClustering("no points assigned".into()));
        }
        let mut shape = vec![0usize; k];
        for (j, &i) in assignment.iter().enumerate() {
            if i >= k {
                return Err(Error::InvalidClustering(format!(
                    "point {j} assigned to cluster {i}, but k = {k}"
                )));
            }
            shape[i] += 1;
        }
        Ok(Clustering { assignment, k, shape })
    }

    /// Build from explicit member lists; every index in `0..n` must appear
    /// exactly once.
    pub fn from_clusters(clusters: &[Vec<usize>], n: usize) -> Result<Self> {
        let k = clusters.len();
        if k == 0 {
            return Err(Error::InvalidK);
        }
        let mut assignment = vec![usize::MAX; n];
        for (i, members) in clusters.iter().enumerate() {
            for &j in members {
                if j >= n {
                    return Err(Error::IndexOutOfRange { index: j, len: n });
                }
                if assignment[j] != usize::MAX {
                    return Err(Error::InvalidClustering(format!(
                        "point {j} assigned to more than one cluster"
                    )));
                }
                assignment[j] = i;
            }
        }
        if let Some(j) = assignment.iter().position(|&i| i == usize::MAX) {
            return Err(Error::InvalidClustering(format!("point {j} unassigned")));
        }
        Clustering::from_assignment(assignment, k)
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn cluster_of(&self, j: usize) -> usize {
        self.assignment[j]
    }

    pub fn members(&self, i: usize) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.assignment[j] == i).collect()
    }

    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (j, &i) in self.assignment.iter().enumerate() {
            out[i].push(j);
        }
        out
    }

    pub fn is_feasible(&self, bounds: &Bounds) -> bool {
        bounds.contains_shape(&self.shape)
    }

    /// Apply a cluster-label permutation: cluster `i` becomes `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Clustering> {
        if perm.len() != self.k {
            return Err(Error::DimensionMismatch { expected: self.k, got: perm.len() });
        }
        let assignment = self.assignment.iter().map(|&i| perm[i]).collect();
        Clustering::from_assignment(assignment, self.k)
    }

    /// Relabel clusters in order of first appearance. Two clusterings that
    /// agree up to a label permutation canonicalize identically (empty
    /// clusters are pushed behind the occupied ones).
    pub fn canonical_labels(&self) -> Clustering {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0;
        for &i in &self.assignment {
            if map[i] == usize::MAX {
                map[i] = next;
                next += 1;
            }
        }
        for m in map.iter_mut() {
            if *m == usize::MAX {
                *m = next;
                next += 1;
            }
        }
        self.relabeled(&map).expect("permutation is valid")
    }
}

/// The concatenation of per-cluster coordinate sums, `w(C) in R^{d*k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringVector {
    data: Vec<f64>,
    d: usize,
    k: usize,
}

impl ClusteringVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn block(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Sum of all blocks; equals the sum of all data points for every
    /// clustering of the same point set.
    pub fn block_sum(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.d];
        for i in 0..self.k {
            for (si, bi) in s.iter_mut().zip(self.block(i)) {
                *si += bi;
            }
        }
        s
    }
}

/// Per-cluster coordinate sums of `c` over `ps`; empty clusters contribute
/// zero blocks.
pub fn clustering_vector(ps: &PointSet, c: &Clustering) -> Result<ClusteringVector> {
    if c.n() != ps.len() {
        return Err(Error::MismatchedInstances { left: ps.len(), right: c.n() });
    }
    let (d, k) = (ps.dim(), c.k());
    let mut data = vec![0.0; d * k];
    for (j, &i) in c.assignment().iter().enumerate() {
        for (slot, coord) in data[i * d..(i + 1) * d].iter_mut().zip(ps.point(j)) {
            *slot += coord;
        }
    }
    Ok(ClusteringVector { data, d, k })
}

/// A concatenation of `k` sites in `R^d`; positive scalings induce the same
/// clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteVector {
    data: Vec<f64>,
    d: usize,
    k: usize,
}

impl SiteVector {
    pub fn new(d: usize, k: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != d * k || d == 0 || k == 0 {
            return Err(Error::DimensionMismatch { expected: d * k, got: data.len() });
        }
        Ok(SiteVector { data, d, k })
    }

    pub fn from_sites(sites: &[Vec<f64>]) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidK);
        }
        let d = sites[0].len();
        let mut data = Vec::with_capacity(d * sites.len());
        for s in sites {
            if s.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: s.len() });
            }
            data.extend_from_slice(s);
        }
        SiteVector::new(d, sites.len(), data)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn site(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn sites(&self) -> Vec<Vec<f64>> {
        (0..self.k).map(|i| self.site(i).to_vec()).collect()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// Unit-norm representative of the equivalence class `{lambda a | lambda > 0}`.
    pub fn representative(&self) -> Result<SiteVector> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        SiteVector::new(self.d, self.k, self.data.iter().map(|v| v / n).collect())
    }

    pub fn scaled(&self, lambda: f64) -> SiteVector {
        SiteVector {
            data: self.data.iter().map(|v| v * lambda).collect(),
            d: self.d,
            k: self.k,
        }
    }

    /// Index pair of the first coinciding sites, if any.
    pub fn coincident_sites(&self) -> Option<(usize, usize)> {
        for i in 0..self.k {
            for j in i + 1..self.k {
                if self.site(i) == self.site(j) {
                    return Some((i, j));
                }
            }
        }
        None
    }
}
