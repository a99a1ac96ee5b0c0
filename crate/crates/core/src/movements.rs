//! Clustering difference graphs and (cyclical) movements between clusterings.

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::point_set::PointSet;

/// One edge of a clustering difference graph: point `label` sits in cluster
/// `from` in the first clustering and in cluster `to` in the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CdgEdge {
    pub from: usize,
    pub to: usize,
    pub label: usize,
}

/// Labeled directed multigraph comparing two clusterings. Isolated clusters
/// are not represented; `nodes` lists only clusters incident to an edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cdg {
    k: usize,
    edges: Vec<CdgEdge>,
}

impl Cdg {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[CdgEdge] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn nodes(&self) -> Vec<usize> {
        let mut present = vec![false; self.k];
        for e in &self.edges {
            present[e.from] = true;
            present[e.to] = true;
        }
        (0..self.k).filter(|&i| present[i]).collect()
    }
}

/// One edge per point that changes cluster between `c` and `c2`.
pub fn build_cdg(c: &Clustering, c2: &Clustering) -> Result<Cdg> {
    if c.n() != c2.n() {
        return Err(Error::MismatchedInstances { left: c.n(), right: c2.n() });
    }
    if c.k() != c2.k() {
        return Err(Error::MismatchedInstances { left: c.k(), right: c2.k() });
    }
    let edges = (0..c.n())
        .filter_map(|j| {
            let (from, to) = (c.cluster_of(j), c2.cluster_of(j));
            (from != to).then_some(CdgEdge { from, to, label: j })
        })
        .collect();
    Ok(Cdg { k: c.k(), edges })
}

/// A path or cycle of labeled point transfers.
///
/// For a path, `clusters` has one more entry than `labels`: point `labels[l]`
/// moves from `clusters[l]` to `clusters[l+1]`. For a cycle, `clusters` and
/// `labels` have equal length and the final transfer returns to
/// `clusters[0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Movement {
    k: usize,
    clusters: Vec<usize>,
    labels: Vec<usize>,
    cyclic: bool,
}

impl Movement {
    pub fn path(k: usize, clusters: Vec<usize>, labels: Vec<usize>) -> Result<Self> {
        if clusters.len() != labels.len() + 1 || labels.is_empty() {
            return Err(Error::InvalidClustering(format!(
                "path movement needs t labels and t+1 clusters, got {} and {}",
                labels.len(),
                clusters.len()
            )));
        }
        Self::validate(k, &clusters, &labels)?;
        Ok(Movement { k, clusters, labels, cyclic: false })
    }

    pub fn cycle(k: usize, clusters: Vec<usize>, labels: Vec<usize>) -> Result<Self> {
        if clusters.len() != labels.len() || clusters.len() < 2 {
            return Err(Error::InvalidClustering(format!(
                "cyclical movement needs t labels and t clusters with t >= 2, got {} and {}",
                labels.len(),
                clusters.len()
            )));
        }
        Self::validate(k, &clusters, &labels)?;
        Ok(Movement { k, clusters, labels, cyclic: true })
    }

    fn validate(k: usize, clusters: &[usize], labels: &[usize]) -> Result<()> {
        for w in clusters.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidClustering("consecutive clusters equal".into()));
            }
        }
        for (pos, &c) in clusters.iter().enumerate() {
            if c >= k {
                return Err(Error::IndexOutOfRange { index: c, len: k });
            }
            if clusters[..pos].contains(&c) {
                return Err(Error::InvalidClustering("clusters revisited".into()));
            }
        }
        for (pos, &l) in labels.iter().enumerate() {
            if labels[..pos].contains(&l) {
                return Err(Error::InvalidClustering("labels repeated".into()));
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    pub fn clusters(&self) -> &[usize] {
        &self.clusters
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Number of transfers.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Transfers as `(from, to, label)` triples.
    pub fn transfers(&self) -> Vec<CdgEdge> {
        let t = self.labels.len();
        (0..t)
            .map(|l| CdgEdge {
                from: self.clusters[l],
                to: if l + 1 < self.clusters.len() {
                    self.clusters[l + 1]
                } else {
                    self.clusters[0]
                },
                label: self.labels[l],
            })
            .collect()
    }

    /// The movement undoing `self`; it applies to the image clustering.
    pub fn inverse(&self) -> Movement {
        let mut clusters: Vec<usize> = self.clusters.clone();
        let mut labels: Vec<usize> = self.labels.clone();
        clusters.reverse();
        labels.reverse();
        if self.cyclic {
            // reversed edge list starts one cluster later; rotate so that
            // labels[l] leaves clusters[l]
            let shift = clusters.len() - 1;
            clusters.rotate_left(shift);
        }
        Movement {
            k: self.k,
            clusters,
            labels,
            cyclic: self.cyclic,
        }
    }
}

/// Apply `m` to `c`: every labeled point advances one step along the
/// movement's cluster sequence.
pub fn apply_movement(c: &Clustering, m: &Movement) -> Result<Clustering> {
    if m.k() != c.k() {
        return Err(Error::MismatchedInstances { left: c.k(), right: m.k() });
    }
    let mut assignment = c.assignment().to_vec();
    for e in m.transfers() {
        if e.label >= c.n() {
            return Err(Error::IndexOutOfRange { index: e.label, len: c.n() });
        }
        if c.cluster_of(e.label) != e.from {
            return Err(Error::LabelNotInSource { label: e.label, cluster: e.from });
        }
        assignment[e.label] = e.to;
    }
    Clustering::from_assignment(assignment, c.k())
}

/// `w(M) = w(C') - w(C)`, computable from the transfers alone.
pub fn movement_vector(ps: &PointSet, m: &Movement) -> Result<Vec<f64>> {
    let d = ps.dim();
    let mut v = vec![0.0; d * m.k()];
    for e in m.transfers() {
        if e.label >= ps.len() {
            return Err(Error::IndexOutOfRange { index: e.label, len: ps.len() });
        }
        let x = ps.point(e.label);
        for (c, &xi) in x.iter().enumerate() {
            v[e.from * d + c] -= xi;
            v[e.to * d + c] += xi;
        }
    }
    Ok(v)
}

/// Greedy edge-disjoint decomposition into cycles first, then maximal paths.
/// Applying the returned movements to the first clustering in order yields
/// the second.
pub fn decompose(g: &Cdg) -> Vec<Movement> {
    let mut remaining: Vec<CdgEdge> = g.edges().to_vec();
    let mut out = Vec::new();

    // repeatedly peel simple cycles
    while let Some(cycle) = find_cycle(g.k(), &remaining) {
        remove_edges(&mut remaining, &cycle);
        let clusters: Vec<usize> = cycle.iter().map(|e| e.from).collect();
        let labels: Vec<usize> = cycle.iter().map(|e| e.label).collect();
        out.push(Movement::cycle(g.k(), clusters, labels).expect("cycle from CDG is valid"));
    }

    // the rest is acyclic: walk maximal paths from in-degree-0 nodes
    while !remaining.is_empty() {
        let mut in_deg = vec![0usize; g.k()];
        let mut out_deg = vec![0usize; g.k()];
        for e in &remaining {
            in_deg[e.to] += 1;
            out_deg[e.from] += 1;
        }
        let start = (0..g.k())
            .find(|&v| out_deg[v] > 0 && in_deg[v] == 0)
            .expect("acyclic multigraph with edges has a source node");
        let mut path = Vec::new();
        let mut node = start;
        loop {
            match remaining.iter().position(|e| e.from == node) {
                Some(pos) => {
                    let e = remaining.remove(pos);
                    node = e.to;
                    path.push(e);
                }
                None => break,
            }
        }
        let mut clusters: Vec<usize> = path.iter().map(|e| e.from).collect();
        clusters.push(node);
        let labels: Vec<usize> = path.iter().map(|e| e.label).collect();
        out.push(Movement::path(g.k(), clusters, labels).expect("path from CDG is valid"));
    }
    out
}

/// Depth-first search for a simple directed cycle in the edge multiset.
fn find_cycle(k: usize, edges: &[CdgEdge]) -> Option<Vec<CdgEdge>> {
    for start in 0..k {
        let mut stack: Vec<CdgEdge> = Vec::new();
        if dfs_cycle(start, start, edges, &mut stack) {
            return Some(stack);
        }
    }
    None
}

fn dfs_cycle(start: usize, node: usize, edges: &[CdgEdge], stack: &mut Vec<CdgEdge>) -> bool {
    for &e in edges.iter().filter(|e| e.from == node) {
        if stack.iter().any(|s| s.label == e.label) {
            continue;
        }
        if e.to == start {
            stack.push(e);
            return true;
        }
        // keep the cycle simple: skip nodes already on the stack
        if stack.iter().any(|s| s.from == e.to) {
            continue;
        }
        stack.push(e);
        if dfs_cycle(start, e.to, edges, stack) {
            return true;
        }
        stack.pop();
    }
    false
}

fn remove_edges(remaining: &mut Vec<CdgEdge>, used: &[CdgEdge]) {
    for u in used {
        let pos = remaining.iter().position(|e| e == u).expect("edge present");
        remaining.remove(pos);
    }
}
