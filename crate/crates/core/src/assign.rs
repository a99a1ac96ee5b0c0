//! Linear optimization over partition polytopes via min-cost transportation,
//! size-constrained least-squares assignment, and Lloyd's k-means.

use crate::bounds::Bounds;
use crate::clustering::{Clustering, SiteVector};
use crate::error::{Error, Result};
use crate::point_set::PointSet;
use crate::vecmath::dot;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// A unit-supply transportation problem: point `j` may go to cluster `i` at
/// cost `costs[j][i]`; cluster `i` must receive between `lower[i]` and
/// `upper[i]` points.
#[derive(Debug, Clone)]
pub struct TransportInstance {
    pub costs: Vec<Vec<f64>>,
    pub bounds: Bounds,
}

#[derive(Clone, Copy)]
enum Pred {
    /// first hop from the current source point
    SourceArc,
    /// reroute `point` out of cluster `from` into the relaxed cluster
    Reroute { point: usize, from: usize },
    /// window arc cluster `from` -> sink
    Window { from: usize },
    /// residual of a window arc: sink -> cluster
    SinkBack,
}

/// Exact minimum-cost assignment by successive shortest paths with node
/// potentials. Deterministic: points augment in index order, equal-length
/// paths resolve by node index.
pub fn solve_transport(inst: &TransportInstance) -> Result<Vec<usize>> {
    let n = inst.costs.len();
    let k = inst.bounds.k();
    if n == 0 {
        return Err(Error::EmptyPointSet);
    }
    for row in &inst.costs {
        if row.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: row.len() });
        }
    }
    let lower = inst.bounds.lower();
    let upper = inst.bounds.upper();
    let need: usize = lower.iter().sum();
    if need > n || upper.iter().sum::<usize>() < n {
        return Err(Error::InvalidBounds("bounds cannot accommodate n points".into()));
    }

    let sink = k;
    let mut assigned: Vec<Option<usize>> = vec![None; n];
    let mut deficit_cluster: Vec<usize> = lower.to_vec();
    let mut deficit_sink: usize = n - need;
    let mut window_used: Vec<usize> = vec![0; k];

    // cluster/sink potentials; points enter with a per-run uniform shift
    let mut pi = vec![0.0; k + 1];
    for i in 0..k {
        pi[i] = (0..n).map(|j| inst.costs[j][i]).fold(f64::INFINITY, f64::min);
    }
    pi[sink] = (0..k).map(|i| pi[i]).fold(f64::INFINITY, f64::min);

    // arcs between clusters are the collapsed two-arc paths through assigned
    // points: u -> (point j) -> i at cost c[j][i] - c[j][u]
    for source in 0..n {
        let mut dist = vec![f64::INFINITY; k + 1];
        let mut settled = vec![false; k + 1];
        let mut pred: Vec<Option<Pred>> = vec![None; k + 1];
        let mut heap: BinaryHeap<Reverse<(OrdF64, usize)>> = BinaryHeap::new();

        // uniform shift keeps first-hop reduced costs nonnegative; a shift
        // common to all labels cancels out of every comparison below
        let shift = (0..k)
            .map(|i| inst.costs[source][i] - pi[i])
            .fold(f64::INFINITY, f64::min)
            .min(0.0);
        for i in 0..k {
            let rc = inst.costs[source][i] - pi[i] - shift;
            if rc < dist[i] {
                dist[i] = rc;
                pred[i] = Some(Pred::SourceArc);
                heap.push(Reverse((OrdF64(rc), i)));
            }
        }

        while let Some(Reverse((OrdF64(du), u))) = heap.pop() {
            if settled[u] || du > dist[u] {
                continue;
            }
            settled[u] = true;
            if u == sink {
                for i in 0..k {
                    if window_used[i] > 0 {
                        let nd = du + pi[sink] - pi[i];
                        if nd < dist[i] - 1e-15 {
                            dist[i] = nd;
                            pred[i] = Some(Pred::SinkBack);
                            heap.push(Reverse((OrdF64(nd), i)));
                        }
                    }
                }
            } else {
                for (j, a) in assigned.iter().enumerate() {
                    if *a == Some(u) {
                        for i in 0..k {
                            if i == u {
                                continue;
                            }
                            let w = inst.costs[j][i] - inst.costs[j][u];
                            let nd = du + w + pi[u] - pi[i];
                            if nd < dist[i] - 1e-15 {
                                dist[i] = nd;
                                pred[i] = Some(Pred::Reroute { point: j, from: u });
                                heap.push(Reverse((OrdF64(nd), i)));
                            }
                        }
                    }
                }
                if window_used[u] < upper[u] - lower[u] {
                    let nd = du + pi[u] - pi[sink];
                    if nd < dist[sink] - 1e-15 {
                        dist[sink] = nd;
                        pred[sink] = Some(Pred::Window { from: u });
                        heap.push(Reverse((OrdF64(nd), sink)));
                    }
                }
            }
        }

        // nearest node still short of a unit; clusters win ties, then index
        let mut target: Option<usize> = None;
        for v in (0..k).chain([sink]) {
            let wants = if v == sink { deficit_sink > 0 } else { deficit_cluster[v] > 0 };
            if wants && dist[v] < f64::INFINITY {
                if target.is_none_or(|t| dist[v] < dist[t] - 1e-15) {
                    target = Some(v);
                }
            }
        }
        let target = target.ok_or_else(|| {
            Error::InvalidBounds("no augmenting path in transportation network".into())
        })?;
        if target == sink {
            deficit_sink -= 1;
        } else {
            deficit_cluster[target] -= 1;
        }

        // walk back to the source, applying the unit of flow
        let mut node = target;
        loop {
            match pred[node].expect("reachable node has a predecessor") {
                Pred::SourceArc => {
                    assigned[source] = Some(node);
                    break;
                }
                Pred::Reroute { point, from } => {
                    debug_assert_eq!(assigned[point], Some(from));
                    assigned[point] = Some(node);
                    node = from;
                }
                Pred::Window { from } => {
                    debug_assert_eq!(node, sink);
                    window_used[from] += 1;
                    node = from;
                }
                Pred::SinkBack => {
                    window_used[node] -= 1;
                    node = sink;
                }
            }
        }

        let dt = dist[target];
        for (v, p) in pi.iter_mut().enumerate() {
            *p += if dist[v] < f64::INFINITY { dist[v].min(dt) } else { dt };
        }
    }

    Ok(assigned.into_iter().map(|a| a.expect("all points assigned")).collect())
}

#[derive(PartialEq, PartialOrd)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn dist_sq(x: &[f64], a: &[f64]) -> f64 {
    x.iter().zip(a).map(|(xi, ai)| (xi - ai) * (xi - ai)).sum()
}

fn check_sites(ps: &PointSet, a: &SiteVector) -> Result<()> {
    if a.d() != ps.dim() {
        return Err(Error::DimensionMismatch { expected: ps.dim(), got: a.d() });
    }
    Ok(())
}

/// Sum of squared distances of every point to its cluster's site.
pub fn lsa_objective(ps: &PointSet, c: &Clustering, a: &SiteVector) -> f64 {
    (0..ps.len())
        .map(|j| dist_sq(ps.point(j), a.site(c.cluster_of(j))))
        .sum()
}

/// Global minimizer of the squared-distance objective among all clusterings
/// of exactly this shape, via min-cost transportation.
pub fn lsa_fixed_shape(ps: &PointSet, a: &SiteVector, shape: &[usize]) -> Result<Clustering> {
    check_sites(ps, a)?;
    if shape.len() != a.k() {
        return Err(Error::DimensionMismatch { expected: a.k(), got: shape.len() });
    }
    if shape.iter().sum::<usize>() != ps.len() {
        return Err(Error::InfeasibleShape {
            shape: shape.to_vec(),
            reason: format!("sizes must sum to n = {}", ps.len()),
        });
    }
    let costs = (0..ps.len())
        .map(|j| (0..a.k()).map(|i| dist_sq(ps.point(j), a.site(i))).collect())
        .collect();
    let inst = TransportInstance { costs, bounds: Bounds::single_shape(shape) };
    Clustering::from_assignment(solve_transport(&inst)?, a.k())
}

/// Result of maximizing a linear objective over the feasible clusterings.
#[derive(Debug, Clone)]
pub struct LinearOptResult {
    pub clustering: Clustering,
    /// the objective was constant (zero site vector): any feasible clustering
    /// is optimal and the solver's deterministic pick is returned
    pub degenerate: bool,
}

/// Maximize `a^T w(C)` over all clusterings feasible for `bounds`.
pub fn maximize_linear_bounded(
    ps: &PointSet,
    a: &SiteVector,
    bounds: &Bounds,
) -> Result<LinearOptResult> {
    check_sites(ps, a)?;
    if bounds.k() != a.k() {
        return Err(Error::DimensionMismatch { expected: a.k(), got: bounds.k() });
    }
    let costs = (0..ps.len())
        .map(|j| (0..a.k()).map(|i| -dot(a.site(i), ps.point(j))).collect())
        .collect();
    let inst = TransportInstance { costs, bounds: bounds.clone() };
    Ok(LinearOptResult {
        clustering: Clustering::from_assignment(solve_transport(&inst)?, a.k())?,
        degenerate: a.is_zero(),
    })
}

/// Outcome of a Lloyd run.
#[derive(Debug, Clone)]
pub struct KMeansOutcome {
    pub clustering: Clustering,
    pub sites: SiteVector,
    pub iterations: usize,
}

/// Plain Lloyd iterations: nearest-site assignment (ties to the lowest
/// cluster index), centroid update, until the clustering repeats or
/// `max_iter` is hit. An emptied cluster is reseeded with the point farthest
/// from its currently assigned site.
pub fn kmeans(
    ps: &PointSet,
    k: usize,
    init_sites: &SiteVector,
    max_iter: usize,
) -> Result<KMeansOutcome> {
    if k == 0 {
        return Err(Error::InvalidK);
    }
    if k > ps.len() {
        return Err(Error::InvalidClustering(format!(
            "k = {k} exceeds the number of points {}",
            ps.len()
        )));
    }
    check_sites(ps, init_sites)?;
    if init_sites.k() != k {
        return Err(Error::DimensionMismatch { expected: k, got: init_sites.k() });
    }
    if let Some((i, j)) = init_sites.coincident_sites() {
        return Err(Error::CoincidentSites { i, j });
    }

    let (n, d) = (ps.len(), ps.dim());
    let mut sites: Vec<Vec<f64>> = init_sites.sites();
    let mut prev: Option<Vec<usize>> = None;
    let mut assignment = vec![0usize; n];
    let mut iterations = 0;

    for iter in 1..=max_iter {
        for j in 0..n {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (i, s) in sites.iter().enumerate() {
                let dd = dist_sq(ps.point(j), s);
                if dd < best_d {
                    best_d = dd;
                    best = i;
                }
            }
            assignment[j] = best;
        }

        // reseed empty clusters from the worst-served point
        loop {
            let mut counts = vec![0usize; k];
            for &i in &assignment {
                counts[i] += 1;
            }
            let Some(empty) = (0..k).find(|&i| counts[i] == 0) else {
                break;
            };
            let farthest = (0..n)
                .filter(|&j| counts[assignment[j]] > 1)
                .max_by(|&x, &y| {
                    dist_sq(ps.point(x), &sites[assignment[x]])
                        .total_cmp(&dist_sq(ps.point(y), &sites[assignment[y]]))
                })
                .expect("k <= n leaves a stealable point");
            sites[empty] = ps.point(farthest).to_vec();
            assignment[farthest] = empty;
        }

        if prev.as_ref() == Some(&assignment) {
            break;
        }
        iterations = iter;
        prev = Some(assignment.clone());

        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        for (j, &i) in assignment.iter().enumerate() {
            counts[i] += 1;
            for (s, x) in sums[i].iter_mut().zip(ps.point(j)) {
                *s += x;
            }
        }
        for i in 0..k {
            for s in sums[i].iter_mut() {
                *s /= counts[i] as f64;
            }
        }
        sites = sums;
    }

    Ok(KMeansOutcome {
        clustering: Clustering::from_assignment(assignment, k)?,
        sites: SiteVector::from_sites(&sites)?,
        iterations,
    })
}
