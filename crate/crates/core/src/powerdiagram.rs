//! Separating power diagrams: weight construction by difference constraints
//! and shortest paths, point location, and induction verification.

use crate::bounds::Bounds;
use crate::clustering::{Clustering, SiteVector};
use crate::cone::Variant;
use crate::error::{Error, Result};
use crate::point_set::PointSet;
use crate::vecmath::dot;

const SLACK_TOL: f64 = 1e-9;

/// `k` distinct sites with additive weights; cell `i` is the set of points
/// where `a_i^T x + alpha_i` is maximal.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDiagram {
    sites: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl PowerDiagram {
    pub fn new(sites: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if sites.is_empty() || sites.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: sites.len(),
                got: weights.len(),
            });
        }
        let d = sites[0].len();
        for s in &sites {
            if s.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: s.len() });
            }
        }
        for i in 0..sites.len() {
            for j in i + 1..sites.len() {
                if sites[i] == sites[j] {
                    return Err(Error::CoincidentSites { i, j });
                }
            }
        }
        Ok(PowerDiagram { sites, weights })
    }

    pub fn k(&self) -> usize {
        self.sites.len()
    }

    pub fn dim(&self) -> usize {
        self.sites[0].len()
    }

    pub fn sites(&self) -> &[Vec<f64>] {
        &self.sites
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn score(&self, i: usize, x: &[f64]) -> f64 {
        dot(&self.sites[i], x) + self.weights[i]
    }

    /// All maximizing cells for `x`; more than one index on a tie.
    pub fn locate(&self, x: &[f64]) -> Vec<usize> {
        let scores: Vec<f64> = (0..self.k()).map(|i| self.score(i, x)).collect();
        let best = scores.iter().fold(f64::NEG_INFINITY, |m, &s| m.max(s));
        let tol = SLACK_TOL * (1.0 + best.abs());
        (0..self.k()).filter(|&i| scores[i] >= best - tol).collect()
    }
}

/// A successfully separated diagram plus the worst-case separation slack.
#[derive(Debug, Clone)]
pub struct WeightsOutcome {
    pub diagram: PowerDiagram,
    /// minimum over all (cluster, point, other-cluster) separation slacks;
    /// strictly positive iff the diagram strictly induces the clustering
    pub margin: f64,
}

/// Solve for weights putting every cluster inside its own cell.
///
/// The constraints `alpha_i - alpha_j >= c_ij + margin` (with `c_ij` the
/// worst point of cluster `i` against site `j`) form a difference system
/// solved by Bellman-Ford; for [`Variant::Bounded`] the sign conditions on
/// slack clusters are wired through an anchor node pinned to zero. The margin
/// is pushed to half the largest feasible value by bisection. An infeasible
/// system yields [`Error::SeparationInfeasible`] carrying a negative cycle
/// (node `k` is the anchor).
pub fn weights_for_sites(
    ps: &PointSet,
    c: &Clustering,
    a: &SiteVector,
    variant: Variant,
    bounds: &Bounds,
) -> Result<WeightsOutcome> {
    let k = c.k();
    if a.k() != k || bounds.k() != k {
        return Err(Error::DimensionMismatch { expected: k, got: a.k() });
    }
    if a.d() != ps.dim() {
        return Err(Error::DimensionMismatch { expected: ps.dim(), got: a.d() });
    }
    if c.n() != ps.len() {
        return Err(Error::MismatchedInstances { left: ps.len(), right: c.n() });
    }
    if let Some((i, j)) = a.coincident_sites() {
        return Err(Error::CoincidentSites { i, j });
    }
    if variant == Variant::Bounded && !c.is_feasible(bounds) {
        return Err(Error::InfeasibleClustering);
    }

    if k == 1 {
        return Ok(WeightsOutcome {
            diagram: PowerDiagram::new(a.sites(), vec![0.0])?,
            margin: f64::INFINITY,
        });
    }

    // c_ij = max over x in C_i of (a_j - a_i)^T x; None for empty clusters
    let members = c.clusters();
    let mut sep: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if i == j || members[i].is_empty() {
                continue;
            }
            let cij = members[i]
                .iter()
                .map(|&l| dot(a.site(j), ps.point(l)) - dot(a.site(i), ps.point(l)))
                .fold(f64::NEG_INFINITY, f64::max);
            sep.push((i, j, cij));
        }
    }

    // sign conditions of the bounded variant through the anchor node k
    let anchor = k;
    let mut sign_edges: Vec<(usize, usize)> = Vec::new();
    if variant == Variant::Bounded {
        for i in 0..k {
            if c.shape()[i] > bounds.lower()[i] {
                sign_edges.push((anchor, i)); // alpha_i <= 0
            }
            if c.shape()[i] < bounds.upper()[i] {
                sign_edges.push((i, anchor)); // alpha_i >= 0
            }
        }
    }

    let solve = |margin: f64| -> std::result::Result<Vec<f64>, Vec<usize>> {
        // difference constraints: edge u -> v of weight w enforces
        // alpha_v - alpha_u <= w; separation maps to edge i -> j with
        // weight -c_ij - margin
        let nodes = k + 1;
        let mut edges: Vec<(usize, usize, f64)> = sep
            .iter()
            .map(|&(i, j, cij)| (i, j, -cij - margin))
            .collect();
        edges.extend(sign_edges.iter().map(|&(u, v)| (u, v, 0.0)));
        bellman_ford(nodes, &edges)
    };

    let base = match solve(0.0) {
        Ok(alpha) => alpha,
        Err(cycle) => return Err(Error::SeparationInfeasible { cycle }),
    };

    // bisect the largest feasible margin, then certify at half of it
    let hi_cap = 1.0 + 2.0 * sep.iter().map(|&(_, _, c)| c.abs()).fold(0.0, f64::max);
    let alpha = if solve(hi_cap).is_ok() {
        solve(hi_cap).expect("feasible at cap")
    } else {
        let mut lo = 0.0;
        let mut hi = hi_cap;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if solve(mid).is_ok() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if lo > 0.0 {
            solve(lo / 2.0).expect("half the feasible margin stays feasible")
        } else {
            base
        }
    };

    // pin the anchor to zero; a common shift preserves all differences
    let shift = alpha[anchor];
    let weights: Vec<f64> = (0..k).map(|i| alpha[i] - shift).collect();
    let diagram = PowerDiagram::new(a.sites(), weights)?;

    let margin = sep
        .iter()
        .map(|&(i, j, cij)| diagram.weights[i] - diagram.weights[j] - cij)
        .fold(f64::INFINITY, f64::min);
    Ok(WeightsOutcome { diagram, margin: margin.max(0.0) })
}

/// Bellman-Ford from a virtual source connected to every node with weight 0.
/// Returns the distance labels, or a negative cycle as a node sequence.
fn bellman_ford(
    nodes: usize,
    edges: &[(usize, usize, f64)],
) -> std::result::Result<Vec<f64>, Vec<usize>> {
    let mut dist = vec![0.0_f64; nodes];
    let mut pred: Vec<Option<usize>> = vec![None; nodes];
    for _ in 0..nodes {
        let mut changed = false;
        for &(u, v, w) in edges {
            if dist[u] + w < dist[v] - 1e-15 {
                dist[v] = dist[u] + w;
                pred[v] = Some(u);
                changed = true;
            }
        }
        if !changed {
            return Ok(dist);
        }
    }
    for &(u, v, w) in edges {
        if dist[u] + w < dist[v] - 1e-15 {
            // walk back n steps to land on the cycle, then trace it
            let mut node = u;
            for _ in 0..nodes {
                node = pred[node].expect("relaxed node has a predecessor");
            }
            let start = node;
            let mut cycle = vec![start];
            let mut cur = pred[start].expect("cycle node has a predecessor");
            while cur != start {
                cycle.push(cur);
                cur = pred[cur].expect("cycle node has a predecessor");
            }
            cycle.reverse();
            return Err(cycle);
        }
    }
    Ok(dist)
}

/// One failed separation: `point` of `cluster` is not (strictly) inside its
/// cell against `other`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub point: usize,
    pub cluster: usize,
    pub other: usize,
    pub slack: f64,
}

#[derive(Debug, Clone)]
pub struct InductionReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Check every point of every cluster against all of its cell's
/// inequalities. `strict` requires positive slack beyond the tolerance.
pub fn verify_induces(
    pd: &PowerDiagram,
    ps: &PointSet,
    c: &Clustering,
    strict: bool,
) -> InductionReport {
    let mut violations = Vec::new();
    for j in 0..ps.len() {
        let i = c.cluster_of(j);
        let own = pd.score(i, ps.point(j));
        for other in 0..pd.k() {
            if other == i {
                continue;
            }
            let slack = own - pd.score(other, ps.point(j));
            let tol = SLACK_TOL * (1.0 + own.abs());
            let bad = if strict { slack <= tol } else { slack < -tol };
            if bad {
                violations.push(Violation { point: j, cluster: i, other, slack });
            }
        }
    }
    InductionReport { ok: violations.is_empty(), violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assign::{lsa_fixed_shape, lsa_objective};
    use crate::cone::{build_normal_cone, Variant};
    use crate::demo::twelve_points;
    use crate::stability::{most_stable_site, PNorm};

    fn demo_sites() -> SiteVector {
        SiteVector::from_sites(&[vec![1.0, -0.5], vec![-2.5, -0.5], vec![-0.25, 2.5]]).unwrap()
    }

    #[test]
    fn k1_whole_space() {
        let ps = PointSet::new(vec![vec![1.0, 1.0], vec![2.0, 1.0]]).unwrap();
        let c = Clustering::from_assignment(vec![0, 0], 1).unwrap();
        let a = SiteVector::from_sites(&[vec![0.5, 0.5]]).unwrap();
        let out = weights_for_sites(&ps, &c, &a, Variant::Single, &Bounds::single_shape(&[2]))
            .unwrap();
        assert_eq!(out.diagram.weights(), &[0.0]);
        assert_eq!(out.diagram.locate(&[100.0, -3.0]), vec![0]);
    }

    #[test]
    fn centroid_sites_strictly_separate_the_demo_clustering() {
        let (ps, c) = twelve_points();
        let a = demo_sites();
        let bounds = Bounds::single_shape(c.shape());
        let out = weights_for_sites(&ps, &c, &a, Variant::Single, &bounds).unwrap();
        assert!(out.margin > 0.0, "margin {}", out.margin);
        let rep = verify_induces(&out.diagram, &ps, &c, true);
        assert!(rep.ok, "violations: {:?}", rep.violations);
        for j in 0..ps.len() {
            assert_eq!(out.diagram.locate(ps.point(j)), vec![c.cluster_of(j)]);
        }
    }

    #[test]
    fn induced_clustering_is_lsa_optimal() {
        let (ps, c) = twelve_points();
        let a = demo_sites();
        let bounds = Bounds::single_shape(c.shape());
        let out = weights_for_sites(&ps, &c, &a, Variant::Single, &bounds).unwrap();
        assert!(verify_induces(&out.diagram, &ps, &c, false).ok);
        let opt = lsa_fixed_shape(&ps, &a, c.shape()).unwrap();
        assert!((lsa_objective(&ps, &c, &a) - lsa_objective(&ps, &opt, &a)).abs() < 1e-9);
    }

    #[test]
    fn most_stable_site_gives_strict_separation() {
        let (ps, c) = twelve_points();
        let bounds = Bounds::single_shape(c.shape());
        let nc = build_normal_cone(&ps, &c, Variant::Single, &bounds)
            .unwrap()
            .filter_facets()
            .unwrap();
        let st = most_stable_site(&nc.cone, PNorm::Two).unwrap();
        let a = SiteVector::new(ps.dim(), c.k(), st.z.clone()).unwrap();
        let out = weights_for_sites(&ps, &c, &a, Variant::Single, &bounds).unwrap();
        assert!(out.margin > 0.0);
        assert!(verify_induces(&out.diagram, &ps, &c, true).ok);
    }

    #[test]
    fn wrong_clustering_lists_exact_violations() {
        let (ps, c) = twelve_points();
        let a = demo_sites();
        let bounds = Bounds::single_shape(c.shape());
        let out = weights_for_sites(&ps, &c, &a, Variant::Single, &bounds).unwrap();
        // swap point 0 (cluster 0) and point 4 (cluster 1)
        let mut assignment = c.assignment().to_vec();
        assignment.swap(0, 4);
        let wrong = Clustering::from_assignment(assignment, 3).unwrap();
        let rep = verify_induces(&out.diagram, &ps, &wrong, false);
        assert!(!rep.ok);
        let offenders: Vec<usize> = rep.violations.iter().map(|v| v.point).collect();
        assert!(offenders.contains(&0) && offenders.contains(&4));
    }

    #[test]
    fn separation_infeasible_for_site_outside_cone() {
        let (ps, c) = twelve_points();
        // sites pulling the wrong way: black cluster wants the blue site
        let a = SiteVector::from_sites(&[vec![-2.5, -0.5], vec![1.0, -0.5], vec![-0.25, 2.5]])
            .unwrap();
        let bounds = Bounds::single_shape(c.shape());
        let err = weights_for_sites(&ps, &c, &a, Variant::Single, &bounds).unwrap_err();
        match err {
            Error::SeparationInfeasible { cycle } => assert!(cycle.len() >= 2),
            other => panic!("expected SeparationInfeasible, got {other:?}"),
        }
    }

    #[test]
    fn voronoi_tie_reports_both_cells() {
        let pd = PowerDiagram::new(vec![vec![1.0, 0.0], vec![-1.0, 0.0]], vec![0.0, 0.0])
            .unwrap();
        assert_eq!(pd.locate(&[0.0, 3.0]), vec![0, 1]);
        assert_eq!(pd.locate(&[0.5, 0.0]), vec![0]);
    }

    #[test]
    fn coincident_sites_rejected() {
        assert!(matches!(
            PowerDiagram::new(vec![vec![1.0], vec![1.0]], vec![0.0, 0.0]),
            Err(Error::CoincidentSites { i: 0, j: 1 })
        ));
    }
}
