//! Brute-force ground truth at desk scale: exhaustive feasible-clustering
//! enumeration, vertex and adjacency certificates via a min-norm-point
//! computation, and empirical LSA frequency.

use crate::assign::{solve_transport, TransportInstance};
use crate::bounds::Bounds;
use crate::clustering::{clustering_vector, Clustering};
use crate::cone::Variant;
use crate::error::{Error, Result};
use crate::point_set::PointSet;
use crate::vecmath::{axpy, dot, norm2, solve_dense};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// Hard cap on `k^n` for exhaustive enumeration.
pub const ENUMERATION_GUARD: f64 = 1e7;

/// Absolute tolerance on squared hull distance for vertex decisions.
pub const HULL_TOL_SQ: f64 = 1e-8;

fn effective_bounds(c: &Clustering, variant: Variant, bounds: &Bounds) -> Result<Bounds> {
    match variant {
        Variant::Single => Ok(Bounds::single_shape(c.shape())),
        Variant::Bounded => {
            if !c.is_feasible(bounds) {
                return Err(Error::InfeasibleClustering);
            }
            Ok(bounds.clone())
        }
    }
}

/// Every clustering with shape inside the bounds, in lexicographic
/// assignment order.
pub fn enumerate_feasible(ps: &PointSet, bounds: &Bounds) -> Result<Vec<Clustering>> {
    let n = ps.len();
    let k = bounds.k();
    let size = (k as f64).powi(n as i32);
    if size > ENUMERATION_GUARD {
        return Err(Error::GuardExceeded { size, limit: ENUMERATION_GUARD });
    }
    let mut out = Vec::new();
    let mut assignment = vec![0usize; n];
    let mut shape = vec![0usize; k];
    fn rec(
        j: usize,
        n: usize,
        k: usize,
        bounds: &Bounds,
        assignment: &mut Vec<usize>,
        shape: &mut Vec<usize>,
        out: &mut Vec<Clustering>,
    ) {
        if j == n {
            out.push(Clustering::from_assignment(assignment.clone(), k).expect("valid"));
            return;
        }
        let remaining = n - j - 1;
        for i in 0..k {
            if shape[i] >= bounds.upper()[i] {
                continue;
            }
            shape[i] += 1;
            let deficit: usize = (0..k)
                .map(|l| bounds.lower()[l].saturating_sub(shape[l]))
                .sum();
            if deficit <= remaining {
                assignment[j] = i;
                rec(j + 1, n, k, bounds, assignment, shape, out);
            }
            shape[i] -= 1;
        }
    }
    rec(0, n, k, bounds, &mut assignment, &mut shape, &mut out);
    Ok(out)
}

/// Group indices of equal vectors (up to a scale-aware quantum); groups are
/// ordered by first occurrence, indices ascending within each group.
fn group_equal_vectors(vectors: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let scale = vectors
        .iter()
        .flat_map(|v| v.iter())
        .fold(1.0_f64, |m, x| m.max(x.abs()));
    let q = 1e-9 * scale;
    let key = |v: &[f64]| -> Vec<i64> { v.iter().map(|x| (x / q).round() as i64).collect() };
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    // stable sort keeps indices ascending inside each group
    order.sort_by_cached_key(|&a| key(&vectors[a]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        match groups.last_mut() {
            Some(g) if key(&vectors[g[0]]) == key(&vectors[idx]) => g.push(idx),
            _ => groups.push(vec![idx]),
        }
    }
    groups.sort_by_key(|g| g[0]);
    groups
}

struct MnpOutcome {
    y: Vec<f64>,
    dist_sq: f64,
    corral: Vec<usize>,
    lambda: Vec<f64>,
}

/// Wolfe's minimum-norm-point algorithm over the convex hull of `points`.
fn min_norm_point(points: &[Vec<f64>]) -> MnpOutcome {
    assert!(!points.is_empty());
    let dim = points[0].len();
    let scale_sq = points
        .iter()
        .map(|p| dot(p, p))
        .fold(1.0_f64, f64::max);

    let start = (0..points.len())
        .min_by(|&a, &b| dot(&points[a], &points[a]).total_cmp(&dot(&points[b], &points[b])))
        .unwrap();
    let mut corral = vec![start];
    let mut lambda = vec![1.0_f64];
    let mut y = points[start].clone();

    for _major in 0..1000 {
        let (jmin, val) = (0..points.len())
            .map(|j| (j, dot(&y, &points[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if val >= dot(&y, &y) - 1e-10 * scale_sq {
            break;
        }
        if !corral.contains(&jmin) {
            corral.push(jmin);
            lambda.push(0.0);
        }

        for _minor in 0..corral.len() + 50 {
            // affine min-norm over the corral: KKT system [G 1; 1^T 0]
            let m = corral.len();
            let mut sys = vec![vec![0.0; m + 1]; m + 1];
            for (r, &i) in corral.iter().enumerate() {
                for (s, &j) in corral.iter().enumerate() {
                    sys[r][s] = dot(&points[i], &points[j]);
                }
                sys[r][m] = 1.0;
                sys[m][r] = 1.0;
            }
            let mut rhs = vec![0.0; m + 1];
            rhs[m] = 1.0;
            let beta = match solve_dense(&sys, &rhs, 1e-13 * scale_sq.max(1.0)) {
                Some(sol) => sol[..m].to_vec(),
                None => {
                    // affinely dependent corral: drop the weakest member
                    let drop = (0..m).min_by(|&a, &b| lambda[a].total_cmp(&lambda[b])).unwrap();
                    corral.remove(drop);
                    lambda.remove(drop);
                    continue;
                }
            };
            if beta.iter().all(|&b| b > 1e-12) {
                lambda = beta;
                break;
            }
            let theta = corral
                .iter()
                .enumerate()
                .filter(|&(i, _)| beta[i] < 0.0)
                .map(|(i, _)| lambda[i] / (lambda[i] - beta[i]))
                .fold(1.0_f64, f64::min);
            for i in 0..m {
                lambda[i] = (1.0 - theta) * lambda[i] + theta * beta[i];
            }
            let keep: Vec<usize> = (0..m).filter(|&i| lambda[i] > 1e-12).collect();
            if keep.len() == m {
                // numerical stall: zero out the smallest and drop it
                let drop = (0..m).min_by(|&a, &b| lambda[a].total_cmp(&lambda[b])).unwrap();
                corral.remove(drop);
                lambda.remove(drop);
            } else {
                corral = keep.iter().map(|&i| corral[i]).collect();
                lambda = keep.iter().map(|&i| lambda[i]).collect();
            }
        }

        let total: f64 = lambda.iter().sum();
        y = vec![0.0; dim];
        for (&i, &l) in corral.iter().zip(&lambda) {
            axpy(l / total, &points[i], &mut y);
        }
    }

    MnpOutcome { dist_sq: dot(&y, &y), y, corral, lambda }
}

/// Is `w(C)` a vertex, and the evidence either way.
#[derive(Debug, Clone)]
pub struct VertexCertificate {
    pub is_vertex: bool,
    /// direction with `a^T w(C) > a^T w(C')` for all distinct feasible vectors
    pub witness: Option<Vec<f64>>,
    /// convex combination of other clustering vectors reconstructing `w(C)`,
    /// as (index into the enumeration, coefficient) pairs
    pub coefficients: Option<Vec<(usize, f64)>>,
    /// enumeration indices of every clustering sharing the vector `w(C)`
    pub equal_vector_clusterings: Vec<usize>,
}

/// Decide vertexhood by brute force: `w(C)` is a vertex iff the origin is
/// outside the convex hull of `{w(C') - w(C)}` over the distinct feasible
/// clustering vectors.
pub fn is_vertex(
    ps: &PointSet,
    c: &Clustering,
    variant: Variant,
    bounds: &Bounds,
) -> Result<VertexCertificate> {
    let eff = effective_bounds(c, variant, bounds)?;
    let all = enumerate_feasible(ps, &eff)?;
    let vectors: Vec<Vec<f64>> = all
        .iter()
        .map(|cl| Ok(clustering_vector(ps, cl)?.as_slice().to_vec()))
        .collect::<Result<_>>()?;
    let target = clustering_vector(ps, c)?.as_slice().to_vec();

    let own_index = all
        .iter()
        .position(|cl| cl == c)
        .ok_or(Error::InfeasibleClustering)?;
    let groups = group_equal_vectors(&vectors);
    let own_group = groups
        .iter()
        .find(|g| g.contains(&own_index))
        .cloned()
        .expect("every enumerated clustering belongs to a group");

    let reps: Vec<usize> = groups
        .iter()
        .map(|g| g[0])
        .filter(|&r| !own_group.contains(&r))
        .collect();
    if reps.is_empty() {
        // the polytope is a single point
        return Ok(VertexCertificate {
            is_vertex: true,
            witness: Some(vec![0.0; target.len()]),
            coefficients: None,
            equal_vector_clusterings: own_group,
        });
    }
    let diffs: Vec<Vec<f64>> = reps
        .iter()
        .map(|&r| vectors[r].iter().zip(&target).map(|(a, b)| a - b).collect())
        .collect();
    let mnp = min_norm_point(&diffs);
    if mnp.dist_sq > HULL_TOL_SQ {
        Ok(VertexCertificate {
            is_vertex: true,
            witness: Some(mnp.y.iter().map(|v| -v).collect()),
            coefficients: None,
            equal_vector_clusterings: own_group,
        })
    } else {
        let total: f64 = mnp.lambda.iter().sum();
        let coeffs = mnp
            .corral
            .iter()
            .zip(&mnp.lambda)
            .map(|(&i, &l)| (reps[i], l / total))
            .collect();
        Ok(VertexCertificate {
            is_vertex: false,
            witness: None,
            coefficients: Some(coeffs),
            equal_vector_clusterings: own_group,
        })
    }
}

/// Do `w(C)` and `w(C2)` span an edge of the polytope? Decided by testing
/// whether any supporting direction isolates exactly this vector pair:
/// project the remaining difference vectors along `w(C2) - w(C)` and ask the
/// min-norm machinery whether the origin escapes their hull.
pub fn oracle_adjacent(
    ps: &PointSet,
    c: &Clustering,
    c2: &Clustering,
    variant: Variant,
    bounds: &Bounds,
) -> Result<bool> {
    let eff = effective_bounds(c, variant, bounds)?;
    if !c2.is_feasible(&eff) {
        return Err(Error::InfeasibleClustering);
    }
    let all = enumerate_feasible(ps, &eff)?;
    let vectors: Vec<Vec<f64>> = all
        .iter()
        .map(|cl| Ok(clustering_vector(ps, cl)?.as_slice().to_vec()))
        .collect::<Result<_>>()?;
    let w1 = clustering_vector(ps, c)?.as_slice().to_vec();
    let w2 = clustering_vector(ps, c2)?.as_slice().to_vec();

    let e: Vec<f64> = w2.iter().zip(&w1).map(|(a, b)| a - b).collect();
    let ee = dot(&e, &e);
    let scale = vectors
        .iter()
        .flat_map(|v| v.iter())
        .fold(1.0_f64, |m, x| m.max(x.abs()));
    if ee <= (1e-9 * scale) * (1e-9 * scale) {
        return Ok(false); // identical vertices are not adjacent
    }

    let near = |v: &[f64], w: &[f64]| {
        v.iter().zip(w).all(|(a, b)| (a - b).abs() <= 1e-9 * scale)
    };
    let groups = group_equal_vectors(&vectors);
    let mut projected: Vec<Vec<f64>> = Vec::new();
    for g in &groups {
        let v = &vectors[g[0]];
        if near(v, &w1) || near(v, &w2) {
            continue;
        }
        let u: Vec<f64> = v.iter().zip(&w1).map(|(a, b)| a - b).collect();
        let coef = dot(&u, &e) / ee;
        let proj: Vec<f64> = u.iter().zip(&e).map(|(ui, ei)| ui - coef * ei).collect();
        if norm2(&proj) <= 1e-9 * scale {
            // a vector on the pair's line: harmless inside the open segment
            // (it cannot be a vertex), fatal outside (an endpoint is not
            // extreme then)
            if coef <= 0.0 || coef >= 1.0 {
                return Ok(false);
            }
            continue;
        }
        projected.push(proj);
    }
    if projected.is_empty() {
        return Ok(true); // the polytope is exactly the segment
    }
    Ok(min_norm_point(&projected).dist_sq > HULL_TOL_SQ)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyEstimate {
    pub freq: f64,
    pub std_err: f64,
    pub samples: usize,
}

/// Fraction of uniformly random site directions whose fixed-shape linear
/// optimum is exactly `c`; agrees with the single-shape cone volume up to
/// sampling error.
pub fn empirical_lsa_frequency(
    ps: &PointSet,
    c: &Clustering,
    samples: usize,
    seed: u64,
) -> Result<FrequencyEstimate> {
    if c.n() != ps.len() {
        return Err(Error::MismatchedInstances { left: ps.len(), right: c.n() });
    }
    let samples = samples.max(1);
    let (d, k) = (ps.dim(), c.k());
    let bounds = Bounds::single_shape(c.shape());
    const CHUNK: usize = 256;
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64 + 1);
            let take = CHUNK.min(samples - chunk * CHUNK);
            let mut h = 0u64;
            for _ in 0..take {
                let a: Vec<f64> = (0..d * k).map(|_| StandardNormal.sample(&mut rng)).collect();
                let costs: Vec<Vec<f64>> = (0..ps.len())
                    .map(|j| {
                        (0..k)
                            .map(|i| -dot(&a[i * d..(i + 1) * d], ps.point(j)))
                            .collect()
                    })
                    .collect();
                let inst = TransportInstance { costs, bounds: bounds.clone() };
                if let Ok(assignment) = solve_transport(&inst) {
                    if assignment == c.assignment() {
                        h += 1;
                    }
                }
            }
            h
        })
        .sum();
    let freq = hits as f64 / samples as f64;
    Ok(FrequencyEstimate {
        freq,
        std_err: (freq * (1.0 - freq) / samples as f64).sqrt(),
        samples,
    })
}
