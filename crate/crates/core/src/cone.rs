//! Normal cones of partition-polytope vertices: movement enumeration,
//! H-representation, facet filtering, membership, spherical distance, and
//! Monte Carlo volume estimation.

use crate::bounds::Bounds;
use crate::clustering::{clustering_vector, Clustering, ClusteringVector, SiteVector};
use crate::error::{Error, Result};
use crate::lp;
use crate::movements::{movement_vector, Movement};
use crate::point_set::PointSet;
use crate::vecmath::{dot, norm2};
use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// Relative tolerance for cone membership and direction comparisons.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Absolute tolerance on the irredundancy LP optimum (unit-normalized data).
pub const FACET_LP_TOL: f64 = 1e-8;

/// Which partition polytope the cone refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// bounded shape (s^- <= |C| <= s^+)
    Bounded,
    /// single shape (|C| fixed)
    Single,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::Bounded => "pm",
            Variant::Single => "eq",
        }
    }
}

/// Whether the inequality list provably contains every facet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Guarantee {
    Exact,
    /// the general-position precondition of the edge characterization failed;
    /// the half-space intersection may strictly contain the true cone
    Heuristic,
}

/// A polyhedral cone `{z : v_j^T z <= 0}` given by outward normals.
#[derive(Debug, Clone, PartialEq)]
pub struct Cone {
    dim: usize,
    normals: Vec<Vec<f64>>,
    facet_mask: Option<Vec<bool>>,
}

impl Cone {
    pub fn from_normals(dim: usize, normals: Vec<Vec<f64>>) -> Result<Self> {
        for v in &normals {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
        }
        Ok(Cone { dim, normals, facet_mask: None })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    pub fn facet_mask(&self) -> Option<&[bool]> {
        self.facet_mask.as_deref()
    }

    /// Indices of the facet normals; all normals when unfiltered.
    pub fn facet_indices(&self) -> Vec<usize> {
        match &self.facet_mask {
            Some(mask) => (0..self.normals.len()).filter(|&j| mask[j]).collect(),
            None => (0..self.normals.len()).collect(),
        }
    }

    pub fn facet_normals(&self) -> Vec<&[f64]> {
        self.facet_indices()
            .into_iter()
            .map(|j| self.normals[j].as_slice())
            .collect()
    }

    /// Non-strict: `v_j^T z <= 0` for all normals. Strict membership demands
    /// clearance `tol * |v_j| * |z|` on every inequality. Once facets are
    /// known, only those are checked; redundant rows cut nothing.
    pub fn contains(&self, z: &[f64], strict: bool) -> bool {
        debug_assert_eq!(z.len(), self.dim);
        let nz = norm2(z);
        let check = |v: &Vec<f64>| {
            let s = dot(v, z);
            if strict {
                s < -MEMBERSHIP_TOL * norm2(v) * nz
            } else {
                s <= 0.0
            }
        };
        match &self.facet_mask {
            Some(mask) => self
                .normals
                .iter()
                .zip(mask)
                .filter(|&(_, &keep)| keep)
                .all(|(v, _)| check(v)),
            None => self.normals.iter().all(check),
        }
    }

    /// Mark irredundant inequalities. Parallel duplicates are deduplicated
    /// first (one representative per direction); a representative is a facet
    /// iff `max{v_j^T z : v_i^T z <= 0 (i != j), |z|_inf <= 1}` exceeds the
    /// tolerance. Large inequality lists are screened by Clarkson's
    /// algorithm, which answers the same LP question against the small set
    /// of facets found so far instead of against all rows.
    pub fn filter_facets(&self) -> Result<Cone> {
        let mut mask = vec![false; self.normals.len()];

        // unit representatives, zero normals dropped
        let mut reps: Vec<(usize, Vec<f64>)> = Vec::new();
        'outer: for (j, v) in self.normals.iter().enumerate() {
            let n = norm2(v);
            if n == 0.0 {
                continue;
            }
            let unit: Vec<f64> = v.iter().map(|x| x / n).collect();
            for (_, r) in &reps {
                if unit
                    .iter()
                    .zip(r)
                    .all(|(a, b)| (a - b).abs() <= MEMBERSHIP_TOL)
                {
                    continue 'outer;
                }
            }
            reps.push((j, unit));
        }
        let units: Vec<Vec<f64>> = reps.iter().map(|(_, u)| u.clone()).collect();

        const CLARKSON_THRESHOLD: usize = 48;
        // exact per-row LPs need no interior point but cost one large LP per
        // direction; past this size a degenerate cone is refused instead
        const DEGENERATE_LIMIT: usize = 400;
        let rep_mask = if units.len() > CLARKSON_THRESHOLD {
            match facets_clarkson(&units)? {
                Some(m) => m,
                None if units.len() <= DEGENERATE_LIMIT => facets_per_row_lp(&units)?,
                None => return Err(Error::EmptyInterior),
            }
        } else {
            facets_per_row_lp(&units)?
        };
        for (keep, (j, _)) in rep_mask.iter().zip(&reps) {
            mask[*j] = *keep;
        }

        Ok(Cone {
            dim: self.dim,
            normals: self.normals.clone(),
            facet_mask: Some(mask),
        })
    }

    /// Fraction of the unit sphere inside the cone, by seeded Monte Carlo.
    /// Sampling is chunked with a per-chunk RNG stream, so the estimate is
    /// reproducible and independent of thread scheduling.
    pub fn estimate_volume(&self, samples: usize, seed: u64) -> VolumeEstimate {
        let samples = samples.max(1);
        const CHUNK: usize = 4096;
        let chunks = samples.div_ceil(CHUNK);
        let hits: u64 = (0..chunks)
            .into_par_iter()
            .map(|chunk| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(chunk as u64 + 1);
                let take = CHUNK.min(samples - chunk * CHUNK);
                let mut h = 0u64;
                let mut z = vec![0.0; self.dim];
                for _ in 0..take {
                    for zi in z.iter_mut() {
                        *zi = StandardNormal.sample(&mut rng);
                    }
                    let n = norm2(&z);
                    if n > 0.0 {
                        for zi in z.iter_mut() {
                            *zi /= n;
                        }
                    }
                    if self.contains(&z, false) {
                        h += 1;
                    }
                }
                h
            })
            .sum();
        let mu_hat = hits as f64 / samples as f64;
        VolumeEstimate {
            mu_hat,
            std_err: (mu_hat * (1.0 - mu_hat) / samples as f64).sqrt(),
            samples,
        }
    }
}

/// One irredundancy LP per row, against all other rows.
fn facets_per_row_lp(units: &[Vec<f64>]) -> Result<Vec<bool>> {
    let mut mask = vec![false; units.len()];
    for j in 0..units.len() {
        let others: Vec<&[f64]> = units
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, u)| u.as_slice())
            .collect();
        let (opt, _) = lp::max_direction_in_cone(&units[j], &others)?;
        mask[j] = opt > FACET_LP_TOL;
    }
    Ok(mask)
}

/// Strictly interior point of `{z : u_j^T z <= 0}`, or `None` when the
/// interior is empty or too thin to certify.
///
/// Tier one probes seeded random directions with an early-abort scan (the
/// interior of any cone of nonzero measure is hit quickly). Tier two runs a
/// cutting-plane loop: a sweep-capped min-norm projection on a working row
/// subset, verified against all rows.
fn interior_point(units: &[Vec<f64>]) -> Option<Vec<f64>> {
    let dim = units.first()?.len();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FF_EE);
    let mut z = vec![0.0; dim];
    'probe: for _ in 0..200_000 {
        let mut norm_sq = 0.0_f64;
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut rng);
            norm_sq += *zi * *zi;
        }
        let clearance = -1e-6 * norm_sq.sqrt();
        for u in units {
            if dot(u, &z) > clearance {
                continue 'probe;
            }
        }
        return Some(z);
    }

    let t = units.len();
    let mut active: Vec<usize> = (0..t.min(64)).collect();
    for _ in 0..60 {
        if active.len() > 600 {
            return None;
        }
        let rows: Vec<Vec<f64>> = active.iter().map(|&i| units[i].clone()).collect();
        let rhs = vec![-1.0; rows.len()];
        let Ok(proj) = crate::stability::project_min_norm_capped(&rows, &rhs, 2000) else {
            return None; // an infeasible subsystem certifies empty interior
        };
        let z = proj.z;
        let nz = norm2(&z);
        let mut worst: Vec<(usize, f64)> = (0..t)
            .filter(|i| !active.contains(i))
            .map(|i| (i, dot(&units[i], &z)))
            .filter(|&(_, s)| s > -1e-7 * nz)
            .collect();
        if worst.is_empty() {
            return Some(z);
        }
        worst.sort_by(|a, b| b.1.total_cmp(&a.1));
        for &(i, _) in worst.iter().take(32) {
            active.push(i);
        }
    }
    None
}

/// Clarkson's redundancy removal: test each candidate only against the
/// kernel of confirmed facets; a violation is resolved by shooting a ray
/// from a strictly interior point and adding the first hyperplane it hits.
/// Returns `None` when the cone has empty interior (no interior ray source).
fn facets_clarkson(units: &[Vec<f64>]) -> Result<Option<Vec<bool>>> {
    let Some(x0) = interior_point(units) else {
        return Ok(None);
    };

    #[derive(Clone, Copy, PartialEq)]
    enum Status {
        Unknown,
        Facet,
        Redundant,
    }
    let mut status = vec![Status::Unknown; units.len()];
    let mut kernel: Vec<usize> = Vec::new();

    for j in 0..units.len() {
        while status[j] == Status::Unknown {
            let krefs: Vec<&[f64]> = kernel.iter().map(|&i| units[i].as_slice()).collect();
            let (opt, z) = lp::max_direction_in_cone(&units[j], &krefs)?;
            if opt <= FACET_LP_TOL {
                status[j] = Status::Redundant;
                break;
            }
            // first constraint crossed on the segment x0 -> z; the candidate
            // itself is crossed, so a hit always exists
            let mut hit: Option<(usize, f64)> = None;
            for (i, u) in units.iter().enumerate() {
                if status[i] == Status::Facet {
                    continue;
                }
                let at_x0 = dot(u, &x0);
                let denom = dot(u, &z) - at_x0;
                if denom > 1e-12 {
                    let theta = -at_x0 / denom;
                    if theta > 0.0 && theta <= 1.0 + 1e-9 {
                        let better = hit.is_none_or(|(_, t)| theta < t - 1e-12);
                        if better {
                            hit = Some((i, theta));
                        }
                    }
                }
            }
            let Some((first, _)) = hit else {
                // numerically inconclusive; decide j the slow way
                let others: Vec<&[f64]> = units
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != j)
                    .map(|(_, u)| u.as_slice())
                    .collect();
                let (full, _) = lp::max_direction_in_cone(&units[j], &others)?;
                status[j] = if full > FACET_LP_TOL {
                    Status::Facet
                } else {
                    Status::Redundant
                };
                if status[j] == Status::Facet {
                    kernel.push(j);
                }
                break;
            };
            status[first] = Status::Facet;
            kernel.push(first);
        }
    }

    // degenerate ties can sneak a redundant row into the kernel; polish the
    // small kernel with exact per-row LPs
    let kernel_units: Vec<Vec<f64>> = kernel.iter().map(|&i| units[i].clone()).collect();
    let kernel_mask = facets_per_row_lp(&kernel_units)?;
    let mut mask = vec![false; units.len()];
    for (&i, &keep) in kernel.iter().zip(&kernel_mask) {
        mask[i] = keep;
    }
    Ok(Some(mask))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEstimate {
    pub mu_hat: f64,
    pub std_err: f64,
    pub samples: usize,
}

/// H-representation of the normal cone at a clustering's vertex, with the
/// movements that generated each normal.
#[derive(Debug, Clone)]
pub struct NormalConeH {
    pub vertex: ClusteringVector,
    pub variant: Variant,
    pub movements: Vec<Movement>,
    pub cone: Cone,
    pub guarantee: Guarantee,
}

impl NormalConeH {
    pub fn filter_facets(&self) -> Result<NormalConeH> {
        Ok(NormalConeH {
            vertex: self.vertex.clone(),
            variant: self.variant,
            movements: self.movements.clone(),
            cone: self.cone.filter_facets()?,
            guarantee: self.guarantee,
        })
    }
}

/// All cyclical movements applicable to `c`, over 2 <= t <= k distinct
/// nonempty clusters with one labeled point per visited cluster.
///
/// Two-cycles are emitted once per ordered cluster pair (a swap and its
/// reverse traversal are both listed); longer cycles are emitted once per
/// cyclic order, anchored at their minimum cluster index.
pub fn enumerate_cyclic_movements(c: &Clustering) -> Vec<Movement> {
    let k = c.k();
    let members: Vec<Vec<usize>> = c.clusters();
    let occupied: Vec<usize> = (0..k).filter(|&i| !members[i].is_empty()).collect();
    let mut out = Vec::new();

    // t = 2: ordered pairs
    for &i in &occupied {
        for &j in &occupied {
            if i == j {
                continue;
            }
            for &x in &members[i] {
                for &y in &members[j] {
                    out.push(
                        Movement::cycle(k, vec![i, j], vec![x, y]).expect("valid 2-cycle"),
                    );
                }
            }
        }
    }

    // t >= 3: anchor each cluster subset at its smallest index
    for t in 3..=occupied.len() {
        for combo in occupied.iter().copied().combinations(t) {
            let anchor = combo[0];
            for rest in combo[1..].iter().copied().permutations(t - 1) {
                let mut clusters = Vec::with_capacity(t);
                clusters.push(anchor);
                clusters.extend(rest);
                let label_pools: Vec<&Vec<usize>> =
                    clusters.iter().map(|&i| &members[i]).collect();
                for labels in label_pools
                    .iter()
                    .map(|pool| pool.iter().copied())
                    .multi_cartesian_product()
                {
                    out.push(
                        Movement::cycle(k, clusters.clone(), labels).expect("valid cycle"),
                    );
                }
            }
        }
    }
    out
}

/// All movements whose single application keeps the clustering feasible:
/// every cyclical movement, plus every path movement whose source cluster is
/// strictly above its lower bound and whose target is strictly below its
/// upper bound.
pub fn enumerate_feasible_single_movements(
    c: &Clustering,
    bounds: &Bounds,
) -> Result<Vec<Movement>> {
    if bounds.k() != c.k() {
        return Err(Error::DimensionMismatch { expected: c.k(), got: bounds.k() });
    }
    if !c.is_feasible(bounds) {
        return Err(Error::InfeasibleClustering);
    }
    let k = c.k();
    let members = c.clusters();
    let shape = c.shape();
    let mut out = enumerate_cyclic_movements(c);

    for t in 1..k {
        for clusters in (0..k).permutations(t + 1) {
            let source = clusters[0];
            let target = clusters[t];
            if shape[source] <= bounds.lower()[source] || shape[target] >= bounds.upper()[target] {
                continue;
            }
            // labels leave the first t clusters of the sequence
            if clusters[..t].iter().any(|&i| members[i].is_empty()) {
                continue;
            }
            let label_pools: Vec<&Vec<usize>> =
                clusters[..t].iter().map(|&i| &members[i]).collect();
            for labels in label_pools
                .iter()
                .map(|pool| pool.iter().copied())
                .multi_cartesian_product()
            {
                out.push(Movement::path(k, clusters.clone(), labels).expect("valid path"));
            }
        }
    }
    Ok(out)
}

/// Assemble the H-representation at `w(c)`. Every normal is the vector of a
/// movement whose application reaches a feasible clustering; under the
/// general-position preconditions the intersection of the half-spaces equals
/// the normal cone exactly, otherwise `guarantee` is downgraded.
///
/// For [`Variant::Single`] the polytope is fixed to `c`'s own shape and
/// `bounds` is ignored.
pub fn build_normal_cone(
    ps: &PointSet,
    c: &Clustering,
    variant: Variant,
    bounds: &Bounds,
) -> Result<NormalConeH> {
    if c.n() != ps.len() {
        return Err(Error::MismatchedInstances { left: ps.len(), right: c.n() });
    }
    let movements = match variant {
        Variant::Single => enumerate_cyclic_movements(c),
        Variant::Bounded => enumerate_feasible_single_movements(c, bounds)?,
    };
    let normals = movements
        .iter()
        .map(|m| movement_vector(ps, m))
        .collect::<Result<Vec<_>>>()?;
    let gp = ps.general_position();
    let guarantee = match variant {
        Variant::Single if gp.no_4_collinear => Guarantee::Exact,
        Variant::Bounded if gp.no_3_collinear => Guarantee::Exact,
        _ => Guarantee::Heuristic,
    };
    Ok(NormalConeH {
        vertex: clustering_vector(ps, c)?,
        variant,
        movements,
        cone: Cone::from_normals(ps.dim() * c.k(), normals)?,
        guarantee,
    })
}

/// Geodesic distance of the unit-norm representatives, in `[0, pi]`.
pub fn spherical_distance(a: &SiteVector, b: &SiteVector) -> Result<f64> {
    if a.as_slice().len() != b.as_slice().len() {
        return Err(Error::DimensionMismatch {
            expected: a.as_slice().len(),
            got: b.as_slice().len(),
        });
    }
    let ra = a.representative()?;
    let rb = b.representative()?;
    Ok(dot(ra.as_slice(), rb.as_slice()).clamp(-1.0, 1.0).acos())
}

/// Surface area of the unit sphere in `R^m`: `2 pi^(m/2) / Gamma(m/2)`.
pub fn sphere_surface_area(m: usize) -> f64 {
    assert!(m >= 1);
    use std::f64::consts::PI;
    // Gamma(m/2) by the recursion Gamma(x+1) = x Gamma(x) from Gamma(1/2) or Gamma(1)
    let mut gamma = if m % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut x = if m % 2 == 0 { 1.0 } else { 0.5 };
    while x + 0.5 < m as f64 / 2.0 {
        gamma *= x;
        x += 1.0;
    }
    2.0 * PI.powf(m as f64 / 2.0) / gamma
}
