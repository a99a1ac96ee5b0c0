#![allow(dead_code)]

use clustervol::assign::maximize_linear_bounded;
use clustervol::{Bounds, Clustering, PointSet, SiteVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random points in a box, redrawn until no three are collinear.
pub fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> PointSet {
    loop {
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.random_range(-5.0..5.0)).collect())
            .collect();
        if let Ok(ps) = PointSet::new(pts) {
            if ps.general_position().no_3_collinear {
                return ps;
            }
        }
    }
}

pub fn random_unit_vector(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| StandardNormal.sample(rng)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-9 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

pub fn random_site_vector(rng: &mut ChaCha8Rng, d: usize, k: usize) -> SiteVector {
    SiteVector::new(d, k, random_unit_vector(rng, d * k)).unwrap()
}

/// A shape with all entries >= `min_size` summing to n.
pub fn random_shape(rng: &mut ChaCha8Rng, k: usize, n: usize, min_size: usize) -> Vec<usize> {
    assert!(k * min_size <= n);
    let mut shape = vec![min_size; k];
    for _ in 0..n - k * min_size {
        shape[rng.random_range(0..k)] += 1;
    }
    shape
}

/// Bounds containing a random shape, widened by random slack.
pub fn random_bounds(rng: &mut ChaCha8Rng, k: usize, n: usize) -> Bounds {
    let shape = random_shape(rng, k, n, 0);
    let lower: Vec<usize> = shape
        .iter()
        .map(|&s| s.saturating_sub(rng.random_range(0..=s.max(1))))
        .collect();
    let upper: Vec<usize> = shape
        .iter()
        .map(|&s| (s + rng.random_range(0..=2)).min(n))
        .collect();
    Bounds::new(lower, upper, n).unwrap()
}

pub fn random_feasible_clustering(
    rng: &mut ChaCha8Rng,
    n: usize,
    bounds: &Bounds,
) -> Clustering {
    loop {
        let assignment: Vec<usize> = (0..n).map(|_| rng.random_range(0..bounds.k())).collect();
        let c = Clustering::from_assignment(assignment, bounds.k()).unwrap();
        if c.is_feasible(bounds) {
            return c;
        }
    }
}

/// A vertex clustering: the argmax of a random generic direction.
pub fn random_vertex_clustering(
    rng: &mut ChaCha8Rng,
    ps: &PointSet,
    bounds: &Bounds,
) -> Clustering {
    let a = random_site_vector(rng, ps.dim(), bounds.k());
    maximize_linear_bounded(ps, &a, bounds).unwrap().clustering
}

/// Seeded Gaussian blobs around the given centers, redrawn until the set is
/// valid and in general position.
pub fn blob_points(
    rng: &mut ChaCha8Rng,
    centers: &[Vec<f64>],
    per_blob: usize,
    spread: f64,
) -> PointSet {
    loop {
        let mut pts = Vec::new();
        for c in centers {
            for _ in 0..per_blob {
                let p: Vec<f64> = c
                    .iter()
                    .map(|&ci| {
                        let noise: f64 = StandardNormal.sample(rng);
                        ci + spread * noise
                    })
                    .collect();
                pts.push(p);
            }
        }
        if let Ok(ps) = PointSet::new(pts) {
            if ps.general_position().no_3_collinear {
                return ps;
            }
        }
    }
}
