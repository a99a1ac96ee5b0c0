//! Most stable site vectors: min-norm projection into the normal cone with
//! dual-norm right-hand sides, stability evaluation, and cross-norm rescaling.

use crate::cone::{Cone, MEMBERSHIP_TOL};
use crate::error::{Error, Result};
use crate::vecmath::{axpy, dot, norm2, solve_dense};

/// The p of a p-norm ball, `1 <= p <= inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PNorm {
    One,
    Two,
    Inf,
    Other(f64),
}

impl PNorm {
    pub fn new(p: f64) -> Result<PNorm> {
        if p == 1.0 {
            Ok(PNorm::One)
        } else if p == 2.0 {
            Ok(PNorm::Two)
        } else if p.is_infinite() && p > 0.0 {
            Ok(PNorm::Inf)
        } else if p > 1.0 && p.is_finite() {
            Ok(PNorm::Other(p))
        } else {
            Err(Error::InvalidBounds(format!("p must be in [1, inf], got {p}")))
        }
    }

    /// The dual exponent q with 1/p + 1/q = 1.
    pub fn dual(self) -> PNorm {
        match self {
            PNorm::One => PNorm::Inf,
            PNorm::Two => PNorm::Two,
            PNorm::Inf => PNorm::One,
            PNorm::Other(p) => PNorm::Other(p / (p - 1.0)),
        }
    }

    /// 1/p, with 1/inf = 0.
    pub fn inv(self) -> f64 {
        match self {
            PNorm::One => 1.0,
            PNorm::Two => 0.5,
            PNorm::Inf => 0.0,
            PNorm::Other(p) => 1.0 / p,
        }
    }

    pub fn norm(self, v: &[f64]) -> f64 {
        match self {
            PNorm::One => v.iter().map(|x| x.abs()).sum(),
            PNorm::Two => norm2(v),
            PNorm::Inf => v.iter().fold(0.0_f64, |m, x| m.max(x.abs())),
            PNorm::Other(p) => v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p),
        }
    }

    pub fn label(self) -> String {
        match self {
            PNorm::One => "1".into(),
            PNorm::Two => "2".into(),
            PNorm::Inf => "inf".into(),
            PNorm::Other(p) => format!("{p}"),
        }
    }
}

impl std::str::FromStr for PNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<PNorm> {
        match s {
            "inf" | "infinity" | "oo" => Ok(PNorm::Inf),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidBounds(format!("unparsable norm '{other}'")))?;
                PNorm::new(p)
            }
        }
    }
}

/// Minimum of `v^T z` over the unit p-ball: the negated dual norm of `v`.
pub fn gamma_p(v: &[f64], p: PNorm) -> Result<f64> {
    let g = p.dual().norm(v);
    if g == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(-g)
}

/// Optimal center of the largest-stability p-ball inside the cone.
#[derive(Debug, Clone)]
pub struct StabilityResult {
    pub z: Vec<f64>,
    pub p: PNorm,
    /// `1 / |z|_2`; infinite when the cone is the whole space
    pub tau: f64,
    /// rows of the QP (facet normals, in `facet_indices` order) active at z
    pub active_set: Vec<usize>,
    /// nonpositive multipliers with `z = sum lambda_j v_j` over the QP rows
    pub multipliers: Vec<f64>,
    pub kkt_residual: f64,
}

/// Center of the unit p-ball rolled into the cone towards the origin:
/// minimize `|z|_2^2` subject to `v_j^T z <= -|v_j|_q` over the facet
/// normals. Errors with [`Error::EmptyInterior`] when no ball fits, i.e. the
/// clustering is not a vertex clustering.
pub fn most_stable_site(cone: &Cone, p: PNorm) -> Result<StabilityResult> {
    let facets = cone.facet_normals();
    if facets.is_empty() {
        return Ok(StabilityResult {
            z: vec![0.0; cone.dim()],
            p,
            tau: f64::INFINITY,
            active_set: vec![],
            multipliers: vec![],
            kkt_residual: 0.0,
        });
    }
    let rows: Vec<Vec<f64>> = facets.iter().map(|v| v.to_vec()).collect();
    let rhs = facets
        .iter()
        .map(|v| gamma_p(v, p))
        .collect::<Result<Vec<f64>>>()?;
    let proj = project_min_norm(&rows, &rhs)?;
    let tau = 1.0 / norm2(&proj.z);
    Ok(StabilityResult {
        z: proj.z,
        p,
        tau,
        active_set: proj.active_set,
        multipliers: proj.multipliers,
        kkt_residual: proj.kkt_residual,
    })
}

/// Stability of a site vector inside the cone: the p-norm clearance of its
/// unit representative to the nearest facet hyperplane. Zero on the
/// boundary; errors if `a` lies outside.
pub fn stability_of(cone: &Cone, a: &[f64], p: PNorm) -> Result<f64> {
    let na = norm2(a);
    if na == 0.0 {
        return Err(Error::ZeroVector);
    }
    let facets = cone.facet_normals();
    if facets.is_empty() {
        return Ok(f64::INFINITY);
    }
    let q = p.dual();
    let mut tau = f64::INFINITY;
    for v in facets {
        let s = dot(v, a);
        if s > MEMBERSHIP_TOL * norm2(v) * na {
            return Err(Error::NotInCone);
        }
        tau = tau.min(-s / (q.norm(v) * na));
    }
    Ok(tau.max(0.0))
}

/// Tight constant with `|x|_p <= c * |x|_q` in `R^m`.
pub fn norm_equivalence_constant(m: usize, p: PNorm, q: PNorm) -> f64 {
    (m as f64).powf((p.inv() - q.inv()).max(0.0))
}

/// Scale the p-optimal center so the unit q-ball around it stays inside the
/// cone; the result is in the same equivalence class as `z_p`.
pub fn rescale_for_norm(z_p: &[f64], p: PNorm, q: PNorm) -> Vec<f64> {
    let c = norm_equivalence_constant(z_p.len(), p, q);
    z_p.iter().map(|v| c * v).collect()
}

pub(crate) struct Projection {
    pub z: Vec<f64>,
    /// nonpositive multipliers over the original rows: z = sum lambda_j a_j
    pub multipliers: Vec<f64>,
    pub active_set: Vec<usize>,
    pub kkt_residual: f64,
}

const HILDRETH_MAX_SWEEPS: usize = 100_000;
const HILDRETH_DELTA: f64 = 1e-12;
const ACTIVE_TOL: f64 = 1e-9;
const PRIMAL_TOL: f64 = 1e-11;
const INFEASIBLE_TOL: f64 = 1e-6;

/// Minimize `|z|_2^2` subject to `rows[j] . z <= rhs[j]`: Hildreth dual
/// coordinate ascent on the multipliers, followed by an active-set polish
/// that solves the equality-constrained KKT system exactly.
pub(crate) fn project_min_norm(rows: &[Vec<f64>], rhs: &[f64]) -> Result<Projection> {
    project_min_norm_capped(rows, rhs, HILDRETH_MAX_SWEEPS)
}

/// As [`project_min_norm`] with a custom sweep budget; callers that verify
/// the outcome themselves can trade accuracy for speed.
pub(crate) fn project_min_norm_capped(
    rows: &[Vec<f64>],
    rhs: &[f64],
    max_sweeps: usize,
) -> Result<Projection> {
    let t = rows.len();
    debug_assert_eq!(rhs.len(), t);
    let dim = rows.first().map_or(0, |r| r.len());

    // unit-normalize rows for conditioning
    let mut unit: Vec<Vec<f64>> = Vec::with_capacity(t);
    let mut c = Vec::with_capacity(t);
    for (row, &b) in rows.iter().zip(rhs) {
        let n = norm2(row);
        if n == 0.0 {
            if b < 0.0 {
                return Err(Error::EmptyInterior);
            }
            unit.push(vec![0.0; dim]);
            c.push(0.0);
            continue;
        }
        unit.push(row.iter().map(|x| x / n).collect());
        c.push(b / n);
    }

    let gram: Vec<Vec<f64>> = (0..t)
        .map(|i| (0..t).map(|j| dot(&unit[i], &unit[j])).collect())
        .collect();

    // dual ascent: mu_j = max(0, -c_j - sum_{i != j} G_ji mu_i), G_jj = 1
    let mut mu = vec![0.0; t];
    for _ in 0..max_sweeps {
        let mut max_delta = 0.0_f64;
        for j in 0..t {
            if norm2(&unit[j]) == 0.0 {
                continue;
            }
            let mut s = -c[j];
            for i in 0..t {
                if i != j {
                    s -= gram[j][i] * mu[i];
                }
            }
            let new = s.max(0.0);
            max_delta = max_delta.max((new - mu[j]).abs());
            mu[j] = new;
        }
        if max_delta < HILDRETH_DELTA {
            break;
        }
        if mu.iter().any(|&m| m > 1e14) {
            break; // diverging: the system is infeasible, let the polish report it
        }
    }

    let z_of = |mu: &[f64]| {
        let mut z = vec![0.0; dim];
        for (m, u) in mu.iter().zip(&unit) {
            if *m != 0.0 {
                axpy(-*m, u, &mut z);
            }
        }
        z
    };
    let mut z = z_of(&mu);

    // active-set polish: equality-solve on the working set, dropping rows
    // with wrong-signed multipliers and adding violated rows
    let mut working: Vec<usize> = (0..t)
        .filter(|&j| mu[j] > 0.0 || dot(&unit[j], &z) >= c[j] - ACTIVE_TOL)
        .filter(|&j| norm2(&unit[j]) > 0.0)
        .collect();
    let mut nu = vec![0.0; t];
    for _round in 0..200 {
        // independent subset of the working rows by Gram-Schmidt
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut selected: Vec<usize> = Vec::new();
        for &j in &working {
            let mut r = unit[j].clone();
            for bvec in &basis {
                let s = dot(&r, bvec);
                axpy(-s, bvec, &mut r);
            }
            let nr = norm2(&r);
            if nr > 1e-10 {
                for x in r.iter_mut() {
                    *x /= nr;
                }
                basis.push(r);
                selected.push(j);
            }
        }
        working = selected;

        nu = vec![0.0; t];
        if working.is_empty() {
            z = vec![0.0; dim];
        } else {
            let g: Vec<Vec<f64>> = working
                .iter()
                .map(|&i| working.iter().map(|&j| gram[i][j]).collect())
                .collect();
            let cw: Vec<f64> = working.iter().map(|&j| c[j]).collect();
            let Some(sol) = solve_dense(&g, &cw, 1e-12) else {
                break;
            };
            z = vec![0.0; dim];
            for (&j, &s) in working.iter().zip(&sol) {
                nu[j] = s;
                axpy(s, &unit[j], &mut z);
            }
        }

        // dual feasibility: need nu_j <= 0 (mu_j = -nu_j >= 0)
        if let Some(&worst) = working
            .iter()
            .filter(|&&j| nu[j] > ACTIVE_TOL)
            .max_by(|&&x, &&y| nu[x].total_cmp(&nu[y]))
        {
            working.retain(|&j| j != worst);
            continue;
        }
        // primal feasibility over all rows
        let viol = (0..t)
            .filter(|j| !working.contains(j))
            .map(|j| (j, dot(&unit[j], &z) - c[j]))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match viol {
            Some((j, v)) if v > PRIMAL_TOL => {
                working.push(j);
                working.sort_unstable();
                continue;
            }
            _ => break,
        }
    }

    // honest KKT account on the final iterate
    let mut stationarity = z.clone();
    for &j in &working {
        axpy(-nu[j], &unit[j], &mut stationarity);
    }
    let primal = (0..t)
        .map(|j| dot(&unit[j], &z) - c[j])
        .fold(0.0_f64, |m, v| m.max(v));
    if primal > INFEASIBLE_TOL {
        return Err(Error::EmptyInterior);
    }
    let comp = (0..t)
        .map(|j| (nu[j] * (dot(&unit[j], &z) - c[j])).abs())
        .fold(0.0_f64, f64::max);
    let dual = (0..t).map(|j| nu[j].max(0.0)).fold(0.0_f64, f64::max);
    let kkt_residual = norm2(&stationarity)
        .max(primal.max(0.0))
        .max(comp)
        .max(dual);

    // multipliers over the original (un-normalized) rows
    let multipliers: Vec<f64> = (0..t)
        .map(|j| {
            let n = norm2(&rows[j]);
            if n == 0.0 {
                0.0
            } else {
                nu[j] / n
            }
        })
        .collect();
    Ok(Projection {
        z,
        multipliers,
        active_set: working,
        kkt_residual,
    })
}
