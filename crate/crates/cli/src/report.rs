//! The end-to-end report document: cone, volume, stability and diagram for
//! both polytope variants of a dataset's clustering.

use clustervol::assign::lsa_objective;
use clustervol::cone::{build_normal_cone, Guarantee, Variant};
use clustervol::dataset::Dataset;
use clustervol::powerdiagram::{verify_induces, weights_for_sites};
use clustervol::stability::{most_stable_site, PNorm};
use clustervol::{Bounds, Clustering, Error, PointSet, Result, SiteVector};
use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GeneralPositionReport {
    pub no_3_collinear: bool,
    pub no_4_collinear: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StabilityEntry {
    pub p: String,
    pub z: Vec<f64>,
    pub tau: f64,
    pub active_set: Vec<usize>,
    pub kkt_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DiagramReport {
    pub sites: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub margin: f64,
    pub strict: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VariantReport {
    pub variant: String,
    pub guarantee: String,
    pub n_normals: usize,
    /// absent when facet filtering is skipped (degenerate cone)
    pub n_facets: Option<usize>,
    pub mu_hat: f64,
    pub std_err: f64,
    /// the clustering admits a stability center in this variant's cone
    pub vertex: bool,
    pub stability: Vec<StabilityEntry>,
    pub diagram: Option<DiagramReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub schema: u32,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
    pub points: Vec<Vec<f64>>,
    pub clustering: Vec<Vec<usize>>,
    pub shape: Vec<usize>,
    pub lower: Vec<usize>,
    pub upper: Vec<usize>,
    pub general_position: GeneralPositionReport,
    pub lsa_objective_at_p2_sites: Option<f64>,
    pub eq: VariantReport,
    pub pm: VariantReport,
}

fn variant_report(
    ps: &PointSet,
    c: &Clustering,
    variant: Variant,
    bounds: &Bounds,
    samples: usize,
    seed: u64,
) -> Result<VariantReport> {
    let nc = build_normal_cone(ps, c, variant, bounds)?;
    let est = nc.cone.estimate_volume(samples, seed);
    let mut out = VariantReport {
        variant: variant.label().to_string(),
        guarantee: match nc.guarantee {
            Guarantee::Exact => "exact".to_string(),
            Guarantee::Heuristic => "heuristic".to_string(),
        },
        n_normals: nc.cone.normals().len(),
        n_facets: None,
        mu_hat: est.mu_hat,
        std_err: est.std_err,
        vertex: false,
        stability: Vec::new(),
        diagram: None,
    };
    if est.mu_hat == 0.0 {
        // no sampled direction lands inside: treat as a non-vertex clustering
        // and skip the stability machinery
        return Ok(out);
    }
    let filtered = match nc.filter_facets() {
        Ok(f) => f,
        Err(Error::EmptyInterior) => return Ok(out),
        Err(e) => return Err(e),
    };
    out.n_facets = Some(filtered.cone.facet_indices().len());
    for p in [PNorm::Two, PNorm::Inf] {
        match most_stable_site(&filtered.cone, p) {
            Ok(st) => out.stability.push(StabilityEntry {
                p: p.label(),
                z: st.z,
                tau: st.tau,
                active_set: st.active_set,
                kkt_residual: st.kkt_residual,
            }),
            Err(Error::EmptyInterior) => return Ok(out),
            Err(e) => return Err(e),
        }
    }
    out.vertex = true;

    let z2 = &out.stability[0].z;
    let a = SiteVector::new(ps.dim(), c.k(), z2.clone())?;
    if a.coincident_sites().is_none() {
        if let Ok(w) = weights_for_sites(ps, c, &a, variant, bounds) {
            let strict = verify_induces(&w.diagram, ps, c, true).ok;
            out.diagram = Some(DiagramReport {
                sites: w.diagram.sites().to_vec(),
                weights: w.diagram.weights().to_vec(),
                margin: w.margin,
                strict,
            });
        }
    }
    Ok(out)
}

/// Run the full pipeline on a dataset that carries a clustering.
pub fn build_report(ds: &Dataset, samples: usize, seed: u64) -> Result<Report> {
    let ps = ds.point_set()?;
    let bounds = ds.bounds()?;
    let c = ds
        .clustering()?
        .ok_or_else(|| Error::InvalidClustering("dataset has no clustering".into()))?;
    if !c.is_feasible(&bounds) {
        return Err(Error::InfeasibleClustering);
    }
    let gp = ps.general_position();
    let eq = variant_report(&ps, &c, Variant::Single, &bounds, samples, seed)?;
    let pm = variant_report(&ps, &c, Variant::Bounded, &bounds, samples, seed)?;
    let lsa_objective_at_p2_sites = eq
        .stability
        .first()
        .map(|st| {
            SiteVector::new(ps.dim(), c.k(), st.z.clone())
                .map(|a| lsa_objective(&ps, &c, &a))
        })
        .transpose()?;
    Ok(Report {
        schema: REPORT_SCHEMA,
        n: ps.len(),
        d: ps.dim(),
        k: c.k(),
        samples,
        seed,
        points: ps.iter_points().map(|p| p.to_vec()).collect(),
        clustering: c.clusters(),
        shape: c.shape().to_vec(),
        lower: bounds.lower().to_vec(),
        upper: bounds.upper().to_vec(),
        general_position: GeneralPositionReport {
            no_3_collinear: gp.no_3_collinear,
            no_4_collinear: gp.no_4_collinear,
        },
        lsa_objective_at_p2_sites,
        eq,
        pm,
    })
}

pub fn to_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}
