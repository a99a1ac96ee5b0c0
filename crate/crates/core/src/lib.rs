//! Quantify clustering quality as normal-cone volume on partition polytopes.
//!
//! The crate revolves around a single pipeline: a clustering of a point set
//! corresponds to a vertex of a (bounded- or single-shape) partition
//! polytope; the vertex's normal cone collects every site vector for which
//! the clustering is an optimal size-constrained least-squares assignment
//! and admits a separating power diagram. This crate
//!
//! - enumerates the cone's H-representation from single (cyclical)
//!   [`movements`] and filters it down to facets ([`cone`]),
//! - estimates the cone's share of the unit sphere by Monte Carlo sampling
//!   ([`cone::estimate_volume`]),
//! - computes maximally perturbation-stable site vectors by a min-norm
//!   quadratic program ([`stability`]),
//! - constructs separating power diagrams by difference constraints
//!   ([`powerdiagram`]),
//! - solves size-constrained assignments by min-cost transportation and runs
//!   Lloyd's k-means ([`assign`]), and
//! - validates all fast paths against exhaustive enumeration at desk scale
//!   ([`oracle`]).

pub mod assign;
pub mod bounds;
pub mod clustering;
pub mod cone;
pub mod dataset;
pub mod demo;
pub mod error;
pub mod movements;
pub mod oracle;
pub mod point_set;
pub mod powerdiagram;
pub mod stability;

mod lp;
mod vecmath;

pub use bounds::Bounds;
pub use clustering::{clustering_vector, Clustering, ClusteringVector, SiteVector};
pub use cone::{build_normal_cone, Cone, NormalConeH, Variant, VolumeEstimate};
pub use error::{Error, Result};
pub use point_set::{GeneralPosition, PointSet};
