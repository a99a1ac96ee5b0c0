//! Dataset file format: UTF-8 JSON with points, bounds and an optional
//! clustering (clusters as lists of 0-based point indices).

use crate::bounds::Bounds;
use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::point_set::PointSet;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Dataset {
    pub points: Vec<Vec<f64>>,
    pub k: usize,
    pub lower: Vec<usize>,
    pub upper: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clustering: Option<Vec<Vec<usize>>>,
}

impl Dataset {
    pub fn new(points: Vec<Vec<f64>>, k: usize, lower: Vec<usize>, upper: Vec<usize>) -> Self {
        Dataset { points, k, lower, upper, clustering: None }
    }

    pub fn load(path: &Path) -> Result<Dataset> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidClustering(format!("cannot read {path:?}: {e}")))?;
        Dataset::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Dataset> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidClustering(format!("malformed dataset: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())
            .map_err(|e| Error::InvalidClustering(format!("cannot write {path:?}: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("dataset serializes");
        s.push('\n');
        s
    }

    pub fn point_set(&self) -> Result<PointSet> {
        PointSet::new(self.points.clone())
    }

    pub fn bounds(&self) -> Result<Bounds> {
        if self.lower.len() != self.k || self.upper.len() != self.k {
            return Err(Error::InvalidBounds(format!(
                "bounds have {}/{} entries but k = {}",
                self.lower.len(),
                self.upper.len(),
                self.k
            )));
        }
        Bounds::new(self.lower.clone(), self.upper.clone(), self.points.len())
    }

    pub fn clustering(&self) -> Result<Option<Clustering>> {
        match &self.clustering {
            None => Ok(None),
            Some(clusters) => {
                if clusters.len() != self.k {
                    return Err(Error::InvalidClustering(format!(
                        "clustering has {} clusters but k = {}",
                        clusters.len(),
                        self.k
                    )));
                }
                Ok(Some(Clustering::from_clusters(clusters, self.points.len())?))
            }
        }
    }

    pub fn set_clustering(&mut self, c: &Clustering) {
        self.clustering = Some(c.clusters());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo::twelve_points;

    #[test]
    fn round_trip() {
        let (ps, c) = twelve_points();
        let mut ds = Dataset::new(
            ps.iter_points().map(|p| p.to_vec()).collect(),
            3,
            vec![4, 4, 4],
            vec![4, 4, 4],
        );
        ds.set_clustering(&c);
        let back = Dataset::from_json(&ds.to_json()).unwrap();
        assert_eq!(back, ds);
        assert_eq!(back.point_set().unwrap(), ps);
        assert_eq!(back.clustering().unwrap().unwrap(), c);
        assert!(back.bounds().unwrap().is_single());
    }

    #[test]
    fn clustering_field_is_optional() {
        let ds = Dataset::from_json(
            r#"{"points": [[1.0], [2.0]], "k": 2, "lower": [0, 0], "upper": [2, 2]}"#,
        )
        .unwrap();
        assert!(ds.clustering().unwrap().is_none());
    }

    #[test]
    fn bad_clustering_rejected() {
        let ds = Dataset::from_json(
            r#"{"points": [[1.0], [2.0]], "k": 2, "lower": [0, 0], "upper": [2, 2],
               "clustering": [[0], [0]]}"#,
        )
        .unwrap();
        assert!(ds.clustering().is_err());
    }
}
