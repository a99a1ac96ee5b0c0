//! Built-in demo instance: twelve planar points in three clusters of four.
//! Used by the documentation, the test suites and the CLI examples.

use crate::clustering::Clustering;
use crate::point_set::PointSet;

/// Labels of the two-step example path (cluster 0 -> 1 -> 2).
pub const PATH_LABELS: [usize; 2] = [3, 7];

/// Labels of the example three-cycle (cluster 0 -> 1 -> 2 -> 0).
pub const CYCLE3_LABELS: [usize; 3] = [3, 7, 11];

/// The demo instance: clusters {0..3}, {4..7}, {8..11}, shape (4, 4, 4).
pub fn twelve_points() -> (PointSet, Clustering) {
    let ps = PointSet::new(vec![
        vec![1.0, 0.0],
        vec![1.0, -1.0],
        vec![2.0, 0.0],
        vec![0.0, -1.0],
        vec![-2.0, 0.0],
        vec![-2.0, -2.0],
        vec![-3.0, -1.0],
        vec![-3.0, 1.0],
        vec![-1.0, 2.0],
        vec![-1.0, 3.0],
        vec![0.0, 3.0],
        vec![1.0, 2.0],
    ])
    .expect("demo points are valid");
    let c = Clustering::from_assignment(vec![0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2], 3)
        .expect("demo clustering is valid");
    (ps, c)
}
