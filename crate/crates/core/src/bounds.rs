//! Cluster-size windows `s^- <= |C| <= s^+`.

use crate::error::{Error, Result};

/// Lower and upper bounds on the k cluster sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    lower: Vec<usize>,
    upper: Vec<usize>,
}

impl Bounds {
    /// `n` is the number of points the bounds must accommodate.
    pub fn new(lower: Vec<usize>, upper: Vec<usize>, n: usize) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::InvalidBounds(format!(
                "lower has {} entries, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        for i in 0..lower.len() {
            if lower[i] > upper[i] || upper[i] > n {
                return Err(Error::InvalidBounds(format!(
                    "cluster {}: need 0 <= {} <= {} <= {}",
                    i, lower[i], upper[i], n
                )));
            }
        }
        let lo: usize = lower.iter().sum();
        let hi: usize = upper.iter().sum();
        if lo > n || hi < n {
            return Err(Error::InvalidBounds(format!(
                "no feasible clustering: sum(lower) = {lo}, sum(upper) = {hi}, n = {n}"
            )));
        }
        Ok(Bounds { lower, upper })
    }

    /// Fixed shape: `s^- = s^+ = shape`.
    pub fn single_shape(shape: &[usize]) -> Self {
        Bounds {
            lower: shape.to_vec(),
            upper: shape.to_vec(),
        }
    }

    /// Trivial bounds `0..=n` for every cluster.
    pub fn all_shape(k: usize, n: usize) -> Self {
        Bounds {
            lower: vec![0; k],
            upper: vec![n; k],
        }
    }

    pub fn k(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[usize] {
        &self.lower
    }

    pub fn upper(&self) -> &[usize] {
        &self.upper
    }

    pub fn contains_shape(&self, shape: &[usize]) -> bool {
        shape.len() == self.k()
            && shape
                .iter()
                .enumerate()
                .all(|(i, &s)| self.lower[i] <= s && s <= self.upper[i])
    }

    pub fn is_single(&self) -> bool {
        self.lower == self.upper
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_crossed_bounds() {
        assert!(Bounds::new(vec![3], vec![2], 5).is_err());
    }

    #[test]
    fn rejects_infeasible_totals() {
        // sum of uppers below n
        assert!(Bounds::new(vec![0, 0], vec![1, 1], 5).is_err());
        // sum of lowers above n
        assert!(Bounds::new(vec![3, 3], vec![4, 4], 5).is_err());
    }

    #[test]
    fn shape_containment() {
        let b = Bounds::new(vec![1, 0], vec![3, 4], 4).unwrap();
        assert!(b.contains_shape(&[2, 2]));
        assert!(b.contains_shape(&[1, 3]));
        assert!(!b.contains_shape(&[0, 4]));
        assert!(!b.contains_shape(&[4, 0]));
    }

    #[test]
    fn single_shape_is_single() {
        assert!(Bounds::single_shape(&[2, 2]).is_single());
        assert!(!Bounds::all_shape(2, 4).is_single());
    }
}
