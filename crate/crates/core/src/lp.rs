//! Dense tableau simplex for the small irredundancy LPs.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;

pub struct LpSolution {
    pub objective: f64,
    pub x: Vec<f64>,
}

/// Maximize `c^T x` subject to `A x <= b`, `x >= 0`, with `b >= 0`
/// componentwise so the slack basis is feasible.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let m = a.len();
    let n = c.len();
    debug_assert!(b.len() == m && a.iter().all(|row| row.len() == n));
    debug_assert!(b.iter().all(|&v| v >= 0.0));

    // tableau rows: [structural | slack | rhs]
    let width = n + m + 1;
    let mut t: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let mut r = vec![0.0; width];
        r[..n].copy_from_slice(row);
        r[n + i] = 1.0;
        r[width - 1] = b[i];
        t.push(r);
    }
    // cost row holds negative reduced costs; optimal when all >= -tol
    let mut cost = vec![0.0; width];
    for (j, &cj) in c.iter().enumerate() {
        cost[j] = -cj;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let extract = |t: &[Vec<f64>], basis: &[usize]| {
        let mut x = vec![0.0; n];
        for (i, &b) in basis.iter().enumerate() {
            if b < n {
                x[b] = t[i][width - 1];
            }
        }
        x
    };

    let max_iters = 200 * (m + n) + 1000;
    // Dantzig's rule first, Bland's rule after a while to break cycling
    let bland_after = 20 * (m + n) + 200;
    for iter in 0..max_iters {
        let entering = if iter < bland_after {
            (0..n + m)
                .filter(|&j| cost[j] < -PIVOT_TOL)
                .min_by(|&x, &y| cost[x].total_cmp(&cost[y]))
        } else {
            (0..n + m).find(|&j| cost[j] < -PIVOT_TOL)
        };
        let Some(col) = entering else {
            // the cost row's rhs accumulates the objective value
            return Ok(LpSolution {
                objective: cost[width - 1],
                x: extract(&t, &basis),
            });
        };

        let mut leaving: Option<(usize, f64)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[col] > PIVOT_TOL {
                let ratio = row[width - 1] / row[col];
                let better = match leaving {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - PIVOT_TOL
                            || (ratio < lr + PIVOT_TOL && basis[i] < basis[li])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leaving else {
            return Ok(LpSolution {
                objective: f64::INFINITY,
                x: extract(&t, &basis),
            });
        };

        let piv = t[row][col];
        for v in t[row].iter_mut() {
            *v /= piv;
        }
        for i in 0..m {
            if i != row && t[i][col].abs() > 0.0 {
                let f = t[i][col];
                for j in 0..width {
                    t[i][j] -= f * t[row][j];
                }
            }
        }
        if cost[col].abs() > 0.0 {
            let f = cost[col];
            for j in 0..width {
                cost[j] -= f * t[row][j];
            }
        }
        basis[row] = col;
    }
    Err(Error::NoConvergence("simplex iteration limit".into()))
}

/// Maximize `v^T z` over `{z : rows[i]^T z <= 0, |z|_inf <= 1}` by splitting
/// `z = z+ - z-`; returns the optimum and a maximizer.
pub fn max_direction_in_cone(v: &[f64], rows: &[&[f64]]) -> Result<(f64, Vec<f64>)> {
    let dim = v.len();
    let n = 2 * dim;
    let mut a: Vec<Vec<f64>> = Vec::with_capacity(rows.len() + n);
    let mut b = Vec::with_capacity(rows.len() + n);
    for row in rows {
        a.push(split_row(row));
        b.push(0.0);
    }
    // box: z_j <= 1 and -z_j <= 1
    for j in 0..dim {
        let mut hi = vec![0.0; n];
        hi[j] = 1.0;
        hi[dim + j] = -1.0;
        a.push(hi);
        b.push(1.0);
        let mut lo = vec![0.0; n];
        lo[j] = -1.0;
        lo[dim + j] = 1.0;
        a.push(lo);
        b.push(1.0);
    }
    let c = split_row(v);
    let sol = maximize(&c, &a, &b)?;
    Ok((sol.objective, merge_split(&sol.x, dim)))
}

fn split_row(row: &[f64]) -> Vec<f64> {
    let dim = row.len();
    let mut r = vec![0.0; 2 * dim];
    for (j, &x) in row.iter().enumerate() {
        r[j] = x;
        r[dim + j] = -x;
    }
    r
}

fn merge_split(x: &[f64], dim: usize) -> Vec<f64> {
    (0..dim).map(|j| x[j] - x[dim + j]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_lp() {
        // max x + y s.t. x + 2y <= 4, 3x + y <= 6 -> (1.6, 1.2), objective 2.8
        let sol = maximize(
            &[1.0, 1.0],
            &[vec![1.0, 2.0], vec![3.0, 1.0]],
            &[4.0, 6.0],
        )
        .unwrap();
        assert!((sol.objective - 2.8).abs() < 1e-9);
        assert!((sol.x[0] - 1.6).abs() < 1e-9 && (sol.x[1] - 1.2).abs() < 1e-9);
    }

    #[test]
    fn degenerate_rhs() {
        // max x s.t. x - y <= 0, x <= 1: optimum 1 at x = y = 1
        let sol =
            maximize(&[1.0, 0.0], &[vec![1.0, -1.0], vec![1.0, 0.0]], &[0.0, 1.0]).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn direction_blocked_by_cone() {
        // e1 + e2 is a conic combination of e1 and e2: optimum 0
        let e1 = [1.0, 0.0];
        let e2 = [0.0, 1.0];
        let (obj, _) = max_direction_in_cone(&[1.0, 1.0], &[&e1, &e2]).unwrap();
        assert!(obj.abs() < 1e-8, "got {obj}");
    }

    #[test]
    fn direction_exposed() {
        // e1 against {e2} alone can reach z = (1, -1)
        let e2 = [0.0, 1.0];
        let (obj, z) = max_direction_in_cone(&[1.0, 0.0], &[&e2]).unwrap();
        assert!((obj - 1.0).abs() < 1e-8, "got {obj}");
        assert!((z[0] - 1.0).abs() < 1e-8);
        assert!(z[1] <= 1e-9);
    }

}
