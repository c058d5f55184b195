//! Dense tableau simplex for `max cᵀx s.t. Ax ≤ b, x ≥ 0` with `b ≥ 0`.
//!
//! The origin is feasible under `b ≥ 0`, so no phase one is needed. Bland's rule
//! prevents cycling on the degenerate polytopes that rate regions produce.

use alloc::vec;
use alloc::vec::Vec;

const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Optimal dual multipliers, one per row of `A`.
    pub duals: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("objective is unbounded")]
    Unbounded,
    #[error("right-hand side must be nonnegative")]
    NegativeRhs,
    #[error("iteration limit reached")]
    IterationLimit,
}

/// `a` is row-major with `rhs.len()` rows and `c.len()` columns.
pub fn maximize(c: &[f64], a: &[Vec<f64>], rhs: &[f64]) -> Result<LpSolution, LpError> {
    let n = c.len();
    let m = rhs.len();
    if rhs.iter().any(|&r| r < 0.0 || r.is_nan()) {
        return Err(LpError::NegativeRhs);
    }
    let width = n + m + 1;
    let mut t = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        t[i][..n].copy_from_slice(&a[i]);
        t[i][n + i] = 1.0;
        t[i][width - 1] = rhs[i];
    }
    for j in 0..n {
        t[m][j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    for _ in 0..50_000 {
        let Some(enter) = (0..n + m).find(|&j| t[m][j] < -PIVOT_TOL) else {
            let mut x = vec![0.0; n];
            for (i, &bv) in basis.iter().enumerate() {
                if bv < n {
                    x[bv] = t[i][width - 1];
                }
            }
            let duals = (0..m).map(|i| t[m][n + i].max(0.0)).collect();
            return Ok(LpSolution { x, value: t[m][width - 1], duals });
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][enter] > PIVOT_TOL {
                let ratio = t[i][width - 1] / t[i][enter];
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best - 1e-15 || (ratio <= best + 1e-15 && basis[i] < basis[l]),
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            return Err(LpError::Unbounded);
        };
        let p = t[r][enter];
        for v in t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r {
                let f = row[enter];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        basis[r] = enter;
    }
    Err(LpError::IterationLimit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let sol = maximize(
            &[3.0, 5.0],
            &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            &[4.0, 12.0, 18.0],
        )
        .unwrap();
        assert!((sol.value - 36.0).abs() < 1e-12);
        assert!((sol.x[0] - 2.0).abs() < 1e-12 && (sol.x[1] - 6.0).abs() < 1e-12);
        // strong duality
        let dual_value: f64 = sol.duals.iter().zip([4.0, 12.0, 18.0]).map(|(y, b)| y * b).sum();
        assert!((dual_value - 36.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_and_degenerate() {
        assert_eq!(maximize(&[1.0], &[vec![-1.0]], &[1.0]), Err(LpError::Unbounded));
        let sol = maximize(&[1.0, 1.0], &[vec![1.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0]], &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(sol.value, 0.0);
    }
}
