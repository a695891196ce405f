//! Minimum-cost perfect assignment (Hungarian method, O(n^3) with potentials).

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssignmentError {
    #[error("cost matrix row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("cost matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `row_to_col[i]` is the column assigned to row `i`.
    pub row_to_col: Vec<usize>,
    pub total_cost: f64,
}

/// Solves the square assignment problem on `cost[row][col]`.
///
/// Ties are broken deterministically by the scan order (lowest column first).
pub fn hungarian(cost: &[Vec<f64>]) -> Result<Assignment, AssignmentError> {
    let n = cost.len();
    for (row, r) in cost.iter().enumerate() {
        if r.len() != n {
            return Err(AssignmentError::NotSquare {
                row,
                len: r.len(),
                expected: n,
            });
        }
        if let Some(col) = r.iter().position(|c| !c.is_finite()) {
            return Err(AssignmentError::NonFinite { row, col });
        }
    }
    if n == 0 {
        return Ok(Assignment {
            row_to_col: Vec::new(),
            total_cost: 0.0,
        });
    }

    // 1-based potentials; column 0 is a virtual sink
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut col_owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        col_owner[0] = i;
        let mut j0 = 0usize;
        let mut min_to = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = col_owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < min_to[j] {
                    min_to[j] = cur;
                    way[j] = j0;
                }
                if min_to[j] < delta {
                    delta = min_to[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[col_owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
            if col_owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_owner[j0] = col_owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        row_to_col[col_owner[j] - 1] = j - 1;
    }
    let total_cost = row_to_col
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .sum();
    Ok(Assignment {
        row_to_col,
        total_cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;

    fn brute_force(cost: &[Vec<f64>]) -> f64 {
        let n = cost.len();
        (0..n)
            .permutations(n)
            .map(|p| p.iter().enumerate().map(|(i, &j)| cost[i][j]).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn trivial_and_empty() {
        let a = hungarian(&[vec![4.2]]).unwrap();
        assert_eq!(a.row_to_col, vec![0]);
        assert_eq!(a.total_cost, 4.2);
        assert_eq!(hungarian(&[]).unwrap().total_cost, 0.0);
    }

    #[test]
    fn two_by_two_picks_cheaper_pairing() {
        let a = hungarian(&[vec![1.0, 5.0], vec![5.0, 2.0]]).unwrap();
        assert_eq!(a.row_to_col, vec![0, 1]);
        let b = hungarian(&[vec![5.0, 1.0], vec![2.0, 5.0]]).unwrap();
        assert_eq!(b.row_to_col, vec![1, 0]);
        assert_eq!(b.total_cost, 3.0);
    }

    #[test]
    fn rejects_ragged_matrix() {
        assert!(matches!(
            hungarian(&[vec![1.0, 2.0], vec![1.0]]),
            Err(AssignmentError::NotSquare { row: 1, .. })
        ));
        assert!(matches!(
            hungarian(&[vec![f64::NAN]]),
            Err(AssignmentError::NonFinite { .. })
        ));
    }

    proptest! {
        #[test]
        fn matches_enumeration(n in 1usize..=6, seed in proptest::collection::vec(0.0..100.0f64, 36)) {
            let cost: Vec<Vec<f64>> = (0..n).map(|i| seed[i * 6..i * 6 + n].to_vec()).collect();
            let a = hungarian(&cost).unwrap();
            let mut cols = a.row_to_col.clone();
            cols.sort_unstable();
            prop_assert_eq!(cols, (0..n).collect::<Vec<_>>());
            prop_assert!((a.total_cost - brute_force(&cost)).abs() < 1e-9);
        }
    }
}
