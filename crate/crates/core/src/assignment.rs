//! Dense linear sum assignment (shortest augmenting path Hungarian method).
//!
//! Runs in O(n² m) for an n × m matrix with n ≤ m. Wider-than-tall and
//! taller-than-wide inputs are both accepted; rows or columns that do not
//! fit stay unassigned.

/// Result of an assignment: `row_to_col[i]` is the column assigned to row
/// `i`, or `None` when the matrix has more rows than columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub row_to_col: Vec<Option<usize>>,
    pub total: f64,
}

impl Assignment {
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.row_to_col.iter().enumerate().filter_map(|(r, c)| c.map(|c| (r, c)))
    }
}

/// Minimum-cost assignment over a row-major `rows × cols` matrix. All
/// entries must be finite.
pub fn min_cost_assignment(costs: &[f64], rows: usize, cols: usize) -> Assignment {
    assert_eq!(costs.len(), rows * cols, "cost matrix has wrong size");
    debug_assert!(costs.iter().all(|c| c.is_finite()), "cost matrix has non-finite entries");
    if rows == 0 || cols == 0 {
        return Assignment { row_to_col: vec![None; rows], total: 0.0 };
    }
    if rows > cols {
        let mut transposed = vec![0.0; rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                transposed[c * rows + r] = costs[r * cols + c];
            }
        }
        let t = solve(&transposed, cols, rows);
        let mut row_to_col = vec![None; rows];
        for (c, r) in t.iter().enumerate() {
            row_to_col[*r] = Some(c);
        }
        let total = row_to_col.iter().enumerate().filter_map(|(r, c)| c.map(|c| costs[r * cols + c])).sum();
        return Assignment { row_to_col, total };
    }
    let cols_of = solve(costs, rows, cols);
    let total = cols_of.iter().enumerate().map(|(r, &c)| costs[r * cols + c]).sum();
    Assignment { row_to_col: cols_of.into_iter().map(Some).collect(), total }
}

/// Maximum-weight assignment; see [`min_cost_assignment`].
pub fn max_weight_assignment(weights: &[f64], rows: usize, cols: usize) -> Assignment {
    let negated: Vec<f64> = weights.iter().map(|w| -w).collect();
    let mut a = min_cost_assignment(&negated, rows, cols);
    a.total = -a.total;
    a
}

// Potentials-based shortest augmenting path, rows ≤ cols. Returns the column
// of each row.
fn solve(costs: &[f64], rows: usize, cols: usize) -> Vec<usize> {
    debug_assert!(rows <= cols);
    // 1-based with a virtual column 0
    let mut u = vec![0.0f64; rows + 1];
    let mut v = vec![0.0f64; cols + 1];
    let mut owner = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    let mut minv = vec![0.0f64; cols + 1];
    let mut used = vec![false; cols + 1];

    for i in 1..=rows {
        owner[0] = i;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|m| *m = f64::INFINITY);
        used.iter_mut().for_each(|b| *b = false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let row = &costs[(i0 - 1) * cols..i0 * cols];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=cols {
                if used[j] {
                    continue;
                }
                let reduced = row[j - 1] - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=cols {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut col_of = vec![0usize; rows];
    for j in 1..=cols {
        if owner[j] != 0 {
            col_of[owner[j] - 1] = j - 1;
        }
    }
    col_of
}
