//! Minimum-cost one-to-one assignment (Kuhn-Munkres with potentials,
//! shortest-augmenting-path formulation, O(n^3)).
//!
//! Costs may be any finite `f64` (negative values are fine) or
//! `f64::INFINITY` to forbid a pairing. Rectangular matrices are padded to
//! square with zero-cost dummies internally, so every entity on the smaller
//! side gets assigned; pairs whose original cost is infinite are dropped from
//! the result.

/// Cost used in place of `f64::INFINITY` while solving. Finite costs must be
/// small against this for forbidden pairs to stay unattractive; all uses in
/// this crate are bounded by the frame count of a sequence.
const BIG: f64 = 1e9;

/// Solves the assignment problem on `cost` (rows x cols) and returns the
/// matched `(row, col)` pairs with finite cost, sorted by row.
///
/// The returned matching minimizes total cost among all matchings of size
/// `min(rows, cols)`. Ties are resolved deterministically by scan order.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let rows = cost.len();
    let cols = cost.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    debug_assert!(cost.iter().all(|r| r.len() == cols), "ragged cost matrix");
    debug_assert!(
        cost.iter().flatten().all(|c| !c.is_nan()),
        "cost matrix contains NaN"
    );

    let dim = rows.max(cols);
    // row-major padded square matrix, 0-based
    let mut a = vec![0.0f64; dim * dim];
    for (i, row) in cost.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            a[i * dim + j] = if c.is_finite() { c } else { BIG };
        }
    }

    // potentials and matching, 1-based with index 0 as the virtual start
    let mut u = vec![0.0f64; dim + 1];
    let mut v = vec![0.0f64; dim + 1];
    let mut matched_row = vec![0usize; dim + 1]; // column -> row (0 = free)
    let mut way = vec![0usize; dim + 1];

    for i in 1..=dim {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; dim + 1];
        let mut used = vec![false; dim + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=dim {
                if used[j] {
                    continue;
                }
                let cur = a[(i0 - 1) * dim + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=dim {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        // augment along the found path
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut result = Vec::new();
    for (j, &i) in matched_row.iter().enumerate().skip(1) {
        if i == 0 {
            continue;
        }
        let (row, col) = (i - 1, j - 1);
        if row < rows && col < cols && cost[row][col].is_finite() {
            result.push((row, col));
        }
    }
    result.sort_unstable();
    result
}
