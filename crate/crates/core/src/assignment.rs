//! Minimum-cost perfect matching on small square cost matrices.

use num_complex::Complex64;

/// Hungarian algorithm (shortest augmenting paths with potentials), O(n³).
///
/// Returns `assign` with `assign[row] = column`, minimizing the summed cost.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // 1-indexed potentials; column 0 is the virtual source.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut col0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r = owner[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let reduced = cost[r - 1][col - 1] - u[r] - v[col];
                if reduced < minv[col] {
                    minv[col] = reduced;
                    way[col] = col0;
                }
                if minv[col] < delta {
                    delta = minv[col];
                    col1 = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    u[owner[col]] += delta;
                    v[col] -= delta;
                } else {
                    minv[col] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            owner[col0] = owner[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    for col in 1..=n {
        assign[owner[col] - 1] = col - 1;
    }
    assign
}

/// Absolute-distance cost matrix `cost[i][j] = |a[i] - b[j]|`.
pub fn distance_matrix(a: &[Complex64], b: &[Complex64]) -> Vec<Vec<f64>> {
    a.iter().map(|x| b.iter().map(|y| (x - y).norm()).collect()).collect()
}

/// Optimal matching of `a` onto `b` under absolute distance.
pub fn match_values(a: &[Complex64], b: &[Complex64]) -> Vec<usize> {
    min_cost_assignment(&distance_matrix(a, b))
}

/// Largest pair distance under the optimal matching; infinite when the
/// sizes differ.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    match_values(a, b)
        .iter()
        .enumerate()
        .map(|(i, &j)| (a[i] - b[j]).norm())
        .fold(0.0, f64::max)
}

/// Smallest pairwise separation, infinite for fewer than two values.
pub fn min_separation(values: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            best = best.min((values[i] - values[j]).norm());
        }
    }
    best
}
