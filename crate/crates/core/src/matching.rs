//! Optimal assignment (Hungarian algorithm) for matching computed point sets.

use crate::linalg::C64;

/// Minimum-cost assignment of rows to distinct columns (`rows ≤ cols`);
/// returns the column of each row.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let m = cost[0].len();
    assert!(n <= m, "more rows than columns");
    // Potentials formulation, 1-based with a sentinel column 0.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; n];
    for j in 1..=m {
        if p[j] != 0 {
            out[p[j] - 1] = j - 1;
        }
    }
    out
}

/// Matches `a` into `b` minimizing the total distance; returns the
/// assignment and the largest matched distance.
pub fn match_points(a: &[C64], b: &[C64]) -> (Vec<usize>, f64) {
    if a.is_empty() {
        return (Vec::new(), 0.0);
    }
    let cost: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| (x - y).norm()).collect()).collect();
    let assign = hungarian(&cost);
    let worst = assign.iter().enumerate().map(|(i, &j)| cost[i][j]).fold(0.0, f64::max);
    (assign, worst)
}

/// Largest matched distance for sets of equal size; infinite when sizes differ.
pub fn matched_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    match_points(a, b).1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignment_is_optimal() {
        let cost = vec![vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
        let a = hungarian(&cost);
        let total: f64 = a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        assert_eq!(total, 5.0);
    }

    #[test]
    fn greedy_would_fail() {
        let a = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        let b = [C64::new(0.6, 0.0), C64::new(-0.6, 0.0)];
        let (assign, worst) = match_points(&a, &b);
        assert_eq!(assign, vec![1, 0]);
        assert!((worst - 0.6).abs() < 1e-15);
    }
}
