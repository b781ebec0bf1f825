//! Optimal assignment (Hungarian method) and multiset distances on the disk.

use crate::disk::rho;
use crate::C64;

/// Minimum-cost perfect assignment for a square cost matrix given row-major.
///
/// Returns `assignment[row] = column`.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    assert!(cost.iter().all(|row| row.len() == n), "cost matrix must be square");
    // Potentials-based O(n^3) variant, 1-indexed internally.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut col_owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        col_owner[0] = row;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = col_owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
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
            for j in 0..=n {
                if used[j] {
                    u[col_owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
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
    let mut assignment = vec![0; n];
    for j in 1..=n {
        if col_owner[j] > 0 {
            assignment[col_owner[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Largest pseudo-hyperbolic distance between matched points under the
/// assignment minimizing the total distance. Infinite on cardinality mismatch.
pub fn multiset_distance(left: &[C64], right: &[C64]) -> f64 {
    if left.len() != right.len() {
        return f64::INFINITY;
    }
    let cost: Vec<Vec<f64>> = left.iter().map(|&z| right.iter().map(|&w| rho(z, w)).collect()).collect();
    hungarian(&cost).iter().enumerate().map(|(i, &j)| cost[i][j]).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn hungarian_matches_brute_force() {
        let cost = vec![
            vec![4.0, 1.0, 3.0, 2.5],
            vec![2.0, 0.0, 5.0, 1.0],
            vec![3.0, 2.0, 2.0, 7.0],
            vec![1.5, 3.0, 0.5, 2.0],
        ];
        let total = |a: &[usize]| a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum::<f64>();
        let best = permutations(4).iter().map(|p| total(p)).fold(f64::MAX, f64::min);
        assert!((total(&hungarian(&cost)) - best).abs() < 1e-12);
    }

    #[test]
    fn distance_of_permuted_sets_is_zero() {
        let a = [C64::new(0.1, 0.2), C64::new(-0.5, 0.0), C64::new(0.0, 0.7)];
        let b = [a[2], a[0], a[1]];
        assert_eq!(multiset_distance(&a, &b), 0.0);
        assert!(multiset_distance(&a, &b[..2]).is_infinite());
    }
}
