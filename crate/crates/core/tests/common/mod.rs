//! Independent oracles shared by the integration tests.

#![allow(dead_code, clippy::needless_range_loop)]

use mrf_learn::rng::RngStream;

/// Minimum of `Σ|Φw − y|` over `Σ|w| ≤ W` by enumerating every point where
/// `F` independent kink hyperplanes meet: residual zeros `Φ_i·w = y_i`,
/// coordinate zeros `w_j = 0`, and at most one budget facet `σ·w = W`.
pub fn vertex_oracle(phi: &[Vec<f64>], y: &[f64], budget: f64) -> f64 {
    let f = phi[0].len();
    let mut planes: Vec<(Vec<f64>, f64)> = phi.iter().cloned().zip(y.iter().copied()).collect();
    for j in 0..f {
        let mut e = vec![0.0; f];
        e[j] = 1.0;
        planes.push((e, 0.0));
    }
    let objective = |w: &[f64]| -> f64 {
        phi.iter().zip(y).map(|(r, yi)| (r.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() - yi).abs()).sum()
    };
    let mut best = objective(&vec![0.0; f]);
    let mut consider = |rows: &[(Vec<f64>, f64)]| {
        if let Some(w) = solve_square(rows) {
            if w.iter().map(|v| v.abs()).sum::<f64>() <= budget + 1e-9 {
                best = best.min(objective(&w));
            }
        }
    };
    for_each_subset(planes.len(), f, &mut |idx| {
        let rows: Vec<_> = idx.iter().map(|&i| planes[i].clone()).collect();
        consider(&rows);
    });
    for sigma in 0..(1u32 << f) {
        let facet: Vec<f64> = (0..f).map(|j| if sigma >> j & 1 == 1 { 1.0 } else { -1.0 }).collect();
        for_each_subset(planes.len(), f - 1, &mut |idx| {
            let mut rows: Vec<_> = idx.iter().map(|&i| planes[i].clone()).collect();
            rows.push((facet.clone(), budget));
            consider(&rows);
        });
    }
    best
}

fn for_each_subset(n: usize, k: usize, visit: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            visit(cur);
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, visit);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), visit);
}

/// Gaussian elimination; `None` when singular.
fn solve_square(rows: &[(Vec<f64>, f64)]) -> Option<Vec<f64>> {
    let n = rows.len();
    let mut a: Vec<Vec<f64>> = rows.iter().map(|(r, b)| r.iter().copied().chain([*b]).collect()).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(p, c);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..=n {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

pub fn random_instance(seed: u64) -> (Vec<Vec<f64>>, Vec<f64>, f64) {
    let mut r = RngStream::new(seed, 0x4C31);
    let s = 1 + r.below(12);
    let f = 1 + r.below(6);
    let phi: Vec<Vec<f64>> = (0..s).map(|_| (0..f).map(|_| 2.0 * r.unit() - 1.0).collect()).collect();
    let y: Vec<f64> = (0..s).map(|_| if r.coin() { 1.0 } else { -1.0 }).collect();
    let budget = [0.0, 0.3, 1.0, 3.0, 10.0][r.below(5)];
    (phi, y, budget)
}
