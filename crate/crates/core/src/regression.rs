//! Budgeted L1 regression: minimize `Σ_i c_i |Φ_i·w − y_i|` subject to `Σ|w| ≤ W`.
//!
//! Standard form over `w⁺, w⁻, p, q, r ≥ 0`:
//! `σ_i (Φ_i·(w⁺ − w⁻) + p_i − q_i) = |y_i|` with `σ_i = sign(y_i)` and
//! `Σ(w⁺ + w⁻) + r = W`. The slack columns are signed unit vectors, so the
//! all-slack start is an identity basis with `w = 0`. The solver is a revised
//! primal simplex holding an explicit basis inverse; only `Φ` is stored.
//!
//! Column order for pivot rules: `w⁺_0..w⁺_F, w⁻_0..w⁻_F, p_0..p_s, q_0..q_s, r`.

use crate::error::{input, Error, Result};
use crate::linalg::{dot, Matrix};
use std::collections::HashMap;
use std::fmt::Write as _;

/// Reduced costs above `-COST_TOL` count as nonnegative.
pub const COST_TOL: f64 = 1e-10;
/// Column entries at most `PIVOT_TOL` are skipped in the ratio test.
pub const PIVOT_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots before the Dantzig rule falls back to Bland.
pub const DEGENERATE_RUN: usize = 50;
const REFACTOR_EVERY: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Most negative reduced cost, switching to Bland during degenerate runs.
    #[default]
    DantzigBland,
    /// Lowest-index improving column throughout.
    Bland,
}

#[derive(Clone, Debug, PartialEq)]
pub struct L1Problem {
    pub phi: Matrix,
    pub y: Vec<f64>,
    pub budget: f64,
    /// Per-row multiplicities; `None` means all ones.
    pub weights: Option<Vec<f64>>,
}

impl L1Problem {
    pub fn new(phi: Matrix, y: Vec<f64>, budget: f64) -> Self {
        Self { phi, y, budget, weights: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.phi.rows() != self.y.len() {
            return input(format!("Φ has {} rows but y has {} entries", self.phi.rows(), self.y.len()));
        }
        if !(self.budget >= 0.0 && self.budget.is_finite()) {
            return input("budget W must be finite and nonnegative");
        }
        if self.phi.as_slice().iter().chain(&self.y).any(|v| !v.is_finite()) {
            return input("Φ and y must be finite");
        }
        if let Some(c) = &self.weights {
            if c.len() != self.y.len() || c.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                return input("row weights must be finite, nonnegative and one per row");
            }
        }
        Ok(())
    }

    /// `Σ c_i |Φ_i·w − y_i|`.
    pub fn objective(&self, w: &[f64]) -> f64 {
        (0..self.y.len())
            .map(|i| {
                let c = self.weights.as_ref().map_or(1.0, |c| c[i]);
                c * (dot(self.phi.row(i), w) - self.y[i]).abs()
            })
            .sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub iterations: usize,
    pub pivots: usize,
    pub degenerate_pivots: usize,
    pub bland_pivots: usize,
    pub refactorizations: usize,
    /// Rows after merging duplicates.
    pub rows: usize,
    /// Columns after dropping all-zero features.
    pub cols: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct L1Solution {
    pub w: Vec<f64>,
    pub objective: f64,
    pub stats: SolverStats,
}

impl L1Solution {
    /// `feature,weight` rows followed by an `objective` line.
    pub fn to_csv(&self, names: &[String]) -> String {
        let mut s = String::from("feature,weight\n");
        for (j, w) in self.w.iter().enumerate() {
            let name = names.get(j).cloned().unwrap_or_else(|| j.to_string());
            let _ = writeln!(s, "{name},{w:.16e}");
        }
        let _ = writeln!(s, "objective,{:.16e}", self.objective);
        s
    }
}

pub fn predict_linear(w: &[f64], row: &[f64]) -> f64 {
    dot(w, row)
}

/// Merges bitwise-identical `(Φ_i, y_i)` rows, summing their weights. First occurrence order is kept.
pub fn aggregate_rows(phi: &Matrix, y: &[f64], weights: Option<&[f64]>) -> (Matrix, Vec<f64>, Vec<f64>) {
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut rows: Vec<usize> = Vec::new();
    let mut c: Vec<f64> = Vec::new();
    for i in 0..y.len() {
        let mut key: Vec<u64> = phi.row(i).iter().map(|v| v.to_bits()).collect();
        key.push(y[i].to_bits());
        let wi = weights.map_or(1.0, |w| w[i]);
        match index.get(&key) {
            Some(&k) => c[k] += wi,
            None => {
                index.insert(key, rows.len());
                rows.push(i);
                c.push(wi);
            }
        }
    }
    let data: Vec<Vec<f64>> = rows.iter().map(|&i| phi.row(i).to_vec()).collect();
    let m = if data.is_empty() { Matrix::zeros(0, phi.cols()) } else { Matrix::from_rows(&data) };
    (m, rows.iter().map(|&i| y[i]).collect(), c)
}

pub fn solve_l1_regression(p: &L1Problem) -> Result<L1Solution> {
    solve_l1_regression_with(p, PivotRule::default())
}

pub fn solve_l1_regression_with(p: &L1Problem, rule: PivotRule) -> Result<L1Solution> {
    p.validate()?;
    let f_all = p.phi.cols();
    let (phi, y, c) = aggregate_rows(&p.phi, &p.y, p.weights.as_deref());
    let keep: Vec<usize> = (0..f_all).filter(|&j| (0..phi.rows()).any(|i| phi[(i, j)] != 0.0)).collect();
    let mut stats = SolverStats { rows: y.len(), cols: keep.len(), ..Default::default() };
    let mut w = vec![0.0; f_all];
    if !keep.is_empty() && p.budget > 0.0 && !y.is_empty() {
        let reduced = Matrix::from_rows(
            &(0..phi.rows()).map(|i| keep.iter().map(|&j| phi[(i, j)]).collect()).collect::<Vec<Vec<f64>>>(),
        );
        let mut lp = Simplex::new(reduced, &y, &c, p.budget);
        lp.run(rule, &mut stats)?;
        for (k, &j) in keep.iter().enumerate() {
            w[j] = lp.weight(k);
        }
    }
    let l1: f64 = w.iter().map(|v| v.abs()).sum();
    if l1 > p.budget + 1e-12 {
        let s = p.budget / l1;
        w.iter_mut().for_each(|v| *v *= s);
    }
    let objective = p.objective(&w);
    Ok(L1Solution { w, objective, stats })
}

/// Revised simplex state for one L1 program.
struct Simplex {
    /// `σ_i Φ_ij`, data rows only.
    a: Matrix,
    sigma: Vec<f64>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    f: usize,
    s: usize,
    /// Basic variable of each row.
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    /// Row-major `m × m` basis inverse.
    binv: Vec<f64>,
    xb: Vec<f64>,
}

impl Simplex {
    fn new(phi: Matrix, y: &[f64], c: &[f64], budget: f64) -> Self {
        let (s, f) = (phi.rows(), phi.cols());
        let mut a = phi;
        let sigma: Vec<f64> = y.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
        for (i, &sg) in sigma.iter().enumerate() {
            a.row_mut(i).iter_mut().for_each(|v| *v *= sg);
        }
        let m = s + 1;
        let nvar = 2 * f + 2 * s + 1;
        let mut cost = vec![0.0; nvar];
        cost[2 * f..2 * f + s].copy_from_slice(c);
        cost[2 * f + s..2 * f + 2 * s].copy_from_slice(c);
        // Row i starts with whichever of p_i, q_i has column +e_i.
        let basis: Vec<usize> =
            (0..s).map(|i| if sigma[i] > 0.0 { 2 * f + i } else { 2 * f + s + i }).chain([nvar - 1]).collect();
        let mut in_basis = vec![false; nvar];
        basis.iter().for_each(|&b| in_basis[b] = true);
        let mut binv = vec![0.0; m * m];
        (0..m).for_each(|i| binv[i * m + i] = 1.0);
        let rhs: Vec<f64> = y.iter().map(|v| v.abs()).chain([budget]).collect();
        Self { a, sigma, cost, rhs: rhs.clone(), f, s, basis, in_basis, binv, xb: rhs }
    }

    fn m(&self) -> usize {
        self.s + 1
    }

    fn nvar(&self) -> usize {
        2 * self.f + 2 * self.s + 1
    }

    /// Dense column `j` of the constraint matrix.
    fn column(&self, j: usize) -> Vec<f64> {
        let (f, s) = (self.f, self.s);
        let mut col = vec![0.0; self.m()];
        if j < 2 * f {
            let (k, sg) = if j < f { (j, 1.0) } else { (j - f, -1.0) };
            for i in 0..s {
                col[i] = sg * self.a[(i, k)];
            }
            col[s] = 1.0;
        } else if j < 2 * f + s {
            col[j - 2 * f] = self.sigma[j - 2 * f];
        } else if j < 2 * f + 2 * s {
            let i = j - 2 * f - s;
            col[i] = -self.sigma[i];
        } else {
            col[s] = 1.0;
        }
        col
    }

    fn weight(&self, k: usize) -> f64 {
        let mut v = 0.0;
        for (row, &b) in self.basis.iter().enumerate() {
            if b == k {
                v += self.xb[row];
            } else if b == self.f + k {
                v -= self.xb[row];
            }
        }
        v
    }

    /// Recomputes the inverse and basic values from the current basis.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m();
        let mut b = vec![0.0; m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            for (i, v) in self.column(j).into_iter().enumerate() {
                b[i * m + k] = v;
            }
        }
        self.binv = invert(b, m)?;
        self.xb = (0..m).map(|i| dot(&self.binv[i * m..(i + 1) * m], &self.rhs)).collect();
        for v in &mut self.xb {
            if *v < 0.0 {
                if *v < -1e-7 {
                    return Err(Error::Numerical(format!("basic value {v} is infeasible after refactorization")));
                }
                *v = 0.0;
            }
        }
        Ok(())
    }

    /// Reduced costs of every variable (basic ones come out near zero).
    fn reduced_costs(&self, d: &mut [f64]) {
        let (m, f, s) = (self.m(), self.f, self.s);
        let mut yv = vec![0.0; m];
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = self.cost[b];
            if cb != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                yv.iter_mut().zip(row).for_each(|(y, r)| *y += cb * r);
            }
        }
        let mut u = vec![0.0; f];
        for i in 0..s {
            if yv[i] != 0.0 {
                let yi = yv[i];
                u.iter_mut().zip(self.a.row(i)).for_each(|(u, a)| *u += yi * a);
            }
        }
        let ys = yv[s];
        for k in 0..f {
            d[k] = -(u[k] + ys);
            d[f + k] = u[k] - ys;
        }
        for i in 0..s {
            let t = self.sigma[i] * yv[i];
            d[2 * f + i] = self.cost[2 * f + i] - t;
            d[2 * f + s + i] = self.cost[2 * f + s + i] + t;
        }
        d[2 * f + 2 * s] = -ys;
    }

    fn entering(&self, d: &[f64], bland: bool) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (j, &dj) in d.iter().enumerate() {
            if self.in_basis[j] || dj >= -COST_TOL {
                continue;
            }
            if bland {
                return Some(j);
            }
            if best.is_none_or(|b| dj < d[b]) {
                best = Some(j);
            }
        }
        best
    }

    fn run(&mut self, rule: PivotRule, stats: &mut SolverStats) -> Result<()> {
        let m = self.m();
        let nvar = self.nvar();
        let cap = 100 * (m + nvar) + 10_000;
        let mut d = vec![0.0; nvar];
        let mut bland = rule == PivotRule::Bland;
        let mut degenerate_run = 0usize;
        let mut since_refactor = 0usize;
        loop {
            if stats.iterations >= cap {
                return Err(Error::Numerical(format!("simplex exceeded {cap} iterations")));
            }
            stats.iterations += 1;
            if since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
                stats.refactorizations += 1;
                since_refactor = 0;
            }
            self.reduced_costs(&mut d);
            let Some(j) = self.entering(&d, bland) else {
                if since_refactor == 0 {
                    return Ok(());
                }
                // Confirm optimality on a fresh factorization.
                self.refactor()?;
                stats.refactorizations += 1;
                since_refactor = 0;
                continue;
            };
            let aj = self.column(j);
            let col: Vec<f64> = (0..m).map(|i| dot(&self.binv[i * m..(i + 1) * m], &aj)).collect();
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                if col[i] <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.xb[i] / col[i];
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * best.abs().max(1.0);
                        if (tie && self.basis[i] < self.basis[r]) || (!tie && ratio < best) {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
            let Some((r, theta)) = leave else {
                return Err(Error::Numerical("simplex found an unbounded direction".into()));
            };
            let theta = theta.max(0.0);
            for i in 0..m {
                self.xb[i] = (self.xb[i] - theta * col[i]).max(0.0);
            }
            self.xb[r] = theta;
            let piv = col[r];
            let (head, tail) = self.binv.split_at_mut(r * m);
            let (prow, tail) = tail.split_at_mut(m);
            prow.iter_mut().for_each(|v| *v /= piv);
            for (i, row) in head
                .chunks_exact_mut(m)
                .enumerate()
                .chain(tail.chunks_exact_mut(m).enumerate().map(|(k, row)| (k + r + 1, row)))
            {
                let factor = col[i];
                if factor != 0.0 {
                    row.iter_mut().zip(prow.iter()).for_each(|(v, p)| *v -= factor * p);
                }
            }
            self.in_basis[self.basis[r]] = false;
            self.in_basis[j] = true;
            self.basis[r] = j;
            stats.pivots += 1;
            since_refactor += 1;
            if bland {
                stats.bland_pivots += 1;
            }
            if theta <= 1e-12 {
                stats.degenerate_pivots += 1;
                degenerate_run += 1;
                if degenerate_run >= DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = rule == PivotRule::Bland;
            }
        }
    }
}

/// Gauss-Jordan inverse with partial pivoting of a row-major `m × m` matrix.
fn invert(mut a: Vec<f64>, m: usize) -> Result<Vec<f64>> {
    let mut inv = vec![0.0; m * m];
    (0..m).for_each(|i| inv[i * m + i] = 1.0);
    for col in 0..m {
        let piv =
            (col..m).max_by(|&x, &y| a[x * m + col].abs().total_cmp(&a[y * m + col].abs())).expect("nonempty range");
        if a[piv * m + col].abs() < 1e-13 {
            return Err(Error::Numerical("simplex basis became singular".into()));
        }
        if piv != col {
            for k in 0..m {
                a.swap(piv * m + k, col * m + k);
                inv.swap(piv * m + k, col * m + k);
            }
        }
        let p = a[col * m + col];
        for k in 0..m {
            a[col * m + k] /= p;
            inv[col * m + k] /= p;
        }
        for i in 0..m {
            if i == col {
                continue;
            }
            let factor = a[i * m + col];
            if factor != 0.0 {
                for k in 0..m {
                    a[i * m + k] -= factor * a[col * m + k];
                    inv[i * m + k] -= factor * inv[col * m + k];
                }
            }
        }
    }
    Ok(inv)
}
