//! Gap-separated eigenvalue blocks, useful-basis conditioning, and the
//! closed-form representation bounds.

use super::eigen::Spectrum;
use crate::error::{input, Error, Result};
use crate::linalg::{dot, symmetric_eigen, Matrix};
use std::ops::Range;

/// Blocks `S_j` of consecutive eigenvalue indices separated by gaps.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockStructure {
    /// `i_1 < ... < i_k`: block `j` ends after the `i_j`-th eigenvalue (1-based count).
    pub cuts: Vec<usize>,
    /// Zero-based index ranges of the blocks.
    pub blocks: Vec<Range<usize>>,
    pub gamma: f64,
    pub max_block: usize,
    pub c: f64,
    /// Largest eigenvalue ratio over the kept cuts.
    pub achieved_gamma: f64,
    /// Largest block size.
    pub achieved_max_block: usize,
    /// Smallest `c'` with `λ_{i_k} >= γ^{c'}`.
    pub achieved_c: f64,
    /// Indices of blocks larger than `max_block`.
    pub oversized: Vec<usize>,
}

impl BlockStructure {
    pub fn k(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_discrete(&self) -> bool {
        !self.blocks.is_empty() && self.oversized.is_empty()
    }

    /// Re-checks the three defining clauses against `spec`.
    pub fn satisfies_definition(&self, spec: &Spectrum) -> bool {
        let lam = spec.eigenvalues();
        let ratios_ok = self.cuts.iter().all(|&i| cut_ratio(lam, i) <= self.gamma);
        let sizes_ok = self.blocks.iter().all(|b| b.len() <= self.max_block);
        let tail_ok = self.cuts.last().is_none_or(|&i| lam[i - 1] >= self.gamma.powf(self.c));
        ratios_ok && sizes_ok && tail_ok
    }
}

/// `λ_{i+1} / λ_i` with `λ_{len+1} = 0` and nonpositive numerators read as 0.
fn cut_ratio(lam: &[f64], i: usize) -> f64 {
    let next = if i < lam.len() { lam[i].max(0.0) } else { 0.0 };
    next / lam[i - 1]
}

pub fn detect_blocks(spec: &Spectrum, gamma: f64, max_block: usize, c: f64) -> Result<BlockStructure> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return input(format!("gap ratio {gamma} outside (0, 1)"));
    }
    if !(c >= 0.0) {
        return input(format!("tail exponent {c} must be nonnegative"));
    }
    let lam = spec.eigenvalues();
    let floor = gamma.powf(c);
    let mut cuts = Vec::new();
    for i in 1..=lam.len() {
        if lam[i - 1] <= 0.0 || lam[i - 1] < floor {
            break;
        }
        if cut_ratio(lam, i) <= gamma {
            cuts.push(i);
        }
    }
    let mut blocks = Vec::with_capacity(cuts.len());
    let mut start = 0;
    for &i in &cuts {
        blocks.push(start..i);
        start = i;
    }
    let achieved_gamma = cuts.iter().map(|&i| cut_ratio(lam, i)).fold(0.0, f64::max);
    let achieved_max_block = blocks.iter().map(|b| b.len()).max().unwrap_or(0);
    let achieved_c = cuts.last().map_or(0.0, |&i| (lam[i - 1].ln() / gamma.ln()).max(0.0));
    let oversized = blocks.iter().enumerate().filter(|(_, b)| b.len() > max_block).map(|(j, _)| j).collect();
    Ok(BlockStructure { cuts, blocks, gamma, max_block, c, achieved_gamma, achieved_max_block, achieved_c, oversized })
}

/// Exhaustive selection is used when the number of subsets is at most this.
pub const EXHAUSTIVE_SUBSETS: f64 = 1e5;

#[derive(Clone, Debug, PartialEq)]
pub struct BlockBasis {
    pub block: usize,
    pub indices: Range<usize>,
    /// Chosen basis indices `m`, one per eigenvector of the block.
    pub chosen: Vec<usize>,
    /// `a[(r, s)] = <g_{chosen[r]}, ν_{indices.start + s}>`.
    pub a: Matrix,
    pub sigma_min: f64,
    pub exhaustive: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UsefulBasisReport {
    pub blocks: Vec<BlockBasis>,
    /// `max_j 1 / sigma_min(A_j)`; infinite when some block is singular.
    pub alpha: f64,
}

/// Smallest singular value of `a` from the eigenvalues of its Gram matrix.
pub fn smallest_singular_value(a: &Matrix) -> Result<f64> {
    let g = if a.rows() >= a.cols() { a.gram() } else { a.transpose().gram() };
    let (vals, _) = symmetric_eigen(g, false)?;
    Ok(vals.last().map_or(0.0, |&v| v.max(0.0).sqrt()))
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `g` is the basis tabulated on the support: `g[m][x]`.
pub fn useful_basis_alpha(g: &[Vec<f64>], spec: &Spectrum, blocks: &BlockStructure) -> Result<UsefulBasisReport> {
    for (m, gm) in g.iter().enumerate() {
        if gm.len() != spec.len() {
            return input(format!("basis function {m} is not tabulated on the support"));
        }
        if gm.iter().any(|v| !(v.abs() <= 1.0 + 1e-12)) {
            return input(format!("basis function {m} exceeds 1 in absolute value"));
        }
    }
    let weighted: Vec<Vec<f64>> = g.iter().map(|gm| gm.iter().zip(spec.pi()).map(|(a, p)| a * p).collect()).collect();
    let mut out = Vec::with_capacity(blocks.blocks.len());
    for (j, range) in blocks.blocks.iter().enumerate() {
        let size = range.len();
        if g.len() < size {
            return input(format!("block {j} has {size} eigenvectors but the basis has only {} functions", g.len()));
        }
        let full = Matrix::from_rows(
            &weighted
                .iter()
                .map(|w| range.clone().map(|l| dot(w, spec.eigenvector(l))).collect())
                .collect::<Vec<Vec<f64>>>(),
        );
        let exhaustive = binomial(g.len(), size) <= EXHAUSTIVE_SUBSETS;
        let chosen = if exhaustive { select_exhaustive(&full, size)? } else { select_greedy(&full, size)? };
        let a = submatrix(&full, &chosen);
        let sigma_min = smallest_singular_value(&a)?;
        out.push(BlockBasis { block: j, indices: range.clone(), chosen, a, sigma_min, exhaustive });
    }
    let alpha =
        out.iter().map(|b| if b.sigma_min > 0.0 { 1.0 / b.sigma_min } else { f64::INFINITY }).fold(0.0, f64::max);
    Ok(UsefulBasisReport { blocks: out, alpha })
}

fn submatrix(full: &Matrix, rows: &[usize]) -> Matrix {
    Matrix::from_rows(&rows.iter().map(|&r| full.row(r).to_vec()).collect::<Vec<_>>())
}

fn select_exhaustive(full: &Matrix, size: usize) -> Result<Vec<usize>> {
    let total = full.rows();
    let mut comb: Vec<usize> = (0..size).collect();
    let mut best = (f64::NEG_INFINITY, comb.clone());
    loop {
        let s = smallest_singular_value(&submatrix(full, &comb))?;
        if s > best.0 {
            best = (s, comb.clone());
        }
        // Advance to the next combination in lexicographic order.
        let mut i = size;
        loop {
            if i == 0 {
                return Ok(best.1);
            }
            i -= 1;
            if comb[i] < total - size + i {
                break;
            }
        }
        comb[i] += 1;
        for k in i + 1..size {
            comb[k] = comb[k - 1] + 1;
        }
    }
}

fn select_greedy(full: &Matrix, size: usize) -> Result<Vec<usize>> {
    let mut chosen: Vec<usize> = Vec::with_capacity(size);
    for _ in 0..size {
        let mut best: Option<(f64, usize)> = None;
        for m in 0..full.rows() {
            if chosen.contains(&m) {
                continue;
            }
            chosen.push(m);
            let s = smallest_singular_value(&submatrix(full, &chosen))?;
            chosen.pop();
            if best.is_none_or(|(b, _)| s > b) {
                best = Some((s, m));
            }
        }
        let (_, m) = best.ok_or_else(|| Error::Input("basis exhausted during selection".into()))?;
        chosen.push(m);
    }
    Ok(chosen)
}

/// Order-of-magnitude instantiation of the representation bounds with unit constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Theorem1Bounds {
    /// `B = (2 α N k)^{(1+c)^{k+1}} ε^{-(1+c)^k}`; may be infinite.
    pub b: f64,
    pub ln_b: f64,
    /// `k (1+c)^{k-1} (ln N + ln k + ln α + ln(1/ε)) / ln(1/γ)`, before rounding.
    pub tau_max_real: f64,
    /// `ceil(max(tau_max_real, 0))`, saturating.
    pub tau_max: usize,
}

pub fn theorem1_bounds(
    n_block: usize,
    k: usize,
    gamma: f64,
    c: f64,
    alpha: f64,
    epsilon: f64,
) -> Result<Theorem1Bounds> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return input(format!("gap ratio {gamma} outside (0, 1)"));
    }
    if !(epsilon > 0.0) {
        return input(format!("accuracy {epsilon} must be positive"));
    }
    if k == 0 || n_block == 0 || !(alpha > 0.0) || !(c >= 0.0) {
        return input("theorem bounds need k >= 1, N >= 1, alpha > 0 and c >= 0");
    }
    let (nf, kf) = (n_block as f64, k as f64);
    let grow = 1.0 + c;
    let ln_b = grow.powf(kf + 1.0) * (2.0 * alpha * nf * kf).ln() + grow.powf(kf) * (1.0 / epsilon).ln();
    let tau_max_real =
        kf * grow.powf(kf - 1.0) * (nf.ln() + kf.ln() + alpha.ln() + (1.0 / epsilon).ln()) / (1.0 / gamma).ln();
    let tau_max = if tau_max_real.is_finite() {
        tau_max_real.max(0.0).ceil().min(usize::MAX as f64) as usize
    } else {
        usize::MAX
    };
    Ok(Theorem1Bounds { b: ln_b.exp(), ln_b, tau_max_real, tau_max })
}
