//! Squared error of approximating majority by low-degree polynomials and by
//! top eigenvectors of the chain, both measured under `π`.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::{fmt_float, GraphKind};
use crate::basis::graded_subsets;
use crate::error::{input, Result};
use crate::linalg::{cholesky, cholesky_solve, Matrix};
use crate::model::{IsingModel, MrfModel};
use crate::spectral::blocks::binomial;
use crate::spectral::{spectral_projection, ExactChain, SupportIndex};

/// Diagonal damping of the polynomial normal equations.
pub const POLY_DAMPING: f64 = 1e-10;

/// How many top eigenvectors the eigen approximation keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EigenPolicy {
    /// `M = Σ_{j≤k} C(n, j)`, the dimension of the degree-`k` polynomials.
    #[default]
    DimensionMatched,
    /// `M = n^k`, capped at the number of states.
    Literal,
}

impl EigenPolicy {
    pub fn name(self) -> &'static str {
        match self {
            EigenPolicy::DimensionMatched => "dimension-matched",
            EigenPolicy::Literal => "literal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dimension-matched" => Some(EigenPolicy::DimensionMatched),
            "literal" => Some(EigenPolicy::Literal),
            _ => None,
        }
    }
}

pub fn eigenvector_count(policy: EigenPolicy, n: usize, k: usize, states: usize) -> usize {
    let m = match policy {
        EigenPolicy::DimensionMatched => (0..=k.min(n)).map(|j| binomial(n, j)).sum::<f64>(),
        EigenPolicy::Literal => (n as f64).powi(k as i32),
    };
    (m.min(states as f64)) as usize
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproximationRow {
    pub graph: String,
    pub beta: f64,
    pub degree: usize,
    pub poly_err: f64,
    pub eigen_err: f64,
    /// Number of eigenvectors kept.
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct MajorityTable {
    pub rows: Vec<ApproximationRow>,
}

impl MajorityTable {
    /// `graph,beta,degree,poly_err,eigen_err,M`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("graph,beta,degree,poly_err,eigen_err,M\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                r.graph,
                fmt_float(r.beta),
                r.degree,
                fmt_float(r.poly_err),
                fmt_float(r.eigen_err),
                r.m
            );
        }
        s
    }
}

/// `sign(Σ x_i)` with `sign(0) = +1`.
pub fn majority(x: &[i8]) -> f64 {
    if x.iter().map(|&v| i32::from(v)).sum::<i32>() >= 0 {
        1.0
    } else {
        -1.0
    }
}

/// `min_p E_π[(f − p)²]` over polynomials of degree at most `k` in the spins.
pub fn poly_fit_error(support: &SupportIndex, pi: &[f64], f: &[f64], k: usize) -> Result<f64> {
    if support.len() != pi.len() || f.len() != pi.len() {
        return input("f and π must be tabulated on the support");
    }
    let n = support.n();
    let monomials = graded_subsets(n, 0, k);
    let cols = monomials.len();
    let mut x = vec![0i8; n];
    let mut design = Matrix::zeros(support.len(), cols);
    for a in 0..support.len() {
        support.decode_into(a, &mut x);
        let w = pi[a].sqrt();
        let row = design.row_mut(a);
        for (c, s) in monomials.iter().enumerate() {
            row[c] = w * s.iter().map(|&i| f64::from(x[i])).product::<f64>();
        }
    }
    let mut gram = design.gram();
    for i in 0..cols {
        gram[(i, i)] += POLY_DAMPING;
    }
    let rhs: Vec<f64> =
        (0..cols).map(|c| (0..support.len()).map(|a| design[(a, c)] * pi[a].sqrt() * f[a]).sum()).collect();
    let coef = cholesky_solve(&cholesky(&gram)?, &rhs);
    // Residual straight from the fitted values, not from the normal equations.
    Ok((0..support.len())
        .map(|a| {
            let fit: f64 = design.row(a).iter().zip(&coef).map(|(d, c)| d * c).sum();
            let r = pi[a].sqrt() * f[a] - fit;
            r * r
        })
        .sum())
}

/// One row per `(β, k)` for the zero-field Ising model on `graph`; cells run in parallel.
pub fn majority_table(
    graph: &GraphKind,
    betas: &[f64],
    degrees: &[usize],
    policy: EigenPolicy,
    cap: usize,
) -> Result<Vec<ApproximationRow>> {
    let g = graph.build()?;
    let label = graph.label();
    let cells: Vec<Result<Vec<ApproximationRow>>> = betas
        .par_iter()
        .map(|&beta| {
            let model = MrfModel::Ising(IsingModel::uniform(g.clone(), beta, 0.0)?);
            let chain = ExactChain::new(&model, cap)?;
            let f = chain.tabulate(majority);
            let proj = spectral_projection(&model, &chain.p, &chain.pi, std::slice::from_ref(&f))?;
            degrees
                .iter()
                .map(|&k| {
                    let m = eigenvector_count(policy, g.n(), k, chain.p.len());
                    Ok(ApproximationRow {
                        graph: label.clone(),
                        beta,
                        degree: k,
                        poly_err: poly_fit_error(chain.support(), &chain.pi, &f, k)?,
                        eigen_err: proj.tail_mass(0, m),
                        m,
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for c in cells {
        rows.extend(c?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvector_counts() {
        assert_eq!(eigenvector_count(EigenPolicy::DimensionMatched, 11, 2, 2048), 67);
        assert_eq!(eigenvector_count(EigenPolicy::DimensionMatched, 11, 4, 2048), 562);
        assert_eq!(eigenvector_count(EigenPolicy::Literal, 11, 2, 2048), 121);
        assert_eq!(eigenvector_count(EigenPolicy::Literal, 11, 4, 2048), 2048);
    }

    #[test]
    fn zero_coupling_rows_agree() {
        let rows =
            majority_table(&GraphKind::Cycle(5), &[0.0], &[1, 2], EigenPolicy::DimensionMatched, 1 << 10).unwrap();
        for r in rows {
            assert!((r.poly_err - r.eigen_err).abs() < 1e-8, "{r:?}");
        }
    }
}
