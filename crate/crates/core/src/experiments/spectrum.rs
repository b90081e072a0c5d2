//! Sorted chain spectra for a grid of inverse temperatures.

use std::fmt::Write as _;

use super::fmt_float;
use crate::error::Result;
use crate::graph::Graph;
use crate::model::{Dynamics, IsingModel, MrfModel};
use crate::spectral::{spectral_projection, ExactChain};

/// Inverse temperatures of the reference spectrum plot.
pub const FIGURE_BETAS: [f64; 4] = [0.0, 0.02, 0.1, 1.0];

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumTable {
    pub betas: Vec<f64>,
    /// `columns[b]` holds the eigenvalues for `betas[b]`, descending.
    pub columns: Vec<Vec<f64>>,
}

impl SpectrumTable {
    /// `rank,beta,lambda` with 1-based ranks.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("rank,beta,lambda\n");
        for (beta, col) in self.betas.iter().zip(&self.columns) {
            for (r, v) in col.iter().enumerate() {
                let _ = writeln!(s, "{},{},{}", r + 1, fmt_float(*beta), fmt_float(*v));
            }
        }
        s
    }
}

/// Eigenvalues of the zero-field Ising chain on `graph` for every `β`.
pub fn spectrum_experiment(graph: &Graph, betas: &[f64], dynamics: Dynamics, cap: usize) -> Result<SpectrumTable> {
    let mut columns = Vec::with_capacity(betas.len());
    for &beta in betas {
        let model = MrfModel::Ising(IsingModel::uniform(graph.clone(), beta, 0.0)?.with_dynamics(dynamics));
        columns.push(model_eigenvalues(&model, cap)?);
    }
    Ok(SpectrumTable { betas: betas.to_vec(), columns })
}

/// Descending eigenvalues of any enumerable model.
pub fn model_eigenvalues(model: &MrfModel, cap: usize) -> Result<Vec<f64>> {
    let chain = ExactChain::new(model, cap)?;
    Ok(spectral_projection(model, &chain.p, &chain.pi, &[])?.eigenvalues)
}
