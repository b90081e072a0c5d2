//! Exact linear algebra at desk scale: support enumeration, transition
//! matrices, stationary laws, π-orthonormal spectra, block structure,
//! basis conditioning and eigenvector reconstruction.

pub mod blocks;
pub mod eigen;
pub mod persist;
pub mod projection;
pub mod reconstruct;
pub mod support;
pub mod transition;

pub use blocks::{
    binomial, detect_blocks, smallest_singular_value, theorem1_bounds, useful_basis_alpha, BlockBasis, BlockStructure,
    Theorem1Bounds, UsefulBasisReport,
};
pub use eigen::{eigendecompose, fourier_coefficients, inner_product_pi, Spectrum, DENSE_STATE_CAP};
pub use projection::{spectral_projection, SpectralProjection};
pub use reconstruct::{reconstruct_eigenvector, EigenDictionary, EigenReconstruction};
pub use support::{decode, encode, enumerate_support, SupportIndex, DEFAULT_STATE_CAP};
pub use transition::{
    exact_pt_g, exact_transition_matrix, mixing_time, stationary_exact, total_variation, TransitionMatrix,
};

use crate::error::Result;
use crate::model::MrfModel;

/// Support, transition matrix and stationary law of an enumerable model.
#[derive(Clone, Debug)]
pub struct ExactChain {
    pub p: TransitionMatrix,
    pub pi: Vec<f64>,
}

impl ExactChain {
    pub fn new(model: &MrfModel, cap: usize) -> Result<Self> {
        let support = enumerate_support(model, cap)?;
        let p = TransitionMatrix::build(model, support)?;
        let pi = stationary_exact(model, p.support())?;
        Ok(Self { p, pi })
    }

    pub fn support(&self) -> &SupportIndex {
        self.p.support()
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        eigendecompose(&self.p, &self.pi)
    }

    /// `f` evaluated on every support state.
    pub fn tabulate<F: Fn(&[i8]) -> f64>(&self, f: F) -> Vec<f64> {
        let s = self.support();
        let mut x = vec![0i8; s.n()];
        (0..s.len())
            .map(|a| {
                s.decode_into(a, &mut x);
                f(&x)
            })
            .collect()
    }
}
