//! Least-squares representation of eigenvectors by `{P^t g_m}`.
//!
//! With `A = Π^{1/2} D` the damped problem
//! `min ‖Π^{1/2}(ν - Dβ)‖² + λ‖β‖²` is solved from `(AᵀA + λI) β = Aᵀ b`
//! when the dictionary has no more columns than states, and from the
//! identical push-through form `β = Aᵀ (AAᵀ + λI)^{-1} b` otherwise.

use super::eigen::{inner_product_pi, Spectrum};
use super::transition::TransitionMatrix;
use crate::error::{input, size_cap, Result};
use crate::linalg::{cholesky, cholesky_solve, dot, Matrix};

pub const LSQ_DAMPING: f64 = 1e-10;

/// Largest dictionary, counted in stored entries.
pub const DICTIONARY_CAP: usize = 40_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenReconstruction {
    pub ell: usize,
    pub tau_max: usize,
    /// `beta[t * |G| + m]`.
    pub beta: Vec<f64>,
    /// `‖ν_ℓ - Σ β_{t,m} P^t g_m‖_π`.
    pub residual: f64,
    pub coefficient_mass: f64,
}

/// The dictionary `{P^t g_m : t <= tau_max}` with a factored normal system.
pub struct EigenDictionary {
    tau_max: usize,
    pi: Vec<f64>,
    /// `d[x][t * |G| + m] = (P^t g_m)(x)`.
    d: Matrix,
    factor: Matrix,
    dual: bool,
}

impl EigenDictionary {
    pub fn new(p: &TransitionMatrix, pi: &[f64], g: &[Vec<f64>], tau_max: usize) -> Result<Self> {
        let n = p.len();
        if pi.len() != n || g.iter().any(|gm| gm.len() != n) {
            return input("basis and stationary weights must be tabulated on the support");
        }
        let k = (tau_max + 1) * g.len();
        if k.saturating_mul(n) > DICTIONARY_CAP {
            return size_cap(format!("dictionary of {k} columns over {n} states exceeds the cap"));
        }
        let mut d = Matrix::zeros(n, k);
        for (m, gm) in g.iter().enumerate() {
            let mut v = gm.clone();
            for t in 0..=tau_max {
                let col = t * g.len() + m;
                for x in 0..n {
                    d[(x, col)] = v[x];
                }
                if t < tau_max {
                    v = p.apply(&v);
                }
            }
        }
        let root: Vec<f64> = pi.iter().map(|v| v.sqrt()).collect();
        let mut a = d.clone();
        for x in 0..n {
            a.row_mut(x).iter_mut().for_each(|v| *v *= root[x]);
        }
        let dual = k > n;
        let mut normal = if dual {
            let mut s = Matrix::zeros(n, n);
            for x in 0..n {
                for y in 0..=x {
                    let v = dot(a.row(x), a.row(y));
                    s[(x, y)] = v;
                    s[(y, x)] = v;
                }
            }
            s
        } else {
            a.gram()
        };
        for i in 0..normal.rows() {
            normal[(i, i)] += LSQ_DAMPING;
        }
        let factor = cholesky(&normal)?;
        Ok(Self { tau_max, pi: pi.to_vec(), d, factor, dual })
    }

    pub fn columns(&self) -> usize {
        self.d.cols()
    }

    /// Best damped least-squares representation of `target` (a function on the support).
    pub fn fit(&self, target: &[f64]) -> Vec<f64> {
        let n = self.d.rows();
        let b: Vec<f64> = target.iter().zip(&self.pi).map(|(v, p)| v * p.sqrt()).collect();
        if self.dual {
            let z = cholesky_solve(&self.factor, &b);
            let mut beta = vec![0.0; self.d.cols()];
            for x in 0..n {
                let w = z[x] * self.pi[x].sqrt();
                if w != 0.0 {
                    crate::linalg::axpy(w, self.d.row(x), &mut beta);
                }
            }
            beta
        } else {
            let mut rhs = vec![0.0; self.d.cols()];
            for x in 0..n {
                crate::linalg::axpy(b[x] * self.pi[x].sqrt(), self.d.row(x), &mut rhs);
            }
            cholesky_solve(&self.factor, &rhs)
        }
    }

    /// `‖target - D beta‖_π`.
    pub fn residual(&self, target: &[f64], beta: &[f64]) -> f64 {
        let eta: Vec<f64> = (0..self.d.rows()).map(|x| target[x] - dot(self.d.row(x), beta)).collect();
        inner_product_pi(&eta, &eta, &self.pi).sqrt()
    }

    pub fn reconstruct(&self, spec: &Spectrum, ell: usize) -> Result<EigenReconstruction> {
        if ell >= spec.len() {
            return input(format!("eigenvector index {ell} out of range"));
        }
        let target = spec.eigenvector(ell);
        let beta = self.fit(target);
        let residual = self.residual(target, &beta);
        let coefficient_mass = beta.iter().map(|b| b.abs()).sum();
        Ok(EigenReconstruction { ell, tau_max: self.tau_max, beta, residual, coefficient_mass })
    }
}

pub fn reconstruct_eigenvector(
    spec: &Spectrum,
    p: &TransitionMatrix,
    g: &[Vec<f64>],
    ell: usize,
    tau_max: usize,
) -> Result<EigenReconstruction> {
    EigenDictionary::new(p, spec.pi(), g, tau_max)?.reconstruct(spec, ell)
}
