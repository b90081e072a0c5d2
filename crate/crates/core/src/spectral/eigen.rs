use super::transition::TransitionMatrix;
use crate::error::{Error, Result};
use crate::linalg::{dot, symmetric_eigen, Matrix};

/// Largest support handled by the dense eigensolver.
pub const DENSE_STATE_CAP: usize = 4096;

/// Detailed-balance tolerance below which a matrix is accepted as reversible.
pub const REVERSIBILITY_TOL: f64 = 1e-8;

/// Eigenvalues at or above this negative value are clamped to zero.
pub const NEGATIVE_CLAMP: f64 = -1e-10;

/// Eigenvalues in descending order with π-orthonormal right eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pi: Vec<f64>,
    eigenvalues: Vec<f64>,
    /// Row `l` is `ν_l` evaluated on the support.
    vectors: Matrix,
}

impl Spectrum {
    pub fn from_parts(pi: Vec<f64>, eigenvalues: Vec<f64>, vectors: Matrix) -> Result<Self> {
        let n = pi.len();
        if eigenvalues.len() != n || vectors.rows() != n || vectors.cols() != n {
            return Err(Error::Input(format!(
                "spectrum parts disagree: {} states, {} eigenvalues, {}x{} vectors",
                n,
                eigenvalues.len(),
                vectors.rows(),
                vectors.cols()
            )));
        }
        Ok(Self { pi, eigenvalues, vectors })
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, l: usize) -> &[f64] {
        self.vectors.row(l)
    }

    pub fn vectors(&self) -> &Matrix {
        &self.vectors
    }

    pub fn coefficients(&self, f: &[f64]) -> Vec<f64> {
        fourier_coefficients(f, self)
    }
}

pub fn inner_product_pi(f: &[f64], g: &[f64], pi: &[f64]) -> f64 {
    assert!(f.len() == pi.len() && g.len() == pi.len(), "functions must live on the support");
    f.iter().zip(g).zip(pi).map(|((a, b), p)| p * a * b).sum()
}

/// `f̂_l = <f, ν_l>_π` for every `l`.
pub fn fourier_coefficients(f: &[f64], spec: &Spectrum) -> Vec<f64> {
    assert_eq!(f.len(), spec.len(), "function must live on the support");
    let w: Vec<f64> = f.iter().zip(&spec.pi).map(|(a, p)| a * p).collect();
    (0..spec.len()).map(|l| dot(spec.vectors.row(l), &w)).collect()
}

/// Exact spectrum of a reversible chain via `S = D^{1/2} P D^{-1/2}`.
pub fn eigendecompose(p: &TransitionMatrix, pi: &[f64]) -> Result<Spectrum> {
    let n = p.len();
    if pi.len() != n {
        return Err(Error::Input(format!("{} stationary weights for {n} states", pi.len())));
    }
    if n > DENSE_STATE_CAP {
        return Err(Error::SizeCap(format!("{n} states exceed the dense eigensolver cap of {DENSE_STATE_CAP}")));
    }
    if let Some(a) = pi.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Numerical(format!("stationary mass of state {a} is not positive")));
    }
    let violation = p.detailed_balance_violation(pi);
    if violation > REVERSIBILITY_TOL {
        return Err(Error::Numerical(format!(
            "detailed balance violated (relative {violation:e} > {REVERSIBILITY_TOL:e})"
        )));
    }
    let root: Vec<f64> = pi.iter().map(|v| v.sqrt()).collect();
    let mut s = Matrix::zeros(n, n);
    for a in 0..n {
        for (b, v) in p.row(a) {
            let w = 0.5 * root[a] * v / root[b];
            s[(a, b)] += w;
            s[(b, a)] += w;
        }
    }
    let (mut values, vectors) = symmetric_eigen(s, true)?;
    let mut vectors = vectors.expect("vectors requested");
    for l in 0..n {
        let row = vectors.row_mut(l);
        for (v, r) in row.iter_mut().zip(&root) {
            *v /= r;
        }
        let norm = inner_product_pi(row, row, pi).sqrt();
        row.iter_mut().for_each(|v| *v /= norm);
        fix_sign(row);
    }
    for v in &mut values {
        if *v < 0.0 && *v > NEGATIVE_CLAMP {
            *v = 0.0;
        }
    }
    Ok(Spectrum { pi: pi.to_vec(), eigenvalues: values, vectors })
}

/// Makes the largest-magnitude coordinate positive. Near-ties resolve to the
/// lowest index so the choice does not hinge on rounding noise.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let top = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(k) = v.iter().position(|x| x.abs() >= top * (1.0 - 1e-9)) {
        if v[k] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::model::{IsingModel, MrfModel};
    use crate::spectral::transition::{exact_transition_matrix, stationary_exact};

    fn cycle_spectrum(n: usize, beta: f64) -> (TransitionMatrix, Spectrum) {
        let m = MrfModel::Ising(IsingModel::uniform(Graph::cycle(n).unwrap(), beta, 0.0).unwrap());
        let p = exact_transition_matrix(&m).unwrap();
        let pi = stationary_exact(&m, p.support()).unwrap();
        let s = eigendecompose(&p, &pi).unwrap();
        (p, s)
    }

    #[test]
    fn top_pair_is_constant() {
        let (_, s) = cycle_spectrum(6, 0.3);
        assert!((s.eigenvalues()[0] - 1.0).abs() < 1e-12);
        assert!(s.eigenvector(0).iter().all(|&v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn eigen_relation_and_orthonormality() {
        let (p, s) = cycle_spectrum(6, 0.4);
        for l in 0..s.len() {
            let v = s.eigenvector(l);
            let pv = p.apply(v);
            for (a, b) in pv.iter().zip(v) {
                assert!((a - s.eigenvalues()[l] * b).abs() < 1e-10);
            }
            for k in 0..s.len() {
                let ip = inner_product_pi(v, s.eigenvector(k), s.pi());
                assert!((ip - if k == l { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
        }
        assert!(s.eigenvalues().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn coefficients_of_eigenvector() {
        let (_, s) = cycle_spectrum(5, 0.2);
        let c = s.coefficients(s.eigenvector(4));
        for (l, v) in c.iter().enumerate() {
            assert!((v - if l == 4 { 1.0 } else { 0.0 }).abs() < 1e-10);
        }
    }

    #[test]
    fn sign_rule() {
        let mut v = vec![0.1, -0.9, 0.5];
        fix_sign(&mut v);
        assert_eq!(v, vec![-0.1, 0.9, -0.5]);
    }
}
