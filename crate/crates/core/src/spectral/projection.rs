//! Eigenvalues and projections `<f, ν_ℓ>_π` without forming eigenvectors.
//!
//! For zero-field Ising models the global flip `x -> -x` commutes with `P`,
//! so the chain splits into flip-even and flip-odd blocks over the states
//! whose first spin is `-1`. Each block is solved separately at half the
//! dimension; even parts of `f` project on even eigenvectors and odd parts
//! on odd ones.

use super::eigen::{DENSE_STATE_CAP, NEGATIVE_CLAMP, REVERSIBILITY_TOL};
use super::transition::TransitionMatrix;
use crate::error::{Error, Result};
use crate::linalg::{descending_order, tridiagonal_ql, tridiagonalize, Matrix};
use crate::model::MrfModel;

/// Eigenvalues (descending) and per-function coefficients in the same order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralProjection {
    pub eigenvalues: Vec<f64>,
    /// `coefficients[f][l] = <f, ν_l>_π`, up to the sign of `ν_l`.
    pub coefficients: Vec<Vec<f64>>,
    /// True when the flip-symmetry split was used.
    pub reduced: bool,
}

impl SpectralProjection {
    /// `Σ_{l >= m} coefficients[f][l]^2`.
    pub fn tail_mass(&self, f: usize, m: usize) -> f64 {
        self.coefficients[f].iter().skip(m).map(|c| c * c).sum()
    }
}

pub fn spectral_projection(
    model: &MrfModel,
    p: &TransitionMatrix,
    pi: &[f64],
    functions: &[Vec<f64>],
) -> Result<SpectralProjection> {
    let n = p.len();
    if pi.len() != n || functions.iter().any(|f| f.len() != n) {
        return Err(Error::Input("functions must be tabulated on the support".into()));
    }
    if p.detailed_balance_violation(pi) > REVERSIBILITY_TOL {
        return Err(Error::Numerical("detailed balance violated".into()));
    }
    let symmetric = matches!(model, MrfModel::Ising(m) if m.is_flip_symmetric()) && n >= 2;
    let mut parts: Vec<(f64, usize, usize, Vec<f64>)> = Vec::with_capacity(n);
    if symmetric {
        let half = n / 2;
        if half > DENSE_STATE_CAP {
            return Err(Error::SizeCap(format!("{half}-state blocks exceed the dense cap")));
        }
        let mask = (n - 1) as u64;
        for (tag, sign) in [(0usize, 1.0f64), (1, -1.0)] {
            let mut m = Matrix::zeros(half, half);
            for a in 0..half {
                for (b, v) in p.row(a) {
                    if b < half {
                        m[(a, b)] += v;
                    } else {
                        m[(a, (b as u64 ^ mask) as usize)] += sign * v;
                    }
                }
            }
            let weights: Vec<f64> = pi[..half].iter().map(|v| 2.0 * v).collect();
            let payload = Matrix::from_rows(
                &(0..half)
                    .map(|a| {
                        let partner = (a as u64 ^ mask) as usize;
                        let w = weights[a].sqrt();
                        functions.iter().map(|f| w * 0.5 * (f[a] + sign * f[partner])).collect()
                    })
                    .collect::<Vec<Vec<f64>>>(),
            );
            for (l, value, coeffs) in solve_block(m, &weights, payload, functions.len())? {
                parts.push((value, tag, l, coeffs));
            }
        }
    } else {
        if n > DENSE_STATE_CAP {
            return Err(Error::SizeCap(format!("{n} states exceed the dense cap")));
        }
        let payload = Matrix::from_rows(
            &(0..n).map(|a| functions.iter().map(|f| pi[a].sqrt() * f[a]).collect()).collect::<Vec<Vec<f64>>>(),
        );
        for (l, value, coeffs) in solve_block(p.to_dense(), pi, payload, functions.len())? {
            parts.push((value, 0, l, coeffs));
        }
    }
    parts.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let eigenvalues = parts.iter().map(|&(v, ..)| if v < 0.0 && v > NEGATIVE_CLAMP { 0.0 } else { v }).collect();
    let coefficients = (0..functions.len()).map(|f| parts.iter().map(|(.., c)| c[f]).collect()).collect();
    Ok(SpectralProjection { eigenvalues, coefficients, reduced: symmetric })
}

/// Symmetrizes the reversible block `m` with weights `w`, then returns
/// `(solver index, eigenvalue, payload row)` sorted by descending eigenvalue.
fn solve_block(m: Matrix, w: &[f64], mut payload: Matrix, width: usize) -> Result<Vec<(usize, f64, Vec<f64>)>> {
    let n = m.rows();
    let root: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let mut s = Matrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let v = m[(a, b)];
            if v != 0.0 {
                let x = 0.5 * root[a] * v / root[b];
                s[(a, b)] += x;
                s[(b, a)] += x;
            }
        }
    }
    let tri = tridiagonalize(s);
    tri.apply_qt(&mut payload);
    let (mut d, mut e) = (tri.d.clone(), tri.e.clone());
    tridiagonal_ql(&mut d, &mut e, Some(&mut payload))?;
    Ok(descending_order(&d).into_iter().map(|i| (i, d[i], payload.row(i)[..width].to_vec())).collect())
}
