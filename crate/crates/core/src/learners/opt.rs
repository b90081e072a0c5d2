//! Exact `opt = min_{h∈F} Pr[h(x) ≠ y]` over small enumerable classes.

use crate::basis::graded_subsets;
use crate::error::{input, Result};
use crate::model::Alphabet;

/// Points with probability weights and ±1 labels.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSample {
    pub states: Vec<Vec<i8>>,
    pub weights: Vec<f64>,
    pub labels: Vec<i8>,
}

impl WeightedSample {
    /// Equal weights `1/s`.
    pub fn uniform(states: Vec<Vec<i8>>, labels: Vec<i8>) -> Result<Self> {
        let w = 1.0 / states.len().max(1) as f64;
        let weights = vec![w; states.len()];
        Self::new(states, weights, labels)
    }

    pub fn new(states: Vec<Vec<i8>>, weights: Vec<f64>, labels: Vec<i8>) -> Result<Self> {
        if states.len() != weights.len() || states.len() != labels.len() {
            return input("states, weights and labels must have equal lengths");
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return input("weights must be finite and nonnegative");
        }
        Ok(Self { states, weights, labels })
    }

    /// Weighted disagreement of `h`.
    pub fn error<H: Fn(&[i8]) -> i8>(&self, h: H) -> f64 {
        self.states
            .iter()
            .zip(&self.weights)
            .zip(&self.labels)
            .filter(|((x, _), &y)| h(x) != y)
            .map(|((_, w), _)| w)
            .sum()
    }
}

/// `(opt, index of the first minimizer)` over an explicit class.
pub fn brute_force_opt<H: Fn(&[i8]) -> i8>(class: &[H], data: &WeightedSample) -> Result<(f64, usize)> {
    if class.is_empty() {
        return input("hypothesis class is empty");
    }
    let mut best = (f64::INFINITY, 0);
    for (k, h) in class.iter().enumerate() {
        let e = data.error(h);
        if e < best.0 {
            best = (e, k);
        }
    }
    Ok(best)
}

/// Best junta on a fixed variable set: plurality of weight per assignment (ties to `+1`).
#[derive(Clone, Debug, PartialEq)]
pub struct JuntaFit {
    pub vars: Vec<usize>,
    pub table: Vec<i8>,
    pub error: f64,
}

fn fit_on(vars: &[usize], alphabet: Alphabet, data: &WeightedSample) -> JuntaFit {
    let a = alphabet.size();
    let size = a.pow(vars.len() as u32);
    let mut plus = vec![0.0; size];
    let mut minus = vec![0.0; size];
    for ((x, &w), &y) in data.states.iter().zip(&data.weights).zip(&data.labels) {
        let code = vars.iter().fold(0, |c, &i| c * a + alphabet.ordinal(x[i]).expect("symbol"));
        if y > 0 {
            plus[code] += w;
        } else {
            minus[code] += w;
        }
    }
    let table: Vec<i8> = plus.iter().zip(&minus).map(|(p, m)| if p >= m { 1 } else { -1 }).collect();
    let error = plus.iter().zip(&minus).map(|(p, m)| p.min(*m)).sum();
    JuntaFit { vars: vars.to_vec(), table, error }
}

/// The class of all functions of at most `k` of the `n` variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JuntaClass {
    pub n: usize,
    pub k: usize,
    pub alphabet: Alphabet,
}

impl JuntaClass {
    /// Exact optimum. Every junta on fewer variables is also a junta on a superset,
    /// so only sets of size `min(k, n)` are scanned, each with its plurality table.
    pub fn opt(&self, data: &WeightedSample) -> Result<JuntaFit> {
        if data.states.iter().any(|x| x.len() != self.n) {
            return input("sample states must have the class's length");
        }
        let size = self.k.min(self.n);
        let mut best: Option<JuntaFit> = None;
        for s in graded_subsets(self.n, size, size) {
            let fit = fit_on(&s, self.alphabet, data);
            if best.as_ref().is_none_or(|b| fit.error < b.error) {
                best = Some(fit);
            }
        }
        Ok(best.expect("at least one subset"))
    }
}
