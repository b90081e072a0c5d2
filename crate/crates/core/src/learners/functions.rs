//! Boolean targets `f : X -> {-1, +1}`. `sign(0) = +1` throughout.

use crate::error::{input, Result};
use crate::model::Alphabet;
use crate::rng::RngStream;

#[derive(Clone, Debug, PartialEq)]
pub enum BooleanFunction {
    /// `sign(Σ x_i)`.
    Majority,
    /// `sign(w·x − θ)`.
    Halfspace { weights: Vec<f64>, threshold: f64 },
    /// `Π_{i∈S} x_i`.
    Parity(Vec<usize>),
    /// Table over the base-|A| code of `x` restricted to `vars`, first variable most significant.
    Junta { vars: Vec<usize>, alphabet: Alphabet, table: Vec<i8> },
}

#[inline]
fn sign(v: f64) -> i8 {
    if v >= 0.0 {
        1
    } else {
        -1
    }
}

impl BooleanFunction {
    pub fn junta(vars: Vec<usize>, alphabet: Alphabet, table: Vec<i8>) -> Result<Self> {
        if table.len() != alphabet.size().pow(vars.len() as u32) {
            return input("junta table must have one entry per assignment");
        }
        if table.iter().any(|&v| v != 1 && v != -1) {
            return input("junta table entries must be ±1");
        }
        Ok(BooleanFunction::Junta { vars, alphabet, table })
    }

    #[inline]
    pub fn eval(&self, x: &[i8]) -> i8 {
        match self {
            BooleanFunction::Majority => sign(x.iter().map(|&v| f64::from(v)).sum()),
            BooleanFunction::Halfspace { weights, threshold } => {
                sign(weights.iter().zip(x).map(|(w, &v)| w * f64::from(v)).sum::<f64>() - threshold)
            }
            BooleanFunction::Parity(s) => s.iter().map(|&i| x[i]).product(),
            BooleanFunction::Junta { vars, alphabet, table } => {
                let a = alphabet.size();
                let code =
                    vars.iter().fold(0usize, |c, &i| c * a + alphabet.ordinal(x[i]).expect("symbol in alphabet"));
                table[code]
            }
        }
    }

    /// Variables the function can depend on, sorted.
    pub fn relevant_hint(&self, n: usize) -> Vec<usize> {
        let mut v = match self {
            BooleanFunction::Majority => (0..n).collect(),
            BooleanFunction::Halfspace { weights, .. } => {
                (0..n).filter(|&i| weights.get(i).is_some_and(|w| *w != 0.0)).collect()
            }
            BooleanFunction::Parity(s) => s.clone(),
            BooleanFunction::Junta { vars, .. } => vars.clone(),
        };
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Weights uniform in `[-1, 1]` and threshold uniform in `[-0.25, 0.25]·Σ|w|`.
pub fn random_halfspace(n: usize, rng: &mut RngStream) -> BooleanFunction {
    let weights: Vec<f64> = (0..n).map(|_| 2.0 * rng.unit() - 1.0).collect();
    let scale: f64 = weights.iter().map(|w| w.abs()).sum();
    let threshold = (rng.unit() - 0.5) * 0.5 * scale;
    BooleanFunction::Halfspace { weights, threshold }
}

/// Distinct sorted variables and a uniformly random table that depends on every one of them.
pub fn random_junta(n: usize, k: usize, alphabet: Alphabet, rng: &mut RngStream) -> Result<BooleanFunction> {
    if k > n {
        return input(format!("cannot draw a {k}-junta over {n} variables"));
    }
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + rng.below(n - i);
        pool.swap(i, j);
    }
    let mut vars = pool[..k].to_vec();
    vars.sort_unstable();
    let a = alphabet.size();
    let size = a.pow(k as u32);
    loop {
        let table: Vec<i8> = (0..size).map(|_| if rng.coin() { 1 } else { -1 }).collect();
        if (0..k).all(|pos| table_depends_on(&table, a, k, pos)) {
            return BooleanFunction::junta(vars, alphabet, table);
        }
    }
}

/// Whether changing the symbol at `pos` (0 = most significant) can change the table value.
pub fn table_depends_on(table: &[i8], a: usize, k: usize, pos: usize) -> bool {
    let place = a.pow((k - 1 - pos) as u32);
    (0..table.len()).any(|code| {
        let digit = (code / place) % a;
        (0..a).any(|d| d != digit && table[code - digit * place + d * place] != table[code])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_evaluations() {
        assert_eq!(BooleanFunction::Majority.eval(&[1, -1, 1]), 1);
        assert_eq!(BooleanFunction::Majority.eval(&[1, -1]), 1);
        assert_eq!(BooleanFunction::Parity(vec![0, 2]).eval(&[-1, 1, 1]), -1);
        let h = BooleanFunction::Halfspace { weights: vec![1.0, -2.0], threshold: 0.5 };
        assert_eq!(h.eval(&[1, 1]), -1);
        assert_eq!(h.eval(&[1, -1]), 1);
    }

    #[test]
    fn junta_table_indexing() {
        // f = x_2 (as ±1) on variables {0, 2}: table over codes (x0, x2).
        let f = BooleanFunction::junta(vec![0, 2], Alphabet::Spins, vec![-1, 1, -1, 1]).unwrap();
        assert_eq!(f.eval(&[1, -1, 1]), 1);
        assert_eq!(f.eval(&[1, 1, -1]), -1);
        assert!(BooleanFunction::junta(vec![0], Alphabet::Spins, vec![1]).is_err());
    }

    #[test]
    fn random_juntas_use_all_variables() {
        let mut r = RngStream::new(5, 5);
        for _ in 0..50 {
            let f = random_junta(7, 3, Alphabet::Colors(3), &mut r).unwrap();
            if let BooleanFunction::Junta { vars, table, .. } = &f {
                assert_eq!(vars.len(), 3);
                assert!((0..3).all(|p| table_depends_on(table, 3, 3, p)));
            }
        }
    }
}
