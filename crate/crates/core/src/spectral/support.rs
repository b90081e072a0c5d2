use crate::error::{size_cap, Result};
use crate::model::{Alphabet, Configuration, MrfModel};

/// Default bound on the number of enumerated states.
pub const DEFAULT_STATE_CAP: usize = 1 << 21;

/// Support states in lexicographic order, identified by base-|A| codes.
///
/// The code of `x` is `Σ_i ord(x_i) |A|^(n-1-i)`, so code order is
/// lexicographic order over value sequences.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportIndex {
    n: usize,
    alphabet: Alphabet,
    codes: Vec<u64>,
    /// True when every code below `codes.len()` is present.
    dense: bool,
}

impl SupportIndex {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    pub fn code(&self, idx: usize) -> u64 {
        self.codes[idx]
    }

    pub fn state(&self, idx: usize) -> Configuration {
        decode(self.alphabet, self.n, self.codes[idx])
    }

    pub fn decode_into(&self, idx: usize, out: &mut [i8]) {
        decode_into(self.alphabet, self.codes[idx], out)
    }

    pub fn states(&self) -> impl Iterator<Item = Configuration> + '_ {
        (0..self.len()).map(move |i| self.state(i))
    }

    pub fn index_of_code(&self, code: u64) -> Option<usize> {
        if self.dense {
            ((code as usize) < self.codes.len()).then_some(code as usize)
        } else {
            self.codes.binary_search(&code).ok()
        }
    }

    pub fn index_of(&self, x: &[i8]) -> Option<usize> {
        if x.len() != self.n {
            return None;
        }
        encode(self.alphabet, x).and_then(|c| self.index_of_code(c))
    }

    /// `|A|^(n-1-i)`, the code weight of site `i`.
    pub fn place_value(&self, i: usize) -> u64 {
        (self.alphabet.size() as u64).pow((self.n - 1 - i) as u32)
    }
}

pub fn encode(alphabet: Alphabet, x: &[i8]) -> Option<u64> {
    let a = alphabet.size() as u64;
    let mut code = 0u64;
    for &v in x {
        code = code * a + alphabet.ordinal(v)? as u64;
    }
    Some(code)
}

pub fn decode(alphabet: Alphabet, n: usize, code: u64) -> Configuration {
    let mut out = vec![0i8; n];
    decode_into(alphabet, code, &mut out);
    Configuration::new(out)
}

pub fn decode_into(alphabet: Alphabet, mut code: u64, out: &mut [i8]) {
    let a = alphabet.size() as u64;
    for slot in out.iter_mut().rev() {
        *slot = alphabet.symbol((code % a) as usize);
        code /= a;
    }
}

/// Enumerates the support in lexicographic order, failing once it exceeds `cap`.
pub fn enumerate_support(model: &MrfModel, cap: usize) -> Result<SupportIndex> {
    let n = model.n();
    let alphabet = model.alphabet();
    let a = alphabet.size();
    if (n as f64) * (a as f64).log2() >= 63.0 {
        return size_cap(format!("{a}^{n} states do not fit a 64-bit code"));
    }
    match model {
        MrfModel::Ising(_) => {
            let total = 1usize << n;
            if total > cap {
                return size_cap(format!("2^{n} = {total} states exceed the cap of {cap}"));
            }
            Ok(SupportIndex { n, alphabet, codes: (0..total as u64).collect(), dense: true })
        }
        MrfModel::Coloring(m) => {
            let q = m.q();
            let g = m.graph();
            let mut codes = Vec::new();
            let mut x = vec![0i8; n];
            // Depth-first over sites in index order, colors ascending.
            let mut depth = 0usize;
            let mut next = vec![0usize; n + 1];
            if n == 0 {
                codes.push(0);
            }
            while n > 0 && depth < n {
                if next[depth] == q {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                    continue;
                }
                let c = next[depth];
                next[depth] += 1;
                let ok = g.neighbors(depth).iter().all(|&j| j > depth || x[j] != c as i8);
                if !ok {
                    continue;
                }
                x[depth] = c as i8;
                if depth + 1 == n {
                    if codes.len() == cap {
                        return size_cap(format!("coloring support exceeds the cap of {cap}"));
                    }
                    codes.push(encode(alphabet, &x).expect("colors are in range"));
                } else {
                    depth += 1;
                    next[depth] = 0;
                }
            }
            let dense = codes.iter().enumerate().all(|(i, &c)| c == i as u64);
            Ok(SupportIndex { n, alphabet, codes, dense })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::model::{ColoringModel, IsingModel};

    #[test]
    fn ising_support_size_and_order() {
        let m = MrfModel::Ising(IsingModel::uniform(Graph::cycle(3).unwrap(), 0.1, 0.0).unwrap());
        let s = enumerate_support(&m, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(s.len(), 8);
        assert_eq!(s.state(0).to_vec(), vec![-1, -1, -1]);
        assert_eq!(s.state(1).to_vec(), vec![-1, -1, 1]);
        assert_eq!(s.state(7).to_vec(), vec![1, 1, 1]);
        for i in 0..8 {
            assert_eq!(s.index_of(&s.state(i)), Some(i));
        }
    }

    #[test]
    fn triangle_colorings() {
        let m = MrfModel::Coloring(ColoringModel::new(Graph::cycle(3).unwrap(), 3).unwrap());
        let s = enumerate_support(&m, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(s.len(), 6);
        let states: Vec<Vec<i8>> = s.states().map(|c| c.to_vec()).collect();
        let mut sorted = states.clone();
        sorted.sort();
        assert_eq!(states, sorted);
        assert!(states.iter().all(|c| c[0] != c[1] && c[1] != c[2] && c[0] != c[2]));
        assert_eq!(s.index_of(&[0, 0, 1]), None);
    }

    #[test]
    fn cap_enforced() {
        let m = MrfModel::Ising(IsingModel::uniform(Graph::cycle(12).unwrap(), 0.1, 0.0).unwrap());
        assert!(enumerate_support(&m, 1000).is_err());
        let c = MrfModel::Coloring(ColoringModel::new(Graph::cycle(6).unwrap(), 3).unwrap());
        assert!(enumerate_support(&c, 10).is_err());
    }
}
