use super::support::{enumerate_support, SupportIndex, DEFAULT_STATE_CAP};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{Dynamics, MrfModel};

/// Exact transition probabilities of the Gibbs chain over an enumerated support.
///
/// Rows are stored sparsely: each row holds the diagonal and one entry per
/// reachable single-site change, sorted by column.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    support: SupportIndex,
    offsets: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

pub fn exact_transition_matrix(model: &MrfModel) -> Result<TransitionMatrix> {
    let support = enumerate_support(model, DEFAULT_STATE_CAP)?;
    TransitionMatrix::build(model, support)
}

impl TransitionMatrix {
    /// Entry-exact probabilities of the dynamics implemented by the chain oracle.
    pub fn build(model: &MrfModel, support: SupportIndex) -> Result<Self> {
        let n = model.n();
        let len = support.len();
        if len > u32::MAX as usize {
            return Err(Error::SizeCap(format!("{len} states exceed the sparse index range")));
        }
        let mut offsets = Vec::with_capacity(len + 1);
        let mut cols: Vec<u32> = Vec::new();
        let mut vals = Vec::new();
        let mut x = vec![0i8; n];
        let mut row: Vec<(u32, f64)> = Vec::with_capacity(n * model.alphabet().size() + 1);
        let place: Vec<u64> = (0..n).map(|i| support.place_value(i)).collect();
        offsets.push(0);
        for a in 0..len {
            support.decode_into(a, &mut x);
            let code = support.code(a);
            row.clear();
            match model {
                MrfModel::Ising(m) => {
                    let scale = match m.dynamics() {
                        Dynamics::LazyHeatBath => 0.5 / n as f64,
                        Dynamics::HeatBath => 1.0 / n as f64,
                    };
                    for i in 0..n {
                        let p = scale * m.flip_probability(i, &x);
                        if p > 0.0 {
                            let target = if x[i] == 1 { code - place[i] } else { code + place[i] };
                            let b = support.index_of_code(target).expect("ising support is full");
                            row.push((b as u32, p));
                        }
                    }
                }
                MrfModel::Coloring(m) => {
                    for i in 0..n {
                        let free = m.free_colors(i, &x);
                        let count = free.count_ones() as f64;
                        let p = 0.5 / (n as f64 * count);
                        let mut bits = free;
                        while bits != 0 {
                            let c = bits.trailing_zeros() as i64;
                            bits &= bits - 1;
                            if c == i64::from(x[i]) {
                                continue;
                            }
                            let delta = (c - i64::from(x[i])) * place[i] as i64;
                            let target = (code as i64 + delta) as u64;
                            let b = support.index_of_code(target).expect("recoloring with a free color stays proper");
                            row.push((b as u32, p));
                        }
                    }
                }
            }
            let off: f64 = row.iter().map(|&(_, p)| p).sum();
            row.push((a as u32, 1.0 - off));
            row.sort_unstable_by_key(|&(c, _)| c);
            for &(c, p) in &row {
                cols.push(c);
                vals.push(p);
            }
            offsets.push(cols.len());
        }
        Ok(Self { support, offsets, cols, vals })
    }

    pub fn support(&self) -> &SupportIndex {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Nonzero entries of row `a` as `(column, probability)`.
    pub fn row(&self, a: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[a]..self.offsets[a + 1];
        self.cols[r.clone()].iter().map(|&c| c as usize).zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        let r = self.offsets[a]..self.offsets[a + 1];
        match self.cols[r.clone()].binary_search(&(b as u32)) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self, a: usize) -> f64 {
        self.get(a, a)
    }

    /// `(P g)(x) = Σ_y P(x, y) g(y)`.
    pub fn apply(&self, g: &[f64]) -> Vec<f64> {
        assert_eq!(g.len(), self.len());
        (0..self.len()).map(|a| self.row(a).map(|(b, p)| p * g[b]).sum()).collect()
    }

    /// `(mu P)(y) = Σ_x mu(x) P(x, y)`.
    pub fn apply_left(&self, mu: &[f64]) -> Vec<f64> {
        assert_eq!(mu.len(), self.len());
        let mut out = vec![0.0; self.len()];
        for (a, &m) in mu.iter().enumerate() {
            if m != 0.0 {
                for (b, p) in self.row(a) {
                    out[b] += m * p;
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> Matrix {
        let n = self.len();
        let mut d = Matrix::zeros(n, n);
        for a in 0..n {
            for (b, p) in self.row(a) {
                d[(a, b)] = p;
            }
        }
        d
    }

    /// Largest `|pi(x)P(x,y) - pi(y)P(y,x)| / max(pi(x)P(x,y), pi(y)P(y,x))` over nonzero pairs.
    pub fn detailed_balance_violation(&self, pi: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.len() {
            for (b, p) in self.row(a) {
                if b == a {
                    continue;
                }
                let f = pi[a] * p;
                let r = pi[b] * self.get(b, a);
                let scale = f.abs().max(r.abs());
                if scale > 0.0 {
                    worst = worst.max((f - r).abs() / scale);
                }
            }
        }
        worst
    }

    pub fn min_diagonal(&self) -> f64 {
        (0..self.len()).map(|a| self.diagonal(a)).fold(f64::INFINITY, f64::min)
    }

    /// Smallest probability between distinct support states at Hamming distance one.
    pub fn min_offdiagonal(&self) -> f64 {
        (0..self.len())
            .flat_map(|a| self.row(a).filter(move |&(b, _)| b != a).map(|(_, p)| p))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Normalized `exp(log weight)` over the support.
pub fn stationary_exact(model: &MrfModel, support: &SupportIndex) -> Result<Vec<f64>> {
    let mut x = vec![0i8; model.n()];
    let mut logw = Vec::with_capacity(support.len());
    for a in 0..support.len() {
        support.decode_into(a, &mut x);
        logw.push(model.log_stationary_weight(&x)?);
    }
    let top = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return Err(Error::Numerical("support carries no stationary mass".into()));
    }
    let mut pi: Vec<f64> = logw.iter().map(|&l| (l - top).exp()).collect();
    let z: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= z);
    Ok(pi)
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// `P^t g` by repeated products.
pub fn exact_pt_g(p: &TransitionMatrix, g: &[f64], t: usize) -> Vec<f64> {
    let mut v = g.to_vec();
    for _ in 0..t {
        v = p.apply(&v);
    }
    v
}

/// First `t` with `TV(delta_x P^t, pi) <= 1/4`, maximized over `starts`.
pub fn mixing_time(p: &TransitionMatrix, pi: &[f64], starts: &[usize], max_t: usize) -> Result<usize> {
    let mut worst = 0;
    for &s in starts {
        let mut mu = vec![0.0; p.len()];
        mu[s] = 1.0;
        let mut t = 0;
        while total_variation(&mu, pi) > 0.25 {
            if t == max_t {
                return Err(Error::Numerical(format!(
                    "chain from state {s} not within 1/4 of stationarity after {max_t} steps"
                )));
            }
            mu = p.apply_left(&mu);
            t += 1;
        }
        worst = worst.max(t);
    }
    Ok(worst)
}
