//! MCMC estimates `φ_{t,m}(x) ≈ (P^t g_m)(x)` and the learner's feature matrix.
//!
//! Seeding: the walks for state `x` and time `t` come from
//! `RngStream::from_key(mix(master, fingerprint(x))).derive(t).derive(j)`
//! for `j = 0..T`. Every time `t` uses fresh walks, so columns at different
//! times are independent. The walks at a fixed `t` are shared by all basis
//! functions, and equal states get equal features wherever they occur, which
//! makes training and prediction features agree.

use crate::basis::{BasisFamily, BasisFunction};
use crate::chain::ChainOracle;
use crate::error::{input, size_cap, Result};
use crate::linalg::Matrix;
use crate::model::{Alphabet, Configuration};
use crate::rng::{fingerprint, mix, RngStream};
use crate::spectral::support::{decode_into, encode};
use rayon::prelude::*;
use std::collections::HashMap;
use std::fmt::Write as _;

pub const DEFAULT_FEATURE_CAP: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TimeGrid {
    /// Every integer `0..=tau_max`.
    Full,
    /// `0, 1, 2, 4, ...` below `tau_max`, then `tau_max`.
    Geometric,
    /// Explicit times; each must be at most `tau_max`.
    Custom(Vec<usize>),
}

impl TimeGrid {
    pub fn times(&self, tau_max: usize) -> Result<Vec<usize>> {
        let mut ts = match self {
            TimeGrid::Full => (0..=tau_max).collect(),
            TimeGrid::Geometric => {
                let mut v = vec![0];
                let mut t = 1;
                while t < tau_max {
                    v.push(t);
                    t *= 2;
                }
                if tau_max > 0 {
                    v.push(tau_max);
                }
                v
            }
            TimeGrid::Custom(v) => {
                if v.iter().any(|&t| t > tau_max) {
                    return input(format!("time grid exceeds tau_max = {tau_max}"));
                }
                v.clone()
            }
        };
        ts.sort_unstable();
        ts.dedup();
        if ts.is_empty() {
            return input("time grid is empty");
        }
        Ok(ts)
    }

    pub fn name(&self) -> String {
        match self {
            TimeGrid::Full => "full".into(),
            TimeGrid::Geometric => "geometric".into(),
            TimeGrid::Custom(v) => {
                let parts: Vec<String> = v.iter().map(usize::to_string).collect();
                parts.join(";")
            }
        }
    }

    /// Parses `full`, `geometric` or a `;`/space-separated list of times.
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "full" => Some(TimeGrid::Full),
            "geometric" => Some(TimeGrid::Geometric),
            other => other
                .split(|c: char| c == ';' || c.is_whitespace())
                .filter(|p| !p.is_empty())
                .map(|p| p.parse().ok())
                .collect::<Option<Vec<usize>>>()
                .map(TimeGrid::Custom),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureConfig {
    pub tau_max: usize,
    /// Simulations per estimate.
    pub t_sims: usize,
    pub grid: TimeGrid,
    pub feature_cap: usize,
}

impl FeatureConfig {
    pub fn new(tau_max: usize, t_sims: usize) -> Self {
        Self { tau_max, t_sims, grid: TimeGrid::Full, feature_cap: DEFAULT_FEATURE_CAP }
    }

    pub fn with_grid(mut self, grid: TimeGrid) -> Self {
        self.grid = grid;
        self
    }

    pub fn validate(&self) -> Result<Vec<usize>> {
        if self.t_sims == 0 {
            return input("T must be at least 1");
        }
        self.grid.times(self.tau_max)
    }
}

/// `ceil(ln(universe / δ) / ε²)`, at least 1.
pub fn hoeffding_t(epsilon2: f64, delta: f64, universe: f64) -> Result<usize> {
    if !(epsilon2 > 0.0 && epsilon2.is_finite()) || !(delta > 0.0 && delta < 1.0) || !(universe >= 1.0) {
        return input("hoeffding_t needs ε₂ > 0, δ in (0,1) and universe ≥ 1");
    }
    let t = ((universe / delta).ln() / (epsilon2 * epsilon2)).ceil();
    Ok((t as usize).max(1))
}

/// Mean of `g` over `T` independent `t`-step simulations from `x`; walk `j` uses `rng.derive(j)`.
pub fn estimate_phi(
    oracle: &ChainOracle<'_>,
    g: &BasisFunction,
    x: &[i8],
    t: usize,
    t_sims: usize,
    rng: &RngStream,
) -> Result<f64> {
    if t_sims == 0 {
        return input("T must be at least 1");
    }
    if t == 0 {
        return Ok(g.eval(x));
    }
    let mut y = x.to_vec();
    let mut sum = 0.0;
    for j in 0..t_sims {
        let mut s = rng.derive(j as u64);
        y.copy_from_slice(x);
        for _ in 0..t {
            oracle.step_in_place(&mut y, &mut s);
        }
        sum += g.eval(&y);
    }
    Ok(sum / t_sims as f64)
}

/// Whether every configuration of length `n` has a `u64` code.
fn codes_fit(alphabet: Alphabet, n: usize) -> bool {
    (alphabet.size() as f64).powi(n as i32) < 9.0e18
}

/// Base stream for the features of state `x`.
pub fn state_stream(master: u64, x: &[i8]) -> RngStream {
    RngStream::from_key(mix(master, fingerprint(x)))
}

/// All features of one state, ordered by `(t, m)`.
pub fn feature_row(
    oracle: &ChainOracle<'_>,
    family: &BasisFamily,
    x: &[i8],
    times: &[usize],
    t_sims: usize,
    master: u64,
) -> Vec<f64> {
    let m_count = family.len();
    let alphabet = oracle.model().alphabet();
    let use_codes = codes_fit(alphabet, x.len());
    let base = state_stream(master, x);
    let mut out = Vec::with_capacity(times.len() * m_count);
    let mut y = x.to_vec();
    let mut vals = vec![0.0; m_count];
    let mut codes: Vec<u64> = Vec::with_capacity(if use_codes { t_sims } else { 0 });
    for &t in times {
        if t == 0 {
            family.eval_all(x, &mut vals);
            out.extend_from_slice(&vals);
            continue;
        }
        let ts = base.derive(t as u64);
        let mut acc = vec![0.0; m_count];
        codes.clear();
        for j in 0..t_sims {
            let mut s = ts.derive(j as u64);
            y.copy_from_slice(x);
            for _ in 0..t {
                oracle.step_in_place(&mut y, &mut s);
            }
            if use_codes {
                codes.push(encode(alphabet, &y).expect("walk stays in the alphabet"));
            } else {
                family.eval_all(&y, &mut vals);
                for (a, v) in acc.iter_mut().zip(&vals) {
                    *a += v;
                }
            }
        }
        if use_codes {
            // Endpoints repeat heavily at desk scale; evaluate each distinct one once.
            codes.sort_unstable();
            let mut k = 0;
            while k < codes.len() {
                let mut r = k;
                while r < codes.len() && codes[r] == codes[k] {
                    r += 1;
                }
                decode_into(alphabet, codes[k], &mut y);
                family.eval_all(&y, &mut vals);
                let w = (r - k) as f64;
                for (a, v) in acc.iter_mut().zip(&vals) {
                    *a += w * v;
                }
                k = r;
            }
        }
        let inv = 1.0 / t_sims as f64;
        out.extend(acc.into_iter().map(|a| (a * inv).clamp(-1.0, 1.0)));
    }
    out
}

/// Feature matrix with columns ordered by `(t ascending, m ascending)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureSet {
    pub matrix: Matrix,
    /// `(t, m)` for each column.
    pub descriptors: Vec<(usize, usize)>,
    pub config: FeatureConfig,
    pub master_seed: u64,
}

impl FeatureSet {
    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.matrix.row(i)
    }

    pub fn descriptor_names(&self) -> Vec<String> {
        self.descriptors.iter().map(|(t, m)| format!("{t}:{m}")).collect()
    }

    /// Header of `t:m` descriptors, then one row per example.
    pub fn to_csv(&self) -> String {
        let mut out = self.descriptor_names().join(",");
        out.push('\n');
        for i in 0..self.rows() {
            let cells: Vec<String> = self.row(i).iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// `key=value` lines sufficient to rebuild the matrix.
    pub fn manifest(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "master_seed={}", self.master_seed);
        let _ = writeln!(s, "tau_max={}", self.config.tau_max);
        let _ = writeln!(s, "T={}", self.config.t_sims);
        let _ = writeln!(s, "grid={}", self.config.grid.name());
        let _ = writeln!(s, "rows={}", self.rows());
        let _ = writeln!(s, "cols={}", self.cols());
        s
    }
}

pub fn build_feature_set(
    oracle: &ChainOracle<'_>,
    family: &BasisFamily,
    xs: &[Configuration],
    cfg: &FeatureConfig,
    master: u64,
) -> Result<FeatureSet> {
    let times = cfg.validate()?;
    let cols = times.len() * family.len();
    if cols > cfg.feature_cap {
        return size_cap(format!("{cols} features exceed the cap of {}", cfg.feature_cap));
    }
    for x in xs {
        oracle.model().check_shape(x)?;
    }
    let mut distinct: Vec<&[i8]> = Vec::new();
    let mut slot: HashMap<&[i8], usize> = HashMap::new();
    let rows_of: Vec<usize> = xs
        .iter()
        .map(|x| {
            *slot.entry(&x[..]).or_insert_with(|| {
                distinct.push(&x[..]);
                distinct.len() - 1
            })
        })
        .collect();
    let computed: Vec<Vec<f64>> =
        distinct.par_iter().map(|x| feature_row(oracle, family, x, &times, cfg.t_sims, master)).collect();
    let mut data = Vec::with_capacity(xs.len() * cols);
    for &r in &rows_of {
        data.extend_from_slice(&computed[r]);
    }
    let descriptors = times.iter().flat_map(|&t| (0..family.len()).map(move |m| (t, m))).collect();
    Ok(FeatureSet {
        matrix: Matrix::from_vec(xs.len(), cols, data),
        descriptors,
        config: cfg.clone(),
        master_seed: master,
    })
}
