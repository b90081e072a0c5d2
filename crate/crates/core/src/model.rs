//! Configurations and the two pairwise MRF families.
//!
//! Ising weights follow `pi(s) ∝ exp(-H(s))` with
//! `H(s) = -Σ_{(i,j)∈E} beta_ij s_i s_j - B Σ_i s_i`.
//! Coloring weights are uniform on proper colorings and zero elsewhere.

use crate::error::{input, Result};
use crate::graph::Graph;
use std::fmt;
use std::ops::{Deref, DerefMut};

/// Log-weight marker for configurations outside the support.
pub const LOG_ZERO: f64 = f64::NEG_INFINITY;

/// Largest supported color count; keeps states printable as base-36 digits.
pub const MAX_COLORS: usize = 36;

/// Spins are stored as -1/+1, colors as 0..q-1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration(Vec<i8>);

impl Configuration {
    pub fn new(values: Vec<i8>) -> Self {
        Self(values)
    }

    pub fn into_inner(self) -> Vec<i8> {
        self.0
    }
}

impl Deref for Configuration {
    type Target = [i8];
    fn deref(&self) -> &[i8] {
        &self.0
    }
}

impl DerefMut for Configuration {
    fn deref_mut(&mut self) -> &mut [i8] {
        &mut self.0
    }
}

impl From<Vec<i8>> for Configuration {
    fn from(v: Vec<i8>) -> Self {
        Self(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Alphabet {
    Spins,
    Colors(usize),
}

impl Alphabet {
    pub fn size(self) -> usize {
        match self {
            Alphabet::Spins => 2,
            Alphabet::Colors(q) => q,
        }
    }

    /// Symbol with ordinal `idx`; ordinals follow the natural value order.
    #[inline]
    pub fn symbol(self, idx: usize) -> i8 {
        match self {
            Alphabet::Spins => {
                if idx == 0 {
                    -1
                } else {
                    1
                }
            }
            Alphabet::Colors(_) => idx as i8,
        }
    }

    #[inline]
    pub fn ordinal(self, v: i8) -> Option<usize> {
        match self {
            Alphabet::Spins => match v {
                -1 => Some(0),
                1 => Some(1),
                _ => None,
            },
            Alphabet::Colors(q) => (v >= 0 && (v as usize) < q).then_some(v as usize),
        }
    }

    /// `+`/`-` for spins, a base-36 digit for colors.
    pub fn to_char(self, v: i8) -> Option<char> {
        let k = self.ordinal(v)?;
        Some(match self {
            Alphabet::Spins => {
                if v > 0 {
                    '+'
                } else {
                    '-'
                }
            }
            Alphabet::Colors(_) => char::from_digit(k as u32, 36)?,
        })
    }

    pub fn from_char(self, c: char) -> Option<i8> {
        let v = match self {
            Alphabet::Spins => match c {
                '+' => 1,
                '-' => -1,
                _ => return None,
            },
            Alphabet::Colors(_) => c.to_digit(36)? as i8,
        };
        self.ordinal(v).map(|_| v)
    }

    /// One character per coordinate.
    pub fn format(self, x: &[i8]) -> String {
        x.iter().map(|&v| self.to_char(v).unwrap_or('?')).collect()
    }

    pub fn parse_state(self, s: &str) -> Result<Vec<i8>> {
        s.chars()
            .map(|c| {
                self.from_char(c)
                    .ok_or_else(|| crate::error::Error::Input(format!("symbol '{c}' outside the alphabet")))
            })
            .collect()
    }
}

/// How the Ising chain resolves a chosen site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Dynamics {
    /// Stay with probability 1/2, otherwise heat-bath resample the site.
    #[default]
    LazyHeatBath,
    /// Heat-bath resample the chosen site without the extra holding coin.
    /// At zero coupling this is the boolean-cube walk with holding probability 1/2.
    HeatBath,
}

impl Dynamics {
    pub fn name(self) -> &'static str {
        match self {
            Dynamics::LazyHeatBath => "lazy",
            Dynamics::HeatBath => "heat-bath",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lazy" => Some(Dynamics::LazyHeatBath),
            "heat-bath" => Some(Dynamics::HeatBath),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsingModel {
    graph: Graph,
    beta: Vec<f64>,
    field: f64,
    dynamics: Dynamics,
    couplings: Vec<Vec<(usize, f64)>>,
}

impl IsingModel {
    /// `beta[e]` is the coupling of `graph.edges()[e]`.
    pub fn new(graph: Graph, beta: Vec<f64>, field: f64) -> Result<Self> {
        if beta.len() != graph.edges().len() {
            return input(format!("{} couplings given for {} edges", beta.len(), graph.edges().len()));
        }
        if let Some(b) = beta.iter().find(|b| !b.is_finite()) {
            return input(format!("non-finite coupling {b}"));
        }
        if !field.is_finite() {
            return input(format!("non-finite external field {field}"));
        }
        let mut couplings = vec![Vec::new(); graph.n()];
        for (&(a, b), &w) in graph.edges().iter().zip(&beta) {
            couplings[a].push((b, w));
            couplings[b].push((a, w));
        }
        for c in &mut couplings {
            c.sort_by_key(|&(j, _)| j);
        }
        Ok(Self { graph, beta, field, dynamics: Dynamics::default(), couplings })
    }

    pub fn uniform(graph: Graph, beta: f64, field: f64) -> Result<Self> {
        let m = graph.edges().len();
        Self::new(graph, vec![beta; m], field)
    }

    pub fn with_dynamics(mut self, dynamics: Dynamics) -> Self {
        self.dynamics = dynamics;
        self
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn dynamics(&self) -> Dynamics {
        self.dynamics
    }

    /// Neighbors of `i` with their couplings.
    pub fn couplings(&self, i: usize) -> &[(usize, f64)] {
        &self.couplings[i]
    }

    pub fn hamiltonian(&self, sigma: &[i8]) -> Result<f64> {
        check_len(sigma, self.n())?;
        let pair: f64 = self
            .graph
            .edges()
            .iter()
            .zip(&self.beta)
            .map(|(&(a, b), &w)| w * f64::from(sigma[a]) * f64::from(sigma[b]))
            .sum();
        let mag: f64 = sigma.iter().map(|&s| f64::from(s)).sum();
        Ok(-pair - self.field * mag)
    }

    /// `h_i = Σ_j beta_ij s_j + B`.
    #[inline]
    pub fn local_field(&self, i: usize, sigma: &[i8]) -> f64 {
        let mut h = self.field;
        for &(j, w) in &self.couplings[i] {
            h += w * f64::from(sigma[j]);
        }
        h
    }

    /// Heat-bath probability of flipping site `i`: `1 / (1 + exp(2 s_i h_i))`.
    #[inline]
    pub fn flip_probability(&self, i: usize, sigma: &[i8]) -> f64 {
        let x = 2.0 * f64::from(sigma[i]) * self.local_field(i, sigma);
        1.0 / (1.0 + x.exp())
    }

    /// True when the weights are invariant under a global spin flip.
    pub fn is_flip_symmetric(&self) -> bool {
        self.field == 0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColoringModel {
    graph: Graph,
    q: usize,
}

impl ColoringModel {
    pub fn new(graph: Graph, q: usize) -> Result<Self> {
        if q == 0 || q > MAX_COLORS {
            return input(format!("color count {q} outside 1..={MAX_COLORS}"));
        }
        Ok(Self { graph, q })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// The `q >= 3Δ` guidance under which the coloring chain is known to mix rapidly.
    pub fn meets_mixing_guidance(&self) -> bool {
        self.q >= 3 * self.graph.max_degree()
    }

    pub fn is_valid_coloring(&self, c: &[i8]) -> bool {
        c.len() == self.n()
            && c.iter().all(|&v| v >= 0 && (v as usize) < self.q)
            && self.graph.edges().iter().all(|&(a, b)| c[a] != c[b])
    }

    /// Bit `c` is set when color `c` is unused by every neighbor of `i`.
    #[inline]
    pub fn free_colors(&self, i: usize, c: &[i8]) -> u64 {
        let mut used = 0u64;
        for &j in self.graph.neighbors(i) {
            used |= 1u64 << c[j];
        }
        !used & ((1u64 << self.q) - 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MrfModel {
    Ising(IsingModel),
    Coloring(ColoringModel),
}

impl MrfModel {
    pub fn n(&self) -> usize {
        self.graph().n()
    }

    pub fn graph(&self) -> &Graph {
        match self {
            MrfModel::Ising(m) => m.graph(),
            MrfModel::Coloring(m) => m.graph(),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        match self {
            MrfModel::Ising(_) => Alphabet::Spins,
            MrfModel::Coloring(m) => Alphabet::Colors(m.q()),
        }
    }

    pub fn check_shape(&self, x: &[i8]) -> Result<()> {
        check_len(x, self.n())?;
        let a = self.alphabet();
        if let Some(v) = x.iter().find(|&&v| a.ordinal(v).is_none()) {
            return input(format!("value {v} outside the alphabet"));
        }
        Ok(())
    }

    /// Ising: `-H(x)`. Coloring: 0 on proper colorings, `LOG_ZERO` otherwise.
    pub fn log_stationary_weight(&self, x: &[i8]) -> Result<f64> {
        self.check_shape(x)?;
        Ok(match self {
            MrfModel::Ising(m) => -m.hamiltonian(x)?,
            MrfModel::Coloring(m) => {
                if m.is_valid_coloring(x) {
                    0.0
                } else {
                    LOG_ZERO
                }
            }
        })
    }

    pub fn in_support(&self, x: &[i8]) -> bool {
        match self {
            MrfModel::Ising(m) => x.len() == m.n() && x.iter().all(|&s| s == 1 || s == -1),
            MrfModel::Coloring(m) => m.is_valid_coloring(x),
        }
    }

    /// Label identifying the chain dynamics; part of every cache key.
    pub fn dynamics_tag(&self) -> &'static str {
        match self {
            MrfModel::Ising(m) => m.dynamics().name(),
            MrfModel::Coloring(_) => "lazy",
        }
    }
}

impl From<IsingModel> for MrfModel {
    fn from(m: IsingModel) -> Self {
        MrfModel::Ising(m)
    }
}

impl From<ColoringModel> for MrfModel {
    fn from(m: ColoringModel) -> Self {
        MrfModel::Coloring(m)
    }
}

impl fmt::Display for MrfModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MrfModel::Ising(m) => write!(
                f,
                "ising(n={}, edges={}, B={}, dynamics={})",
                m.n(),
                m.graph().edges().len(),
                m.field(),
                m.dynamics().name()
            ),
            MrfModel::Coloring(m) => {
                write!(f, "coloring(n={}, edges={}, q={})", m.n(), m.graph().edges().len(), m.q())
            }
        }
    }
}

pub fn hamming_distance(x: &[i8], y: &[i8]) -> Result<usize> {
    check_len(y, x.len())?;
    Ok(x.iter().zip(y).filter(|(a, b)| a != b).count())
}

fn check_len(x: &[i8], n: usize) -> Result<()> {
    if x.len() != n {
        return input(format!("configuration has length {}, model has {n} nodes", x.len()));
    }
    Ok(())
}
