//! Single-site Gibbs dynamics, multi-step simulation, burn-in sampling and
//! labeled walks.
//!
//! Every step picks a site uniformly. The lazy chains then hold with
//! probability 1/2 and otherwise resample the site from its conditional law
//! given the neighbors. Steps cost O(degree).

use crate::error::{input, Error, Result};
use crate::model::{ColoringModel, Configuration, Dynamics, IsingModel, MrfModel};
use crate::rng::RngStream;

/// The one-step sampler `OS(x)` of a model's Gibbs chain.
#[derive(Clone, Copy, Debug)]
pub struct ChainOracle<'a> {
    model: &'a MrfModel,
}

pub fn one_step_oracle(model: &MrfModel) -> ChainOracle<'_> {
    ChainOracle { model }
}

impl<'a> ChainOracle<'a> {
    pub fn new(model: &'a MrfModel) -> Self {
        Self { model }
    }

    pub fn model(&self) -> &'a MrfModel {
        self.model
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }

    pub fn alphabet_size(&self) -> usize {
        self.model.alphabet().size()
    }

    /// Advances `x` by one step and returns the site whose value changed.
    #[inline]
    pub fn step_in_place(&self, x: &mut [i8], rng: &mut RngStream) -> Option<usize> {
        match self.model {
            MrfModel::Ising(m) => ising_kernel(m, x, rng),
            MrfModel::Coloring(m) => coloring_kernel(m, x, rng),
        }
    }

    /// Runs `steps` steps from `x`, calling `visit(k, site, x)` after each
    /// step `k` (1-based) that changes the state.
    ///
    /// The walk has the law of repeated `step_in_place`, but holding coins are
    /// drawn 64 at a time, so the draws differ from the one-step path.
    pub fn walk_changes<V>(&self, x: &mut [i8], rng: &mut RngStream, steps: usize, visit: V)
    where
        V: FnMut(usize, usize, &[i8]),
    {
        match self.model {
            MrfModel::Ising(m) => {
                let lazy = m.dynamics() == Dynamics::LazyHeatBath;
                run_changes(lazy, x, rng, steps, |x, i, r| resample_spin(m, x, i, r), visit)
            }
            MrfModel::Coloring(m) => run_changes(true, x, rng, steps, |x, i, r| resample_color(m, x, i, r), visit),
        }
    }

    pub fn step(&self, x: &Configuration, rng: &mut RngStream) -> Configuration {
        let mut y = x.clone();
        self.step_in_place(&mut y, rng);
        y
    }
}

#[inline]
fn run_changes<K, V>(lazy: bool, x: &mut [i8], rng: &mut RngStream, steps: usize, kernel: K, mut visit: V)
where
    K: Fn(&mut [i8], usize, &mut RngStream) -> bool,
    V: FnMut(usize, usize, &[i8]),
{
    let n = x.len();
    if n == 0 {
        return;
    }
    let mut k = 0;
    let mut coins = 0u64;
    let mut left = 0u32;
    while k < steps {
        if lazy {
            if left == 0 {
                coins = rng.next_raw();
                left = 64;
            }
            // One coin per step from the low bits; a set bit holds. Bits above
            // `left` are zero, so a run reaching `left` exhausts the word.
            let holds = coins.trailing_ones();
            if holds >= left {
                k += left as usize;
                left = 0;
                continue;
            }
            k += holds as usize;
            coins = coins.checked_shr(holds + 1).unwrap_or(0);
            left -= holds + 1;
            if k >= steps {
                break;
            }
        }
        k += 1;
        let i = rng.below(n);
        if kernel(x, i, rng) {
            visit(k, i, x);
        }
    }
}

#[inline]
fn resample_spin(m: &IsingModel, x: &mut [i8], i: usize, rng: &mut RngStream) -> bool {
    if rng.unit() < m.flip_probability(i, x) {
        x[i] = -x[i];
        true
    } else {
        false
    }
}

#[inline]
fn resample_color(m: &ColoringModel, x: &mut [i8], i: usize, rng: &mut RngStream) -> bool {
    // Rejection from all q colors is uniform over the free ones; the current
    // color is always free on a proper coloring.
    let free = m.free_colors(i, x);
    let q = m.q();
    let c = loop {
        let c = rng.below(q);
        if free >> c & 1 == 1 {
            break c as i8;
        }
    };
    let changed = c != x[i];
    x[i] = c;
    changed
}

#[inline]
fn ising_kernel(m: &IsingModel, x: &mut [i8], rng: &mut RngStream) -> Option<usize> {
    let n = x.len();
    if n == 0 {
        return None;
    }
    let (i, hold) = rng.below_and_coin(n);
    if hold && m.dynamics() == Dynamics::LazyHeatBath {
        return None;
    }
    resample_spin(m, x, i, rng).then_some(i)
}

#[inline]
fn coloring_kernel(m: &ColoringModel, x: &mut [i8], rng: &mut RngStream) -> Option<usize> {
    let n = x.len();
    if n == 0 {
        return None;
    }
    let (i, hold) = rng.below_and_coin(n);
    if hold {
        return None;
    }
    resample_color(m, x, i, rng).then_some(i)
}

/// One Ising step from `x`. `x` must have the model's length.
pub fn glauber_step(model: &IsingModel, x: &Configuration, rng: &mut RngStream) -> Configuration {
    debug_assert_eq!(x.len(), model.n());
    let mut y = x.clone();
    ising_kernel(model, &mut y, rng);
    y
}

/// One coloring step from a proper coloring.
pub fn coloring_step(model: &ColoringModel, c: &Configuration, rng: &mut RngStream) -> Result<Configuration> {
    if !model.is_valid_coloring(c) {
        return input("coloring step requires a proper coloring");
    }
    let mut y = c.clone();
    coloring_kernel(model, &mut y, rng);
    Ok(y)
}

pub fn simulate_t_steps(oracle: &ChainOracle<'_>, x: &Configuration, t: usize, rng: &mut RngStream) -> Configuration {
    let mut y = x.clone();
    for _ in 0..t {
        oracle.step_in_place(&mut y, rng);
    }
    y
}

/// `ceil(10 n ln(max(n, 2)))`.
pub fn default_burn_in(n: usize) -> usize {
    let nf = n as f64;
    (10.0 * nf * nf.max(2.0).ln()).ceil() as usize
}

/// Start state for burn-in: uniform spins, or the greedy coloring.
pub fn random_start(model: &MrfModel, rng: &mut RngStream) -> Result<Configuration> {
    match model {
        MrfModel::Ising(m) => Ok(Configuration::new((0..m.n()).map(|_| if rng.coin() { 1 } else { -1 }).collect())),
        MrfModel::Coloring(m) => greedy_initial_coloring(m),
    }
}

/// Sample `j` is the endpoint of a `burn_in`-step walk driven by `rng.derive(j)`.
pub fn sample_stationary_iid(
    oracle: &ChainOracle<'_>,
    burn_in: usize,
    count: usize,
    rng: &RngStream,
) -> Result<Vec<Configuration>> {
    (0..count)
        .map(|j| {
            let mut s = rng.derive(j as u64);
            let start = random_start(oracle.model(), &mut s)?;
            Ok(simulate_t_steps(oracle, &start, burn_in, &mut s))
        })
        .collect()
}

/// Nodes in index order take the smallest color unused by earlier neighbors.
pub fn greedy_initial_coloring(model: &ColoringModel) -> Result<Configuration> {
    let n = model.n();
    let mut c = vec![-1i8; n];
    for i in 0..n {
        let mut used = 0u64;
        for &j in model.graph().neighbors(i) {
            if c[j] >= 0 {
                used |= 1u64 << c[j];
            }
        }
        let free = !used & ((1u64 << model.q()) - 1);
        if free == 0 {
            return Err(Error::Input(format!(
                "greedy coloring failed at node {i}: all {} colors taken by neighbors",
                model.q()
            )));
        }
        c[i] = free.trailing_zeros() as i8;
    }
    Ok(Configuration::new(c))
}

/// States `x^1..x^L` of a walk together with their labels.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledWalk {
    pub states: Vec<Configuration>,
    pub labels: Vec<i8>,
}

impl LabeledWalk {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Checks matching lengths, ±1 labels, equal state lengths and the single-site property.
    pub fn validate(&self) -> Result<()> {
        if self.states.len() != self.labels.len() {
            return input(format!("walk has {} states but {} labels", self.states.len(), self.labels.len()));
        }
        if let Some(k) = self.labels.iter().position(|&l| l != 1 && l != -1) {
            return input(format!("label at step {k} is not ±1"));
        }
        for (k, w) in self.states.windows(2).enumerate() {
            if w[0].len() != w[1].len() {
                return input(format!("state length changes at step {}", k + 1));
            }
            let d = w[0].iter().zip(w[1].iter()).filter(|(a, b)| a != b).count();
            if d > 1 {
                return input(format!("steps {k} and {} differ in {d} coordinates", k + 1));
            }
        }
        Ok(())
    }
}

/// Visits `length` states: the start, then one oracle step between visits.
/// The visitor receives the index, the state and the site changed on arrival.
pub fn walk_visit<F>(oracle: &ChainOracle<'_>, start: &Configuration, length: usize, rng: &mut RngStream, mut visit: F)
where
    F: FnMut(usize, &[i8], Option<usize>),
{
    if length == 0 {
        return;
    }
    let mut x = start.to_vec();
    visit(0, &x, None);
    for k in 1..length {
        let changed = oracle.step_in_place(&mut x, rng);
        visit(k, &x, changed);
    }
}

pub fn labeled_walk<L>(
    oracle: &ChainOracle<'_>,
    label_fn: L,
    start: &Configuration,
    length: usize,
    rng: &mut RngStream,
) -> LabeledWalk
where
    L: Fn(&[i8]) -> i8,
{
    let mut states = Vec::with_capacity(length);
    let mut labels = Vec::with_capacity(length);
    walk_visit(oracle, start, length, rng, |_, x, _| {
        states.push(Configuration::new(x.to_vec()));
        labels.push(label_fn(x));
    });
    LabeledWalk { states, labels }
}
