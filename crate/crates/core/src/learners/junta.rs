//! Exact junta learning from a labeled single-site walk.
//!
//! A variable joins `J` when a step that changed exactly that variable also
//! changed the label. The table on `J` is the plurality label over walk
//! states, ties to `+1`; assignments never visited get the default label.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::basis::graded_subsets;
use crate::chain::{ChainOracle, LabeledWalk};
use crate::error::{input, size_cap, Result};
use crate::model::{Alphabet, MrfModel};
use crate::rng::RngStream;
use crate::spectral::support::decode_into;
use crate::spectral::{mixing_time, ExactChain};

/// Dense per-state counts are used up to this many configurations.
const DENSE_COUNT_CAP: u64 = 1 << 22;
/// Largest table the learner will materialize.
const TABLE_CAP: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq)]
pub struct JuntaHypothesis {
    /// Sorted identified variables.
    pub vars: Vec<usize>,
    pub alphabet: Alphabet,
    /// Indexed by the base-|A| code of `x` on `vars`, first variable most significant.
    pub table: Vec<i8>,
    pub seen: Vec<bool>,
    pub default_label: i8,
    /// Every assignment on `vars` was visited.
    pub complete: bool,
    /// Step at which each variable first witnessed a label change.
    pub witness_steps: Vec<usize>,
}

impl JuntaHypothesis {
    fn code(&self, x: &[i8]) -> usize {
        let a = self.alphabet.size();
        self.vars.iter().fold(0, |c, &i| c * a + self.alphabet.ordinal(x[i]).expect("symbol in alphabet"))
    }

    pub fn eval(&self, x: &[i8]) -> i8 {
        self.table[self.code(x)]
    }

    /// Header `# vars=...`, `# default=...`, `# complete=...`, then `assignment,label` rows.
    pub fn to_text(&self) -> String {
        let vars: Vec<String> = self.vars.iter().map(|v| v.to_string()).collect();
        let mut s = format!(
            "# vars={}\n# default={}\n# complete={}\nassignment,label\n",
            vars.join(" "),
            self.default_label,
            self.complete
        );
        let k = self.vars.len();
        let mut b = vec![0i8; k];
        for (code, &label) in self.table.iter().enumerate() {
            decode_into(self.alphabet, code as u64, &mut b);
            let _ = writeln!(s, "{},{}", self.alphabet.format(&b), label);
        }
        s
    }

    /// Whether `self` and `f` agree on every state in `states`.
    pub fn agrees_on<'a, I, F>(&self, states: I, f: F) -> bool
    where
        I: IntoIterator<Item = &'a [i8]>,
        F: Fn(&[i8]) -> i8,
    {
        states.into_iter().all(|x| self.eval(x) == f(x))
    }
}

/// Per-state label counts. Dense tables keep 32-bit counters and move a
/// counter into the 64-bit spill map before it would overflow.
enum Counts {
    Dense { small: Vec<[u32; 2]>, spill: HashMap<u64, [u64; 2]> },
    Sparse(HashMap<u64, [u64; 2]>),
}

impl Counts {
    #[inline]
    fn add(&mut self, code: u64, label: i8, k: u64) {
        let side = usize::from(label > 0);
        match self {
            Counts::Dense { small, spill } => {
                let slot = &mut small[code as usize][side];
                let v = u64::from(*slot) + k;
                if v > u64::from(u32::MAX) {
                    spill.entry(code).or_insert([0, 0])[side] += v;
                    *slot = 0;
                } else {
                    *slot = v as u32;
                }
            }
            Counts::Sparse(m) => m.entry(code).or_insert([0, 0])[side] += k,
        }
    }

    fn for_each(&self, mut f: impl FnMut(u64, [u64; 2])) {
        match self {
            Counts::Dense { small, spill } => {
                for (c, k) in small.iter().enumerate() {
                    let mut v = [u64::from(k[0]), u64::from(k[1])];
                    if let Some(extra) = spill.get(&(c as u64)) {
                        v[0] += extra[0];
                        v[1] += extra[1];
                    }
                    if v[0] + v[1] > 0 {
                        f(c as u64, v);
                    }
                }
            }
            Counts::Sparse(m) => {
                for (&c, &k) in m {
                    f(c, k);
                }
            }
        }
    }
}

/// Streaming form of the learner; memory is independent of the walk length.
pub struct JuntaLearner {
    alphabet: Alphabet,
    default_label: i8,
    place: Vec<u64>,
    witness: Vec<Option<usize>>,
    counts: Counts,
    state: Vec<i8>,
    code: u64,
    label: i8,
    run: u64,
    steps: usize,
}

impl JuntaLearner {
    pub fn new(n: usize, alphabet: Alphabet, default_label: i8) -> Result<Self> {
        if default_label != 1 && default_label != -1 {
            return input("default label must be ±1");
        }
        let a = alphabet.size() as u64;
        let total = (alphabet.size() as f64).powi(n as i32);
        if total >= 9.0e18 {
            return size_cap(format!("{n} sites over {a} symbols do not fit a 64-bit state code"));
        }
        let place = (0..n).map(|i| a.pow((n - 1 - i) as u32)).collect();
        let counts = if (total as u64) <= DENSE_COUNT_CAP {
            Counts::Dense { small: vec![[0, 0]; total as usize], spill: HashMap::new() }
        } else {
            Counts::Sparse(HashMap::new())
        };
        Ok(Self {
            alphabet,
            default_label,
            place,
            witness: vec![None; n],
            counts,
            state: Vec::new(),
            code: 0,
            label: 0,
            run: 0,
            steps: 0,
        })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn check_label(&self, label: i8) -> Result<()> {
        if label != 1 && label != -1 {
            return input(format!("label at step {} is not ±1", self.steps));
        }
        Ok(())
    }

    fn flush(&mut self) {
        if self.run > 0 {
            self.counts.add(self.code, self.label, self.run);
            self.run = 0;
        }
    }

    fn first(&mut self, x: &[i8], label: i8) -> Result<()> {
        if x.len() != self.place.len() {
            return input(format!("state has length {}, expected {}", x.len(), self.place.len()));
        }
        let mut code = 0u64;
        for &v in x {
            let o = self
                .alphabet
                .ordinal(v)
                .ok_or_else(|| crate::Error::Input(format!("value {v} outside the alphabet")))?;
            code = code * self.alphabet.size() as u64 + o as u64;
        }
        self.state = x.to_vec();
        self.code = code;
        self.label = label;
        self.run = 1;
        self.steps = 1;
        Ok(())
    }

    /// Records the next walk state; the changed site is found by comparison.
    pub fn observe(&mut self, x: &[i8], label: i8) -> Result<()> {
        self.check_label(label)?;
        if self.steps == 0 {
            return self.first(x, label);
        }
        if x.len() != self.state.len() {
            return input(format!("state length changes at step {}", self.steps));
        }
        let mut changed = None;
        for (i, (a, b)) in self.state.iter().zip(x).enumerate() {
            if a != b {
                if changed.is_some() {
                    return input(format!(
                        "steps {} and {} differ in more than one coordinate",
                        self.steps - 1,
                        self.steps
                    ));
                }
                changed = Some(i);
            }
        }
        if let Some(j) = changed {
            if self.alphabet.ordinal(x[j]).is_none() {
                return input(format!("value {} outside the alphabet at step {}", x[j], self.steps));
            }
        }
        self.observe_step(x, label, changed)
    }

    /// Records the next walk state when the changed site is already known.
    pub fn observe_step(&mut self, x: &[i8], label: i8, changed: Option<usize>) -> Result<()> {
        if self.steps == 0 {
            self.check_label(label)?;
            return self.first(x, label);
        }
        match changed {
            None => {
                if label != self.label {
                    return input(format!("label changes at step {} without any coordinate changing", self.steps));
                }
                self.run += 1;
            }
            Some(j) => {
                self.flush();
                let old = self.alphabet.ordinal(self.state[j]).expect("stored symbol") as u64;
                let new = self.alphabet.ordinal(x[j]).expect("symbol in alphabet") as u64;
                self.code = self.code - old * self.place[j] + new * self.place[j];
                self.state[j] = x[j];
                if label != self.label && self.witness[j].is_none() {
                    self.witness[j] = Some(self.steps);
                }
                self.label = label;
                self.run = 1;
            }
        }
        self.steps += 1;
        Ok(())
    }

    /// Records `k` further steps that changed nothing.
    pub fn observe_repeats(&mut self, k: usize) -> Result<()> {
        if k == 0 {
            return Ok(());
        }
        if self.steps == 0 {
            return input("the first walk state must be observed before repeats");
        }
        self.run += k as u64;
        self.steps += k;
        Ok(())
    }

    /// Hot path of the streaming learner: `idle` unchanged steps, then a step
    /// that set site `j` to `value` with label `label`. Inputs are trusted.
    #[inline]
    fn record_change(&mut self, idle: usize, j: usize, value: i8, label: i8) {
        self.run += idle as u64;
        self.flush();
        let old = self.alphabet.ordinal(self.state[j]).unwrap_or(0) as u64;
        let new = self.alphabet.ordinal(value).unwrap_or(0) as u64;
        self.code = self.code - old * self.place[j] + new * self.place[j];
        self.state[j] = value;
        if label != self.label && self.witness[j].is_none() {
            self.witness[j] = Some(self.steps + idle);
        }
        self.label = label;
        self.run = 1;
        self.steps += idle + 1;
    }

    pub fn finish(mut self) -> Result<JuntaHypothesis> {
        self.flush();
        let vars: Vec<usize> = (0..self.witness.len()).filter(|&i| self.witness[i].is_some()).collect();
        let witness_steps = vars.iter().map(|&i| self.witness[i].expect("witnessed")).collect();
        let a = self.alphabet.size();
        let size = (a as f64).powi(vars.len() as i32);
        if size > TABLE_CAP as f64 {
            return size_cap(format!("junta table over {} variables is too large", vars.len()));
        }
        let size = size as usize;
        let mut votes = vec![[0u64; 2]; size];
        let place = &self.place;
        self.counts.for_each(|code, k| {
            let jc = vars.iter().fold(0usize, |c, &i| c * a + ((code / place[i]) % a as u64) as usize);
            votes[jc][0] += k[0];
            votes[jc][1] += k[1];
        });
        let seen: Vec<bool> = votes.iter().map(|v| v[0] + v[1] > 0).collect();
        let table = votes
            .iter()
            .map(|v| {
                if v[0] + v[1] == 0 {
                    self.default_label
                } else if v[1] >= v[0] {
                    1
                } else {
                    -1
                }
            })
            .collect();
        Ok(JuntaHypothesis {
            complete: seen.iter().all(|&s| s),
            vars,
            alphabet: self.alphabet,
            table,
            seen,
            default_label: self.default_label,
            witness_steps,
        })
    }
}

/// Learner applied to a stored walk; violations of the single-site property are input errors.
pub fn junta_learn(walk: &LabeledWalk, alphabet: Alphabet, default_label: i8) -> Result<JuntaHypothesis> {
    if walk.states.len() != walk.labels.len() {
        return input(format!("walk has {} states but {} labels", walk.states.len(), walk.labels.len()));
    }
    let n = walk.states.first().map_or(0, |x| x.len());
    let mut learner = JuntaLearner::new(n, alphabet, default_label)?;
    for (x, &y) in walk.states.iter().zip(&walk.labels) {
        learner.observe(x, y)?;
    }
    learner.finish()
}

/// Runs the oracle for `length` states from `start`, labeling with `f`, and learns on the fly.
/// Holding steps are skipped in batches (same walk law as the one-step
/// oracle, different draws); labels are evaluated only after a change.
pub fn junta_learn_streaming<F: Fn(&[i8]) -> i8>(
    oracle: &ChainOracle<'_>,
    f: F,
    start: &[i8],
    length: usize,
    default_label: i8,
    rng: &mut RngStream,
) -> Result<JuntaHypothesis> {
    oracle.model().check_shape(start)?;
    let mut learner = JuntaLearner::new(start.len(), oracle.model().alphabet(), default_label)?;
    if length == 0 {
        return learner.finish();
    }
    let mut x = start.to_vec();
    learner.observe_step(&x, f(&x), None)?;
    let mut last = 0;
    let mut bad = None;
    oracle.walk_changes(&mut x, rng, length - 1, |k, j, y| {
        let label = f(y);
        if label != 1 && label != -1 {
            bad.get_or_insert(k);
            return;
        }
        learner.record_change(k - last - 1, j, y[j], label);
        last = k;
    });
    if let Some(k) = bad {
        return input(format!("label at step {k} is not ±1"));
    }
    learner.observe_repeats(length - 1 - last)?;
    learner.finish()
}

/// Measured constants of the two walk conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct JuntaConditions {
    /// Smallest `c` with `π(x_S = b) ≥ (c|A|)^(-|S|)` for every positive-mass pattern, `|S| ≤ max_s`.
    pub c: f64,
    /// Smallest positive pattern mass and the set size where it occurs.
    pub min_mass: f64,
    pub min_mass_size: usize,
    /// Smallest transition probability between distinct support states at Hamming distance 1.
    pub beta_min: f64,
    pub max_s: usize,
}

/// Exact minima over all sets of at most `max_s` sites and all support-adjacent pairs.
pub fn verify_junta_conditions(model: &MrfModel, max_s: usize, cap: usize) -> Result<JuntaConditions> {
    let chain = ExactChain::new(model, cap)?;
    conditions_from_chain(&chain, max_s)
}

pub fn conditions_from_chain(chain: &ExactChain, max_s: usize) -> Result<JuntaConditions> {
    let support = chain.support();
    let n = support.n();
    let a = support.alphabet().size();
    let max_s = max_s.min(n);
    if max_s == 0 {
        return input("max_S must be at least 1");
    }
    let mut c: f64 = 0.0;
    let mut min_mass = f64::INFINITY;
    let mut min_mass_size = 0;
    let mut x = vec![0i8; n];
    for s in graded_subsets(n, 1, max_s) {
        let mut mass = vec![0.0; a.pow(s.len() as u32)];
        for (idx, &p) in chain.pi.iter().enumerate() {
            support.decode_into(idx, &mut x);
            let b = s.iter().fold(0, |acc, &i| acc * a + support.alphabet().ordinal(x[i]).expect("symbol"));
            mass[b] += p;
        }
        let k = s.len() as f64;
        for &m in mass.iter().filter(|&&m| m > 0.0) {
            c = c.max(m.powf(-1.0 / k) / a as f64);
            if m < min_mass {
                min_mass = m;
                min_mass_size = s.len();
            }
        }
    }
    let mut beta_min = f64::INFINITY;
    for i in 0..chain.p.len() {
        for (j, v) in chain.p.row(i) {
            if j != i && v < beta_min {
                beta_min = v;
            }
        }
    }
    Ok(JuntaConditions { c, min_mass, min_mass_size, beta_min, max_s })
}

/// `⌈2 τ ln(1/α) ln(k/δ) / α⌉` with `α = β_min / (c|A|)^k`.
pub fn junta_walk_length(
    tau: usize,
    c: f64,
    beta_min: f64,
    alphabet_size: usize,
    k: usize,
    delta: f64,
) -> Result<usize> {
    if !(delta > 0.0 && delta < 1.0) || k == 0 || !(beta_min > 0.0) || !(c > 0.0) {
        return input("walk length needs δ in (0,1), k ≥ 1, β > 0 and c > 0");
    }
    let alpha = junta_alpha(c, beta_min, alphabet_size, k);
    let l = 2.0 * (tau.max(1) as f64) * (1.0 / alpha).ln() * (k as f64 / delta).ln().max(0.0) / alpha;
    if !l.is_finite() || l > 1e15 {
        return size_cap(format!("walk length {l:.3e} is not practical"));
    }
    Ok(l.ceil() as usize)
}

pub fn junta_alpha(c: f64, beta_min: f64, alphabet_size: usize, k: usize) -> f64 {
    beta_min / (c * alphabet_size as f64).powi(k as i32)
}

/// Everything needed to run the learner at the guaranteed length.
#[derive(Clone, Debug, PartialEq)]
pub struct JuntaPlan {
    pub conditions: JuntaConditions,
    pub tau: usize,
    pub alpha: f64,
    pub k: usize,
    pub delta: f64,
    pub walk_len: usize,
}

/// Up to this many start states are used to estimate the mixing time.
pub const MIXING_STARTS: usize = 16;

/// Start states for the mixing-time estimate: the first and last support
/// states and evenly spaced ones between them.
pub fn mixing_starts(len: usize) -> Vec<usize> {
    if len == 0 {
        return Vec::new();
    }
    let k = MIXING_STARTS.min(len);
    let mut v: Vec<usize> = (0..k).map(|i| if k == 1 { 0 } else { i * (len - 1) / (k - 1) }).collect();
    v.dedup();
    v
}

pub fn plan_junta_walk(model: &MrfModel, k: usize, delta: f64, cap: usize) -> Result<JuntaPlan> {
    let chain = ExactChain::new(model, cap)?;
    let conditions = conditions_from_chain(&chain, k)?;
    let tau = mixing_time(&chain.p, &chain.pi, &mixing_starts(chain.p.len()), 1_000_000)?;
    let a = model.alphabet().size();
    let walk_len = junta_walk_length(tau, conditions.c, conditions.beta_min, a, k, delta)?;
    Ok(JuntaPlan { alpha: junta_alpha(conditions.c, conditions.beta_min, a, k), conditions, tau, k, delta, walk_len })
}
