//! Exact junta recovery over many seeds at the guaranteed walk length.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::chain::{one_step_oracle, random_start};
use crate::error::Result;
use crate::learners::functions::random_junta;
use crate::learners::junta::{junta_learn_streaming, plan_junta_walk, JuntaPlan};
use crate::model::MrfModel;
use crate::rng::RngStream;
use crate::spectral::enumerate_support;

#[derive(Clone, Debug, PartialEq)]
pub struct JuntaExperiment {
    pub model: MrfModel,
    /// Junta size of the random targets.
    pub k: usize,
    pub delta: f64,
    pub seeds: usize,
    pub master: u64,
    pub cap: usize,
    /// Replaces the planned walk length when set.
    pub walk_len: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JuntaRow {
    pub seed: u64,
    /// The hypothesis equals the target on every support state.
    pub recovered: bool,
    pub walk_len: usize,
    pub learned_vars: Vec<usize>,
    pub target_vars: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JuntaReport {
    pub plan: JuntaPlan,
    pub rows: Vec<JuntaRow>,
}

impl JuntaReport {
    pub fn success_rate(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().filter(|r| r.recovered).count() as f64 / self.rows.len() as f64
    }

    /// `seed,recovered,walk_len`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("seed,recovered,walk_len\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{}", r.seed, u8::from(r.recovered), r.walk_len);
        }
        s
    }
}

/// Seed `s` draws its target and start state from `RngStream::new(master, s)`
/// and drives the walk with that stream's child 1.
pub fn junta_experiment(exp: &JuntaExperiment) -> Result<JuntaReport> {
    let plan = plan_junta_walk(&exp.model, exp.k, exp.delta, exp.cap)?;
    let walk_len = exp.walk_len.unwrap_or(plan.walk_len);
    let support = enumerate_support(&exp.model, exp.cap)?;
    let states: Vec<Vec<i8>> = support.states().map(|c| c.into_inner()).collect();
    let oracle = one_step_oracle(&exp.model);
    let n = exp.model.n();
    let rows: Vec<Result<JuntaRow>> = (0..exp.seeds as u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = RngStream::new(exp.master, seed);
            let f = random_junta(n, exp.k, exp.model.alphabet(), &mut rng)?;
            let start = random_start(&exp.model, &mut rng)?;
            let mut walk = rng.derive(1);
            let h = junta_learn_streaming(&oracle, |x| f.eval(x), &start, walk_len, 1, &mut walk)?;
            let recovered = states.iter().all(|x| h.eval(x) == f.eval(x));
            Ok(JuntaRow { seed, recovered, walk_len, learned_vars: h.vars, target_vars: f.relevant_hint(n) })
        })
        .collect();
    Ok(JuntaReport { plan, rows: rows.into_iter().collect::<Result<_>>()? })
}
