//! End-to-end agnostic learning against the best small junta.

use std::fmt::Write as _;

use super::fmt_float;
use crate::basis::BasisFamily;
use crate::chain::{one_step_oracle, sample_stationary_iid};
use crate::error::Result;
use crate::features::FeatureConfig;
use crate::learners::agnostic::{agnostic_learn_tuned, randomized_threshold_error, BudgetTuning, LearnerConfig};
use crate::learners::functions::BooleanFunction;
use crate::learners::opt::{JuntaClass, WeightedSample};
use crate::model::MrfModel;
use crate::rng::RngStream;
use crate::spectral::ExactChain;

#[derive(Clone, Debug, PartialEq)]
pub struct AgnosticExperiment {
    pub model: MrfModel,
    pub family: BasisFamily,
    pub target: BooleanFunction,
    pub features: FeatureConfig,
    pub samples: usize,
    pub burn_in: usize,
    pub budgets: Vec<f64>,
    /// Fraction of the training sample held out to choose the budget.
    pub holdout: f64,
    /// Junta size of the comparison class.
    pub opt_k: usize,
    pub seeds: Vec<u64>,
    pub master: u64,
    pub cap: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgnosticRow {
    pub seed: u64,
    /// θ-expected error of the hypothesis under the exact `π`.
    pub err: f64,
    /// Best error of a junta of the comparison size under `π`.
    pub opt: f64,
    pub budget: f64,
    pub tuning: BudgetTuning,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgnosticReport {
    pub tau_max: usize,
    pub t_sims: usize,
    pub rows: Vec<AgnosticRow>,
}

impl AgnosticReport {
    /// `seed,err,opt,W,tau_max,T`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("seed,err,opt,W,tau_max,T\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                r.seed,
                fmt_float(r.err),
                fmt_float(r.opt),
                fmt_float(r.budget),
                self.tau_max,
                self.t_sims
            );
        }
        s
    }
}

/// Per seed: burn-in samples labeled by the target, budget tuning, then the
/// exact `π`-error of the hypothesis next to the exact junta optimum.
pub fn agnostic_experiment(exp: &AgnosticExperiment) -> Result<AgnosticReport> {
    let chain = ExactChain::new(&exp.model, exp.cap)?;
    let states: Vec<_> = chain.support().states().collect();
    let labels: Vec<i8> = states.iter().map(|x| exp.target.eval(x)).collect();
    let exact = WeightedSample::new(states.iter().map(|x| x.to_vec()).collect(), chain.pi.clone(), labels.clone())?;
    let opt = JuntaClass { n: exp.model.n(), k: exp.opt_k, alphabet: exp.model.alphabet() }.opt(&exact)?.error;
    let oracle = one_step_oracle(&exp.model);
    let cfg = LearnerConfig {
        epsilon: 0.1,
        delta: 0.05,
        budget: exp.budgets.first().copied().unwrap_or(1.0),
        features: exp.features.clone(),
        samples: exp.samples,
        burn_in: exp.burn_in,
    };
    let mut rows = Vec::with_capacity(exp.seeds.len());
    for &seed in &exp.seeds {
        let rng = RngStream::new(exp.master, seed);
        let xs = sample_stationary_iid(&oracle, exp.burn_in, exp.samples, &rng.derive(0))?;
        let ys: Vec<i8> = xs.iter().map(|x| exp.target.eval(x)).collect();
        let (hyp, tuning) =
            agnostic_learn_tuned(&oracle, &exp.family, &xs, &ys, &cfg, &exp.budgets, exp.holdout, &rng.derive(1))?;
        let h = hyp.predict_many(&oracle, &states)?;
        // π-weighted |h − y| / 2.
        let err: f64 = h
            .iter()
            .zip(&labels)
            .zip(&chain.pi)
            .map(|((v, &y), p)| p * randomized_threshold_error(&[*v], &[y]).expect("one prediction"))
            .sum();
        rows.push(AgnosticRow { seed, err, opt, budget: hyp.budget, tuning });
    }
    Ok(AgnosticReport { tau_max: exp.features.tau_max, t_sims: exp.features.t_sims, rows })
}
