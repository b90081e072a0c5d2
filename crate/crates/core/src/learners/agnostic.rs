//! Agnostic learning with MCMC spectral features and L1 regression.
//!
//! Predictions are `clip(Σ w_{t,m} φ_{t,m}(x), -1, 1)` thresholded at a
//! uniform `θ ∈ [-1, 1]`, so the θ-expected error of one example is
//! `|h(x) − y| / 2`.

use std::fmt::Write as _;

use crate::basis::BasisFamily;
use crate::chain::ChainOracle;
use crate::error::{input, Result};
use crate::features::{build_feature_set, feature_row, FeatureConfig, FeatureSet};
use crate::linalg::Matrix;
use crate::model::Configuration;
use crate::regression::{predict_linear, solve_l1_regression, L1Problem, SolverStats};
use crate::rng::RngStream;

#[derive(Clone, Debug, PartialEq)]
pub struct LearnerConfig {
    pub epsilon: f64,
    pub delta: f64,
    /// L1 budget `W`.
    pub budget: f64,
    pub features: FeatureConfig,
    /// Number of training examples `s`.
    pub samples: usize,
    pub burn_in: usize,
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) || !(self.delta > 0.0 && self.delta < 1.0) {
            return input("ε and δ must lie in (0,1)");
        }
        if !(self.budget >= 0.0 && self.budget.is_finite()) {
            return input("budget W must be finite and nonnegative");
        }
        if self.samples == 0 {
            return input("sample count s must be at least 1");
        }
        self.features.validate().map(|_| ())
    }
}

/// Learned linear predictor over `(t, m)` features.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypothesis {
    pub weights: Vec<f64>,
    pub family: BasisFamily,
    pub features: FeatureConfig,
    /// Seed of the feature walks; predictions at a state reuse its training walks.
    pub feature_seed: u64,
    pub budget: f64,
    /// Mean absolute training residual.
    pub train_objective: f64,
    pub stats: SolverStats,
}

impl Hypothesis {
    /// Clipped real-valued prediction `h(x)`.
    pub fn predict(&self, oracle: &ChainOracle<'_>, x: &[i8]) -> Result<f64> {
        oracle.model().check_shape(x)?;
        let times = self.features.validate()?;
        let row = feature_row(oracle, &self.family, x, &times, self.features.t_sims, self.feature_seed);
        Ok(predict_linear(&self.weights, &row).clamp(-1.0, 1.0))
    }

    /// Clipped predictions for many states; repeated states share one feature row.
    pub fn predict_many(&self, oracle: &ChainOracle<'_>, xs: &[Configuration]) -> Result<Vec<f64>> {
        let fs = build_feature_set(oracle, &self.family, xs, &self.features, self.feature_seed)?;
        Ok(self.predict_features(&fs.matrix))
    }

    pub fn predict_features(&self, phi: &Matrix) -> Vec<f64> {
        (0..phi.rows()).map(|i| predict_linear(&self.weights, phi.row(i)).clamp(-1.0, 1.0)).collect()
    }

    /// Header lines `# key=value`, then `t,m,name,weight` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# feature_seed={}", self.feature_seed);
        let _ = writeln!(s, "# tau_max={}", self.features.tau_max);
        let _ = writeln!(s, "# T={}", self.features.t_sims);
        let _ = writeln!(s, "# grid={}", self.features.grid.name());
        let _ = writeln!(s, "# family={}", self.family.kind().name());
        let _ = writeln!(s, "# W={:.16e}", self.budget);
        s.push_str("t,m,name,weight\n");
        let times = self.features.validate().unwrap_or_default();
        let mut k = 0;
        for &t in &times {
            for m in 0..self.family.len() {
                let _ = writeln!(s, "{t},{m},{},{:.16e}", self.family.get(m).name(), self.weights[k]);
                k += 1;
            }
        }
        s
    }
}

/// Solves the budgeted L1 fit on precomputed feature rows.
pub fn fit_features(
    fs: &FeatureSet,
    rows: &[usize],
    labels: &[i8],
    budget: f64,
) -> Result<(Vec<f64>, f64, SolverStats)> {
    if rows.is_empty() {
        return input("no training rows");
    }
    let data: Vec<f64> = rows.iter().flat_map(|&r| fs.row(r).iter().copied()).collect();
    let y: Vec<f64> = rows.iter().map(|&r| f64::from(labels[r])).collect();
    let p = L1Problem::new(Matrix::from_vec(rows.len(), fs.cols(), data), y, budget);
    let sol = solve_l1_regression(&p)?;
    Ok((sol.w, sol.objective / rows.len() as f64, sol.stats))
}

fn check_labels(xs: &[Configuration], ys: &[i8]) -> Result<()> {
    if xs.len() != ys.len() {
        return input(format!("{} states but {} labels", xs.len(), ys.len()));
    }
    if xs.is_empty() {
        return input("no labeled examples");
    }
    if ys.iter().any(|&y| y != 1 && y != -1) {
        return input("labels must be ±1");
    }
    Ok(())
}

/// Builds the feature matrix for the samples and solves the L1 program with budget `cfg.budget`.
pub fn agnostic_learn(
    oracle: &ChainOracle<'_>,
    family: &BasisFamily,
    xs: &[Configuration],
    ys: &[i8],
    cfg: &LearnerConfig,
    rng: &RngStream,
) -> Result<Hypothesis> {
    cfg.validate()?;
    check_labels(xs, ys)?;
    let seed = rng.key();
    let fs = build_feature_set(oracle, family, xs, &cfg.features, seed)?;
    let rows: Vec<usize> = (0..xs.len()).collect();
    let (weights, train_objective, stats) = fit_features(&fs, &rows, ys, cfg.budget)?;
    Ok(Hypothesis {
        weights,
        family: family.clone(),
        features: cfg.features.clone(),
        feature_seed: seed,
        budget: cfg.budget,
        train_objective,
        stats,
    })
}

/// Validation error of each candidate budget and the chosen one.
#[derive(Clone, Debug, PartialEq)]
pub struct BudgetTuning {
    pub candidates: Vec<(f64, f64)>,
    pub chosen: f64,
}

/// Fits every budget on the first `1 − holdout` of the samples, picks the lowest
/// θ-expected validation error (ties to the smaller budget) and refits on all samples.
#[allow(clippy::too_many_arguments)]
pub fn agnostic_learn_tuned(
    oracle: &ChainOracle<'_>,
    family: &BasisFamily,
    xs: &[Configuration],
    ys: &[i8],
    cfg: &LearnerConfig,
    budgets: &[f64],
    holdout: f64,
    rng: &RngStream,
) -> Result<(Hypothesis, BudgetTuning)> {
    cfg.validate()?;
    check_labels(xs, ys)?;
    if budgets.is_empty() {
        return input("no candidate budgets");
    }
    if !(holdout > 0.0 && holdout < 1.0) {
        return input("holdout fraction must lie in (0,1)");
    }
    let seed = rng.key();
    let fs = build_feature_set(oracle, family, xs, &cfg.features, seed)?;
    let split = ((xs.len() as f64) * (1.0 - holdout)).round() as usize;
    let split = split.clamp(1, xs.len().saturating_sub(1).max(1));
    let train: Vec<usize> = (0..split).collect();
    let valid: Vec<usize> = (split..xs.len()).collect();
    let mut candidates = Vec::with_capacity(budgets.len());
    let mut best = (f64::INFINITY, budgets[0]);
    for &w in budgets {
        let (weights, _, _) = fit_features(&fs, &train, ys, w)?;
        let err = if valid.is_empty() {
            0.0
        } else {
            let h: Vec<f64> = valid.iter().map(|&r| predict_linear(&weights, fs.row(r))).collect();
            let y: Vec<i8> = valid.iter().map(|&r| ys[r]).collect();
            randomized_threshold_error(&h, &y)?
        };
        candidates.push((w, err));
        if err < best.0 || (err == best.0 && w < best.1) {
            best = (err, w);
        }
    }
    let all: Vec<usize> = (0..xs.len()).collect();
    let (weights, train_objective, stats) = fit_features(&fs, &all, ys, best.1)?;
    let hyp = Hypothesis {
        weights,
        family: family.clone(),
        features: cfg.features.clone(),
        feature_seed: seed,
        budget: best.1,
        train_objective,
        stats,
    };
    Ok((hyp, BudgetTuning { candidates, chosen: best.1 }))
}

/// Mean of `|clip(h) − y| / 2`, the exact θ-expectation of `Pr[sign(h − θ) ≠ y]`.
pub fn randomized_threshold_error(h: &[f64], y: &[i8]) -> Result<f64> {
    if h.len() != y.len() {
        return input(format!("{} predictions but {} labels", h.len(), y.len()));
    }
    if h.is_empty() {
        return input("no predictions");
    }
    let s: f64 = h.iter().zip(y).map(|(v, &l)| (v.clamp(-1.0, 1.0) - f64::from(l)).abs() / 2.0).sum();
    Ok(s / h.len() as f64)
}

/// `sign(h − θ)` with `sign(0) = +1`.
#[inline]
pub fn threshold(h: f64, theta: f64) -> i8 {
    if h - theta >= 0.0 {
        1
    } else {
        -1
    }
}

/// Fraction of mistakes when a fresh `θ ~ U[-1, 1]` is drawn per prediction.
pub fn sampled_threshold_error(h: &[f64], y: &[i8], rng: &mut RngStream) -> Result<f64> {
    if h.len() != y.len() || h.is_empty() {
        return input("predictions and labels must be nonempty and of equal length");
    }
    let wrong = h.iter().zip(y).filter(|(&v, &l)| threshold(v, 2.0 * rng.unit() - 1.0) != l).count();
    Ok(wrong as f64 / h.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorReport {
    /// θ-expected error.
    pub expected: f64,
    /// Error under one θ draw per prediction.
    pub sampled: f64,
}

pub fn empirical_error(
    hyp: &Hypothesis,
    oracle: &ChainOracle<'_>,
    xs: &[Configuration],
    ys: &[i8],
    rng: &mut RngStream,
) -> Result<ErrorReport> {
    check_labels(xs, ys)?;
    let h = hyp.predict_many(oracle, xs)?;
    Ok(ErrorReport { expected: randomized_threshold_error(&h, ys)?, sampled: sampled_threshold_error(&h, ys, rng)? })
}
