//! Agnostic learning with spectral features, junta learning from labeled
//! walks, and noise-sensitivity computations.

pub mod agnostic;
pub mod functions;
pub mod junta;
pub mod noise;
pub mod opt;

pub use agnostic::{
    agnostic_learn, agnostic_learn_tuned, empirical_error, randomized_threshold_error, BudgetTuning, ErrorReport,
    Hypothesis, LearnerConfig,
};
pub use functions::{random_halfspace, random_junta, BooleanFunction};
pub use junta::{
    junta_learn, junta_learn_streaming, plan_junta_walk, verify_junta_conditions, JuntaConditions, JuntaHypothesis,
    JuntaLearner, JuntaPlan,
};
pub use noise::*;
pub use opt::{brute_force_opt, JuntaClass, JuntaFit, WeightedSample};
