//! Orchestration of the spectrum, majority-approximation, stability, junta
//! and agnostic experiments, with their CSV reports.

pub mod agnostic;
pub mod junta;
pub mod majority;
pub mod spectrum;
pub mod stability;

pub use agnostic::{agnostic_experiment, AgnosticExperiment, AgnosticReport, AgnosticRow};
pub use junta::{junta_experiment, JuntaExperiment, JuntaReport, JuntaRow};
pub use majority::{eigenvector_count, majority_table, poly_fit_error, ApproximationRow, EigenPolicy, MajorityTable};
pub use spectrum::{spectrum_experiment, SpectrumTable, FIGURE_BETAS};
pub use stability::{stability_csv, stability_experiment};

pub use crate::graph::GraphKind;

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}
