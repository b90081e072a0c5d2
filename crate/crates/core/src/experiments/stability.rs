//! Noise-stability curves of a boolean function under the exact spectrum.

use std::fmt::Write as _;

use super::fmt_float;
use crate::error::Result;
use crate::learners::functions::BooleanFunction;
use crate::learners::noise::{stability_curve_coefficients, StabilityCurve};
use crate::model::MrfModel;
use crate::spectral::{spectral_projection, ExactChain};

/// `NS_t` and `1 − 2NS_t` at each `t`, with the Jensen check for powers 2..=5.
pub fn stability_experiment(model: &MrfModel, f: &BooleanFunction, ts: &[usize], cap: usize) -> Result<StabilityCurve> {
    let chain = ExactChain::new(model, cap)?;
    let table = chain.tabulate(|x| f64::from(f.eval(x)));
    let proj = spectral_projection(model, &chain.p, &chain.pi, &[table])?;
    stability_curve_coefficients(&proj.eigenvalues, &proj.coefficients[0], model.n(), ts, &[2, 3, 4, 5])
}

/// `t,ns,one_minus_2ns`.
pub fn stability_csv(curve: &StabilityCurve) -> String {
    let mut s = String::from("t,ns,one_minus_2ns\n");
    for &(t, ns, st) in &curve.points {
        let _ = writeln!(s, "{t},{},{}", fmt_float(ns), fmt_float(st));
    }
    s
}
