//! Noise sensitivity `NS_t(f) = Pr_{x∼π, y∼P^t(x,·)}[f(x) ≠ f(y)]`, exactly
//! through `½ − ½ Σ_ℓ λ_ℓ^t f̂_ℓ²` and by sampling pairs.

use crate::chain::{default_burn_in, random_start, ChainOracle};
use crate::error::{input, Error, Result};
use crate::model::{Configuration, IsingModel, MrfModel};
use crate::rng::RngStream;
use crate::spectral::{fourier_coefficients, stationary_exact, Spectrum, SupportIndex};
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseMethod {
    Exact,
    Sampled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseReport {
    pub t: f64,
    pub ns: f64,
    pub method: NoiseMethod,
    /// Pairs drawn; zero for the exact method.
    pub samples: usize,
    /// Binomial standard error; zero for the exact method.
    pub std_error: f64,
}

/// `λ^t` for real `t ≥ 0`, with `0^0 = 1`. Negative `λ` needs integral `t`.
pub fn eigen_power(lambda: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(1.0);
    }
    if lambda >= 0.0 {
        return Ok(lambda.powf(t));
    }
    if t.fract() == 0.0 && t.abs() < i32::MAX as f64 {
        return Ok(lambda.powi(t as i32));
    }
    Err(Error::Numerical(format!("λ = {lambda} < 0 has no real power {t}")))
}

/// `Σ_ℓ λ_ℓ^t c_ℓ²`.
pub fn stability_from_coefficients(eigenvalues: &[f64], coefficients: &[f64], t: f64) -> Result<f64> {
    let mut s = 0.0;
    for (&l, &c) in eigenvalues.iter().zip(coefficients) {
        s += eigen_power(l, t)? * c * c;
    }
    Ok(s)
}

/// `½ − ½ Σ λ^t c²`, exactly 0 at `t = 0`, clamped to `[0, 1]`.
pub fn ns_from_coefficients(eigenvalues: &[f64], coefficients: &[f64], t: f64) -> Result<NoiseReport> {
    if !(t >= 0.0 && t.is_finite()) {
        return input("noise time must be finite and nonnegative");
    }
    let ns = if t == 0.0 {
        0.0
    } else {
        (0.5 - 0.5 * stability_from_coefficients(eigenvalues, coefficients, t)?).clamp(0.0, 1.0)
    };
    Ok(NoiseReport { t, ns, method: NoiseMethod::Exact, samples: 0, std_error: 0.0 })
}

fn check_boolean(f: &[f64]) -> Result<()> {
    if f.iter().any(|&v| v != 1.0 && v != -1.0) {
        return input("noise sensitivity needs a ±1-valued function");
    }
    Ok(())
}

/// Exact noise sensitivity of the tabulated ±1 function `f`.
pub fn noise_sensitivity_exact(spec: &Spectrum, f: &[f64], t: f64) -> Result<NoiseReport> {
    if f.len() != spec.len() {
        return input("function must be tabulated on the spectrum's support");
    }
    check_boolean(f)?;
    ns_from_coefficients(spec.eigenvalues(), &fourier_coefficients(f, spec), t)
}

/// How sampled pairs draw their first state.
#[derive(Clone, Debug)]
pub enum PiSampler<'a> {
    /// Inverse-CDF draws from the exact law on an enumerated support.
    Exact { support: &'a SupportIndex, cdf: Vec<f64> },
    /// Endpoint of a burn-in walk from `random_start`.
    BurnIn(usize),
}

impl<'a> PiSampler<'a> {
    pub fn exact(support: &'a SupportIndex, pi: &[f64]) -> Result<Self> {
        if pi.len() != support.len() || pi.is_empty() {
            return input("stationary weights must match a nonempty support");
        }
        let mut acc = 0.0;
        let cdf = pi
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(PiSampler::Exact { support, cdf })
    }

    pub fn burn_in(model: &MrfModel) -> Self {
        PiSampler::BurnIn(default_burn_in(model.n()))
    }

    pub fn draw(&self, oracle: &ChainOracle<'_>, rng: &mut RngStream) -> Result<Configuration> {
        match self {
            PiSampler::Exact { support, cdf } => {
                let u = rng.unit() * cdf[cdf.len() - 1];
                let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                Ok(support.state(idx))
            }
            PiSampler::BurnIn(steps) => {
                let mut x = random_start(oracle.model(), rng)?.into_inner();
                for _ in 0..*steps {
                    oracle.step_in_place(&mut x, rng);
                }
                Ok(Configuration::new(x))
            }
        }
    }
}

/// Disagreement frequency over `pairs` draws; pair `k` uses `rng.derive(k)`.
pub fn noise_sensitivity_sampled<F>(
    oracle: &ChainOracle<'_>,
    f: F,
    t: usize,
    pairs: usize,
    rng: &RngStream,
    sampler: &PiSampler<'_>,
) -> Result<NoiseReport>
where
    F: Fn(&[i8]) -> i8 + Sync,
{
    if pairs == 0 {
        return input("noise sampling needs at least one pair");
    }
    let flips = (0..pairs)
        .into_par_iter()
        .map(|k| -> Result<usize> {
            let mut s = rng.derive(k as u64);
            let x = sampler.draw(oracle, &mut s)?;
            let mut y = x.to_vec();
            for _ in 0..t {
                oracle.step_in_place(&mut y, &mut s);
            }
            Ok(usize::from(f(&x) != f(&y)))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let p = flips as f64 / pairs as f64;
    Ok(NoiseReport {
        t: t as f64,
        ns: p,
        method: NoiseMethod::Sampled,
        samples: pairs,
        std_error: (p * (1.0 - p) / pairs as f64).sqrt(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailCheck {
    pub rho: f64,
    /// Number of eigenvalues strictly above `rho`.
    pub ell_star: usize,
    pub tail: f64,
    /// Real time `−1/ln ρ` used in the noise term.
    pub t: f64,
    pub ns: f64,
    /// `(e/(e−1))·NS_t`.
    pub bound_stated: f64,
    /// `2·NS_t/(1 − ρ^t) = (2e/(e−1))·NS_t`, which always dominates the tail of a ±1 function.
    pub bound: f64,
}

impl TailCheck {
    pub fn slack_stated(&self) -> f64 {
        self.bound_stated - self.tail
    }

    pub fn slack(&self) -> f64 {
        self.bound - self.tail
    }
}

/// Tail mass past the eigenvalues above `ρ` against multiples of `NS_{−1/ln ρ}`.
///
/// Since `λ^t ≤ ρ^t = 1/e` past `ℓ*`, `2NS_t = Σ(1 − λ^t) f̂² ≥ (1 − 1/e)·tail`.
pub fn tail_mass_check_coefficients(eigenvalues: &[f64], coefficients: &[f64], rho: f64) -> Result<TailCheck> {
    if !(rho > 0.0 && rho < 1.0) {
        return input("ρ must lie in (0, 1)");
    }
    let ell_star = eigenvalues.iter().take_while(|&&l| l > rho).count();
    let tail = coefficients[ell_star..].iter().map(|c| c * c).sum();
    let t = -1.0 / rho.ln();
    let e = std::f64::consts::E;
    let ns = ns_from_coefficients(eigenvalues, coefficients, t)?.ns;
    let factor = e / (e - 1.0);
    Ok(TailCheck { rho, ell_star, tail, t, ns, bound_stated: factor * ns, bound: 2.0 * factor * ns })
}

pub fn tail_mass_check(spec: &Spectrum, f: &[f64], rho: f64) -> Result<TailCheck> {
    if f.len() != spec.len() {
        return input("function must be tabulated on the spectrum's support");
    }
    check_boolean(f)?;
    tail_mass_check_coefficients(spec.eigenvalues(), &fourier_coefficients(f, spec), rho)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityCurve {
    /// `(t, NS_t, 1 − 2 NS_t)`.
    pub points: Vec<(usize, f64, f64)>,
    /// Least-squares slope through the origin of `ln(1 − 2NS_t)` against `t/n`.
    pub exponent: f64,
    /// `exp(exponent)`, the fitted base of `(1 − 2NS_t) ≈ δ^{t/n}`.
    pub delta: f64,
    /// Minimum of `(1 − 2NS_{at}) − (1 − 2NS_t)^a` over the checked `(a, t)`.
    pub jensen_min_slack: f64,
}

/// Noise curve at times `ts` for a function with the given spectral coefficients on `n` sites.
pub fn stability_curve_coefficients(
    eigenvalues: &[f64],
    coefficients: &[f64],
    n: usize,
    ts: &[usize],
    jensen_powers: &[usize],
) -> Result<StabilityCurve> {
    let stab = |t: f64| stability_from_coefficients(eigenvalues, coefficients, t);
    let mut points = Vec::with_capacity(ts.len());
    let (mut sxy, mut sxx) = (0.0, 0.0);
    let mut jensen_min_slack = f64::INFINITY;
    for &t in ts {
        let r = ns_from_coefficients(eigenvalues, coefficients, t as f64)?;
        let s = 1.0 - 2.0 * r.ns;
        points.push((t, r.ns, s));
        if t > 0 && s > 0.0 {
            let x = t as f64 / n as f64;
            sxy += x * s.ln();
            sxx += x * x;
        }
        let base = stab(t as f64)?;
        for &a in jensen_powers {
            let lhs = stab((a * t) as f64)?;
            jensen_min_slack = jensen_min_slack.min(lhs - base.powi(a as i32));
        }
    }
    let exponent = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    Ok(StabilityCurve { points, exponent, delta: exponent.exp(), jensen_min_slack })
}

pub fn stability_curve(spec: &Spectrum, f: &[f64], n: usize, ts: &[usize]) -> Result<StabilityCurve> {
    check_boolean(f)?;
    stability_curve_coefficients(spec.eigenvalues(), &fourier_coefficients(f, spec), n, ts, &[2, 3, 4, 5])
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationDecay {
    /// `(d, max |E[x_i x_j] − E[x_i]E[x_j]|)` over pairs at graph distance `d ≥ 1`.
    pub rows: Vec<(usize, f64)>,
    pub strictly_decreasing: bool,
}

/// Exact centered pair correlations grouped by graph distance.
pub fn correlation_decay_check(model: &IsingModel, cap: usize) -> Result<CorrelationDecay> {
    let mrf = MrfModel::Ising(model.clone());
    let support = crate::spectral::enumerate_support(&mrf, cap)?;
    let pi = stationary_exact(&mrf, &support)?;
    let n = model.n();
    let mut mean = vec![0.0; n];
    let mut second = vec![0.0; n * n];
    let mut x = vec![0i8; n];
    for (a, &p) in pi.iter().enumerate() {
        support.decode_into(a, &mut x);
        for i in 0..n {
            mean[i] += p * f64::from(x[i]);
            for j in i + 1..n {
                second[i * n + j] += p * f64::from(x[i] * x[j]);
            }
        }
    }
    let mut by_d: Vec<f64> = Vec::new();
    for i in 0..n {
        let dist = model.graph().distances_from(i);
        for j in i + 1..n {
            if let Some(d) = dist[j] {
                if by_d.len() <= d {
                    by_d.resize(d + 1, 0.0);
                }
                let c = (second[i * n + j] - mean[i] * mean[j]).abs();
                by_d[d] = by_d[d].max(c);
            }
        }
    }
    let rows: Vec<(usize, f64)> = by_d.into_iter().enumerate().skip(1).collect();
    let strictly_decreasing = rows.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(CorrelationDecay { rows, strictly_decreasing })
}
