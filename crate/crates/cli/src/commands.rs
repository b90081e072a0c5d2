//! Subcommand bodies. Each returns its artifacts; `run` writes them and the manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use mrf_learn::basis::{conjunction_family, local_indicator_family, parity_family, BasisFamily, Frequencies};
use mrf_learn::chain::{
    default_burn_in, labeled_walk, one_step_oracle, random_start, sample_stationary_iid, simulate_t_steps,
};
use mrf_learn::experiments::{
    agnostic_experiment, fmt_float, junta_experiment, majority_table, stability_csv, AgnosticExperiment, EigenPolicy,
    GraphKind, JuntaExperiment, MajorityTable, SpectrumTable,
};
use mrf_learn::features::{hoeffding_t, FeatureConfig, TimeGrid};
use mrf_learn::io::{parse_model, walk_to_csv};
use mrf_learn::learners::noise::stability_curve;
use mrf_learn::learners::{random_halfspace, random_junta, BooleanFunction};
use mrf_learn::model::{hamming_distance, ColoringModel, Dynamics, IsingModel, MrfModel};
use mrf_learn::rng::RngStream;
use mrf_learn::spectral::ExactChain;
use sha2::{Digest, Sha256};

use crate::cache::{spectrum_cached, CacheOutcome};
use crate::config::RunConfig;
use crate::{CliError, Command};

/// Files to write plus free-form notes for the manifest.
#[derive(Default)]
struct Output {
    artifacts: Vec<(String, String)>,
    notes: Vec<String>,
    /// Set by `verify` when a check fails; artifacts are still written.
    failure: Option<String>,
}

impl Output {
    fn file(mut self, name: &str, body: String) -> Self {
        self.artifacts.push((name.to_string(), body));
        self
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    seed: u64,
    cap: usize,
    cache: Option<PathBuf>,
}

pub fn run(command: Command, cfg: &RunConfig) -> Result<(), CliError> {
    let t0 = Instant::now();
    let workers: usize = cfg.parse("workers")?;
    if workers > 0 {
        // Fails only if a pool already exists, which then keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    let cache = Some(cfg.get("cache")).filter(|c| !c.is_empty()).map(PathBuf::from);
    let ctx = Ctx { cfg, seed: cfg.parse("seed")?, cap: cfg.parse("cap_states")?, cache };
    let out = match command {
        Command::Spectrum => spectrum(&ctx)?,
        Command::MajorityTable => majority(&ctx)?,
        Command::Learn => learn(&ctx)?,
        Command::Junta => junta(&ctx)?,
        Command::Noise => noise(&ctx)?,
        Command::Sample => sample(&ctx)?,
        Command::Verify => verify(&ctx)?,
    };
    let dir = PathBuf::from(cfg.get("out"));
    write_artifacts(&dir, command, cfg, &out, t0.elapsed().as_secs_f64())?;
    match out.failure {
        Some(msg) => Err(CliError::Validation(msg)),
        None => Ok(()),
    }
}

fn write_artifacts(dir: &Path, command: Command, cfg: &RunConfig, out: &Output, wall: f64) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let mut manifest = String::new();
    let _ =
        writeln!(manifest, "# mrf-learn run manifest; rerun with: mrf-learn {} --config <this file>", command.name());
    let _ = writeln!(manifest, "# command: {}", command.name());
    let _ = writeln!(manifest, "# version: {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(manifest, "# wall_time_s: {wall:.3}");
    for note in &out.notes {
        let _ = writeln!(manifest, "# note: {note}");
    }
    for (name, body) in &out.artifacts {
        std::fs::write(dir.join(name), body)?;
        let _ = writeln!(manifest, "# artifact: {name} sha256={}", hex::encode(Sha256::digest(body.as_bytes())));
    }
    manifest.push_str(&cfg.to_text());
    std::fs::write(dir.join("manifest.txt"), manifest)?;
    Ok(())
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn graph_kind(cfg: &RunConfig, key: &str) -> Result<GraphKind, CliError> {
    Ok(GraphKind::parse(cfg.get(key))?)
}

fn dynamics(cfg: &RunConfig) -> Result<Dynamics, CliError> {
    let d = cfg.get("model.dynamics");
    Dynamics::parse(d).ok_or_else(|| config_err(format!("model.dynamics: unknown dynamics '{d}'")))
}

/// Whether the model comes from the `ising` keys rather than a file or a coloring.
fn is_uniform_ising(cfg: &RunConfig) -> bool {
    cfg.get("model.file").is_empty() && cfg.get("model.kind") == "ising"
}

fn ising_at(cfg: &RunConfig, beta: f64) -> Result<MrfModel, CliError> {
    let g = graph_kind(cfg, "model.graph")?.build()?;
    Ok(MrfModel::Ising(IsingModel::uniform(g, beta, cfg.parse("model.field")?)?.with_dynamics(dynamics(cfg)?)))
}

fn model(cfg: &RunConfig) -> Result<MrfModel, CliError> {
    let file = cfg.get("model.file");
    if !file.is_empty() {
        let text =
            std::fs::read_to_string(file).map_err(|e| config_err(format!("cannot read model file {file}: {e}")))?;
        return Ok(parse_model(&text)?);
    }
    match cfg.get("model.kind") {
        "ising" => ising_at(cfg, cfg.parse("model.beta")?),
        "coloring" => {
            let g = graph_kind(cfg, "model.graph")?.build()?;
            Ok(MrfModel::Coloring(ColoringModel::new(g, cfg.parse("model.q")?)?))
        }
        other => Err(config_err(format!("model.kind: unknown kind '{other}'"))),
    }
}

fn target(cfg: &RunConfig, model: &MrfModel) -> Result<BooleanFunction, CliError> {
    let n = model.n();
    let mut rng = RngStream::new(cfg.parse("target.seed")?, 0);
    match cfg.get("target.kind") {
        "majority" => Ok(BooleanFunction::Majority),
        "halfspace" => Ok(random_halfspace(n, &mut rng)),
        "parity" => {
            let vars: Vec<usize> = cfg.list("target.vars")?;
            if vars.iter().any(|&v| v >= n) {
                return Err(config_err("target.vars: variable out of range"));
            }
            Ok(BooleanFunction::Parity(vars))
        }
        "junta" => Ok(random_junta(n, cfg.parse("target.k")?, model.alphabet(), &mut rng)?),
        other => Err(config_err(format!("target.kind: unknown target '{other}'"))),
    }
}

fn note_cache(notes: &mut Vec<String>, label: &str, outcome: CacheOutcome) {
    let o = match outcome {
        CacheOutcome::Disabled => return,
        CacheOutcome::Hit => "hit",
        CacheOutcome::Miss => "miss",
        CacheOutcome::Recomputed => "recomputed after a corrupt entry",
    };
    notes.push(format!("spectrum cache {o} for {label}"));
}

fn spectrum(ctx: &Ctx<'_>) -> Result<Output, CliError> {
    let mut notes = Vec::new();
    let mut table = SpectrumTable { betas: Vec::new(), columns: Vec::new() };
    let models: Vec<(f64, MrfModel)> = if is_uniform_ising(ctx.cfg) {
        ctx.cfg
            .list::<f64>("spectrum.betas")?
            .into_iter()
            .map(|b| Ok((b, ising_at(ctx.cfg, b)?)))
            .collect::<Result<_, CliError>>()?
    } else {
        // A single model outside the coupling grid; its column is labeled NaN.
        vec![(f64::NAN, model(ctx.cfg)?)]
    };
    for (beta, m) in models {
        let (spec, outcome) = spectrum_cached(ctx.cache.as_deref(), &m, ctx.cap)?;
        note_cache(&mut notes, &format!("beta={}", fmt_float(beta)), outcome);
        table.betas.push(beta);
        table.columns.push(spec.eigenvalues().to_vec());
    }
    Ok(Output { notes, ..Default::default() }.file("spectrum.csv", table.to_csv()))
}

fn majority(ctx: &Ctx<'_>) -> Result<Output, CliError> {
    let cfg = ctx.cfg;
    let policy = cfg.get("majority.policy");
    let policy =
        EigenPolicy::parse(policy).ok_or_else(|| config_err(format!("majority.policy: unknown policy '{policy}'")))?;
    let rows = majority_table(
        &graph_kind(cfg, "majority.graph")?,
        &cfg.list::<f64>("majority.betas")?,
        &cfg.list::<usize>("majority.degrees")?,
        policy,
        ctx.cap,
    )?;
    Ok(Output::default().file("majority.csv", MajorityTable { rows }.to_csv()))
}

fn family(cfg: &RunConfig, model: &MrfModel, cap: usize) -> Result<BasisFamily, CliError> {
    let (n, k) = (model.n(), cfg.parse("learn.k")?);
    let spins = matches!(model, MrfModel::Ising(_));
    match cfg.get("learn.family") {
        "conjunctions" if spins => Ok(conjunction_family(n, k)),
        "parities" if spins => Ok(parity_family(n, k)),
        "conjunctions" | "parities" => Err(config_err("learn.family: spin families need an Ising model; use 'local'")),
        "local" => {
            let chain = ExactChain::new(model, cap)?;
            Ok(local_indicator_family(model, k, Frequencies::Exact { support: chain.support(), pi: &chain.pi })?)
        }
        other => Err(config_err(format!("learn.family: unknown family '{other}'"))),
    }
}

fn learn(ctx: &Ctx<'_>) -> Result<Output, CliError> {
    let cfg = ctx.cfg;
    let m = model(cfg)?;
    let fam = family(cfg, &m, ctx.cap)?;
    let tau_max: usize = cfg.parse("learn.tau_max")?;
    let samples: usize = cfg.parse("learn.samples")?;
    let grid_text = cfg.get("learn.grid");
    let grid =
        TimeGrid::parse(grid_text).ok_or_else(|| config_err(format!("learn.grid: cannot parse '{grid_text}'")))?;
    let mut t_sims: usize = cfg.parse("learn.t_sims")?;
    if t_sims == 0 {
        let universe = (samples * fam.len() * (tau_max + 1)) as f64;
        t_sims = hoeffding_t(cfg.parse("learn.epsilon2")?, cfg.parse("learn.delta")?, universe)?;
    }
    let burn_in = match cfg.parse::<usize>("learn.burn_in")? {
        0 => default_burn_in(m.n()),
        b => b,
    };
    let seeds: u64 = cfg.parse("learn.seeds")?;
    let exp = AgnosticExperiment {
        target: target(cfg, &m)?,
        family: fam,
        features: FeatureConfig::new(tau_max, t_sims).with_grid(grid),
        samples,
        burn_in,
        budgets: cfg.list("learn.budgets")?,
        holdout: cfg.parse("learn.holdout")?,
        opt_k: cfg.parse("learn.opt_k")?,
        seeds: (0..seeds).collect(),
        master: ctx.seed,
        cap: ctx.cap,
        model: m,
    };
    let rep = agnostic_experiment(&exp)?;
    let notes = vec![format!("T={t_sims} burn_in={burn_in}")];
    Ok(Output { notes, ..Default::default() }.file("agnostic.csv", rep.to_csv()))
}

fn junta(ctx: &Ctx<'_>) -> Result<Output, CliError> {
    let cfg = ctx.cfg;
    let walk_len = match cfg.parse::<usize>("junta.walk_len")? {
        0 => None,
        l => Some(l),
    };
    let exp = JuntaExperiment {
        model: model(cfg)?,
        k: cfg.parse("junta.k")?,
        delta: cfg.parse("junta.delta")?,
        seeds: cfg.parse("junta.seeds")?,
        master: ctx.seed,
        cap: ctx.cap,
        walk_len,
    };
    let rep = junta_experiment(&exp)?;
    let p = &rep.plan;
    let notes = vec![
        format!("tau={} alpha={} walk_len={}", p.tau, fmt_float(p.alpha), p.walk_len),
        format!("success_rate={}", fmt_float(rep.success_rate())),
    ];
    Ok(Output { notes, ..Default::default() }.file("junta.csv", rep.to_csv()))
}

fn noise(ctx: &Ctx<'_>) -> Result<Output, CliError> {
    let cfg = ctx.cfg;
    let m = model(cfg)?;
    let f = target(cfg, &m)?;
    let chain = ExactChain::new(&m, ctx.cap)?;
    let (spec, outcome) = spectrum_cached(ctx.cache.as_deref(), &m, ctx.cap)?;
    let table = chain.tabulate(|x| f64::from(f.eval(x)));
    let curve = stability_curve(&spec, &table, m.n(), &cfg.list::<usize>("noise.ts")?)?;
    let mut notes = Vec::new();
    note_cache(&mut notes, "model", outcome);
    notes.push(format!(
        "fitted delta={} jensen_min_slack={}",
        fmt_float(curve.delta),
        fmt_float(curve.jensen_min_slack)
    ));
    Ok(Output { notes, ..Default::default() }.file("stability.csv", stability_csv(&curve)))
}

fn sample(ctx: &Ctx<'_>) -> Result<Output, CliError> {
    let cfg = ctx.cfg;
    let m = model(cfg)?;
    let oracle = one_step_oracle(&m);
    let alphabet = m.alphabet();
    let burn_in = match cfg.parse::<usize>("sample.burn_in")? {
        0 => default_burn_in(m.n()),
        b => b,
    };
    match cfg.get("sample.mode") {
        "iid" => {
            let xs = sample_stationary_iid(&oracle, burn_in, cfg.parse("sample.count")?, &RngStream::new(ctx.seed, 0))?;
            let mut s = String::from("index,state\n");
            for (i, x) in xs.iter().enumerate() {
                let _ = writeln!(s, "{i},{}", alphabet.format(x));
            }
            Ok(Output::default().file("samples.csv", s))
        }
        "walk" => {
            let f = target(cfg, &m)?;
            let mut rng = RngStream::new(ctx.seed, 1);
            let start = random_start(&m, &mut rng)?;
            let start = simulate_t_steps(&oracle, &start, burn_in, &mut rng);
            let walk = labeled_walk(&oracle, |x| f.eval(x), &start, cfg.parse("sample.length")?, &mut rng);
            Ok(Output::default().file("walk.csv", walk_to_csv(&walk, alphabet)))
        }
        other => Err(config_err(format!("sample.mode: unknown mode '{other}'"))),
    }
}

fn verify(ctx: &Ctx<'_>) -> Result<Output, CliError> {
    let m = model(ctx.cfg)?;
    let chain = ExactChain::new(&m, ctx.cap)?;
    let mut checks: Vec<(&str, f64, f64, bool)> = Vec::new();
    let mass: f64 = chain.pi.iter().sum();
    checks.push(("pi_mass_error", (mass - 1.0).abs(), 1e-12, (mass - 1.0).abs() <= 1e-12));
    let row_err =
        (0..chain.p.len()).map(|a| (chain.p.row(a).map(|(_, p)| p).sum::<f64>() - 1.0).abs()).fold(0.0f64, f64::max);
    checks.push(("row_sum_error", row_err, 1e-12, row_err <= 1e-12));
    let balance = chain.p.detailed_balance_violation(&chain.pi);
    checks.push(("detailed_balance_violation", balance, 1e-12, balance <= 1e-12));
    if m.dynamics_tag() == Dynamics::LazyHeatBath.name() {
        let d = chain.p.min_diagonal();
        checks.push(("min_diagonal", d, 0.5, d >= 0.5));
    }
    let steps: usize = ctx.cfg.parse("verify.steps")?;
    let oracle = one_step_oracle(&m);
    let mut rng = RngStream::new(ctx.seed, 2);
    let mut x = random_start(&m, &mut rng)?.into_inner();
    let (mut max_moves, mut left_support) = (0usize, 0usize);
    for _ in 0..steps {
        let prev = x.clone();
        oracle.step_in_place(&mut x, &mut rng);
        max_moves = max_moves.max(hamming_distance(&prev, &x)?);
        left_support += usize::from(!m.in_support(&x));
    }
    checks.push(("max_sites_changed_per_step", max_moves as f64, 1.0, max_moves <= 1));
    checks.push(("steps_outside_support", left_support as f64, 0.0, left_support == 0));
    let mut s = String::from("check,value,threshold,ok\n");
    for (name, v, th, ok) in &checks {
        let _ = writeln!(s, "{name},{},{},{}", fmt_float(*v), fmt_float(*th), u8::from(*ok));
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.3).map(|c| c.0).collect();
    let mut out = Output::default().file("verify.csv", s);
    if !failed.is_empty() {
        out.failure = Some(format!("invariant checks failed: {}", failed.join(", ")));
    }
    Ok(out)
}
