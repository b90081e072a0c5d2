//! Flat `key = value` configuration with `[section]` headers.
//!
//! Keys inside `[model]` are addressed as `model.<key>`; keys before the
//! first header are top-level. Later layers override earlier ones:
//! schema defaults, the config file, `MRFL_*` environment variables,
//! `--set key=value`, then the dedicated flags.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::CliError;

/// `(key, default, meaning)`. Every accepted key is listed here.
pub const SCHEMA: &[(&str, &str, &str)] = &[
    ("seed", "0", "master seed"),
    ("out", "out", "artifact directory"),
    ("cache", "", "spectrum cache directory; empty disables caching"),
    ("workers", "0", "worker threads; 0 uses every core"),
    ("cap_states", "2097152", "largest support enumerated exactly"),
    ("model.file", "", "model text file; overrides the other model keys"),
    ("model.kind", "ising", "ising | coloring"),
    ("model.graph", "cycle:10", "empty:N | path:N | cycle:N | complete:N | grid:RxC | er:N:P:SEED"),
    ("model.beta", "0.1", "uniform Ising coupling"),
    ("model.field", "0", "Ising external field"),
    ("model.dynamics", "lazy", "lazy | heat-bath"),
    ("model.q", "3", "number of colors"),
    ("target.kind", "majority", "majority | halfspace | parity | junta"),
    ("target.vars", "0", "parity variables, comma separated"),
    ("target.k", "3", "size of a random junta target"),
    ("target.seed", "0", "seed of random halfspace and junta targets"),
    ("spectrum.betas", "0,0.02,0.1,1", "couplings of the spectrum columns"),
    ("majority.graph", "complete:11", "graph of the majority table"),
    ("majority.betas", "0.02,0.05,0.1,0.2", "couplings of the table rows"),
    ("majority.degrees", "2,4", "polynomial degrees"),
    ("majority.policy", "dimension-matched", "dimension-matched | literal"),
    ("learn.family", "conjunctions", "conjunctions | parities | local"),
    ("learn.k", "2", "largest basis degree"),
    ("learn.tau_max", "30", "largest feature time"),
    ("learn.grid", "geometric", "full | geometric | t1;t2;..."),
    ("learn.t_sims", "0", "walks per feature; 0 derives T from the Hoeffding bound"),
    ("learn.epsilon2", "0.05", "feature accuracy for the derived T"),
    ("learn.delta", "0.01", "failure probability for the derived T"),
    ("learn.samples", "3000", "training examples"),
    ("learn.burn_in", "0", "burn-in steps per example; 0 uses the default"),
    ("learn.budgets", "1,4,16", "candidate L1 budgets"),
    ("learn.holdout", "0.25", "fraction held out to choose the budget"),
    ("learn.opt_k", "3", "junta size of the comparison class"),
    ("learn.seeds", "1", "number of independent runs"),
    ("junta.k", "3", "size of the random target juntas"),
    ("junta.delta", "0.05", "failure probability of the walk-length bound"),
    ("junta.seeds", "100", "number of random targets"),
    ("junta.walk_len", "0", "walk length; 0 uses the planned length"),
    ("noise.ts", "0..20", "times, as a list or an inclusive range a..b"),
    ("sample.mode", "iid", "iid | walk"),
    ("sample.count", "100", "iid samples"),
    ("sample.burn_in", "0", "burn-in steps; 0 uses the default"),
    ("sample.length", "1000", "labeled walk length"),
    ("verify.steps", "100000", "simulated steps checked for the single-site property"),
];

/// Environment variable that overrides `key`: `MRFL_` plus the key in upper
/// case with `.` replaced by `_`, e.g. `MRFL_MODEL_BETA`.
pub fn env_name(key: &str) -> String {
    format!("MRFL_{}", key.replace('.', "_").to_uppercase())
}

fn known(key: &str) -> bool {
    SCHEMA.iter().any(|(k, _, _)| *k == key)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { values: SCHEMA.iter().map(|(k, v, _)| (k.to_string(), v.to_string())).collect() }
    }
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        if !known(key) {
            return Err(CliError::Config(format!("unknown key '{key}'")));
        }
        self.values.insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    /// Applies a config file's entries.
    pub fn merge_text(&mut self, text: &str) -> Result<(), CliError> {
        for (key, value) in parse_text(text)? {
            self.set(&key, &value)?;
        }
        Ok(())
    }

    /// Applies every `MRFL_*` variable; unknown ones are rejected.
    pub fn merge_env<I: IntoIterator<Item = (String, String)>>(&mut self, vars: I) -> Result<(), CliError> {
        for (name, value) in vars {
            if !name.starts_with("MRFL_") {
                continue;
            }
            let key = SCHEMA
                .iter()
                .map(|(k, _, _)| *k)
                .find(|k| env_name(k) == name)
                .ok_or_else(|| CliError::Config(format!("unknown environment override {name}")))?;
            self.set(key, &value)?;
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).expect("schema key")
    }

    pub fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T, CliError> {
        let v = self.get(key);
        v.parse().map_err(|_| CliError::Config(format!("{key}: cannot parse '{v}'")))
    }

    pub fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Vec<T>, CliError> {
        let v = self.get(key);
        if let Some((a, b)) = v.split_once("..") {
            let (a, b): (usize, usize) = (
                a.trim().parse().map_err(|_| CliError::Config(format!("{key}: bad range '{v}'")))?,
                b.trim().parse().map_err(|_| CliError::Config(format!("{key}: bad range '{v}'")))?,
            );
            return (a..=b)
                .map(|i| i.to_string().parse().map_err(|_| CliError::Config(format!("{key}: range not allowed"))))
                .collect();
        }
        v.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse().map_err(|_| CliError::Config(format!("{key}: cannot parse '{s}'"))))
            .collect()
    }

    /// Canonical text: top-level keys, then one section per prefix, keys sorted.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (key, value) in self.values.iter().filter(|(k, _)| !k.contains('.')) {
            let _ = writeln!(s, "{key} = {value}");
        }
        let mut section = "";
        for (key, value) in &self.values {
            if let Some((sec, k)) = key.split_once('.') {
                if sec != section {
                    let _ = writeln!(s, "\n[{sec}]");
                    section = sec;
                }
                let _ = writeln!(s, "{k} = {value}");
            }
        }
        s
    }
}

/// `(key, value)` pairs in file order; `#` starts a comment.
pub fn parse_text(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    let mut section = String::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!("line {}: expected key = value", k + 1)));
        };
        let key = key.trim();
        let full = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
        out.push((full, value.trim().to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_comments() {
        let pairs = parse_text("seed = 4 # master\n[model]\nbeta=0.5\n\n[junta]\nk = 2\n").unwrap();
        assert_eq!(
            pairs,
            vec![("seed".into(), "4".into()), ("model.beta".into(), "0.5".into()), ("junta.k".into(), "2".into())]
        );
        assert!(parse_text("[model]\nbeta\n").is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut c = RunConfig::default();
        assert!(c.merge_text("[model]\nbta = 1\n").is_err());
        assert!(c.merge_env([("MRFL_MODEL_BTA".to_string(), "1".to_string())]).is_err());
        c.merge_env([("MRFL_MODEL_BETA".to_string(), "0.7".to_string()), ("HOME".to_string(), "/".to_string())])
            .unwrap();
        assert_eq!(c.get("model.beta"), "0.7");
    }

    #[test]
    fn canonical_text_round_trips() {
        let mut c = RunConfig::default();
        c.set("noise.ts", "1,2,3").unwrap();
        let mut d = RunConfig::default();
        d.merge_text(&c.to_text()).unwrap();
        assert_eq!(c, d);
        assert_eq!(d.list::<usize>("noise.ts").unwrap(), vec![1, 2, 3]);
        assert_eq!(RunConfig::default().list::<usize>("noise.ts").unwrap().len(), 21);
    }
}
