//! Plain-text formats for models, walks and junta hypotheses.
//!
//! Model text, one directive per line, `#` starts a comment:
//!
//! ```text
//! ising 4            # or: coloring 4 3   (nodes, colors)
//! field 0.0          # ising only, default 0
//! dynamics lazy      # ising only: lazy | heat-bath
//! edge 0 1 0.5       # ising edges carry a coupling
//! edge 1 2 0.5       # coloring edges carry none
//! ```
//!
//! [`model_to_text`] is canonical: sorted edges and `{:.16e}` floats, so equal
//! models produce equal text and equal [`model_hash`] values.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::chain::LabeledWalk;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::learners::junta::JuntaHypothesis;
use crate::model::{Alphabet, ColoringModel, Configuration, Dynamics, IsingModel, MrfModel};

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

fn num<T: std::str::FromStr>(line: usize, what: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse { line, msg: format!("bad {what} '{v}'") })
}

pub fn model_to_text(model: &MrfModel) -> String {
    let mut s = String::new();
    match model {
        MrfModel::Ising(m) => {
            let _ = writeln!(s, "ising {}", m.n());
            let _ = writeln!(s, "field {:.16e}", m.field());
            let _ = writeln!(s, "dynamics {}", m.dynamics().name());
            for (&(a, b), w) in m.graph().edges().iter().zip(m.beta()) {
                let _ = writeln!(s, "edge {a} {b} {w:.16e}");
            }
        }
        MrfModel::Coloring(m) => {
            let _ = writeln!(s, "coloring {} {}", m.n(), m.q());
            for &(a, b) in m.graph().edges() {
                let _ = writeln!(s, "edge {a} {b}");
            }
        }
    }
    s
}

/// SHA-256 of the canonical text; covers graph, parameters and dynamics.
pub fn model_hash(model: &MrfModel) -> [u8; 32] {
    Sha256::digest(model_to_text(model).as_bytes()).into()
}

pub fn model_hash_hex(model: &MrfModel) -> String {
    hex::encode(model_hash(model))
}

enum Header {
    Ising(usize),
    Coloring(usize, usize),
}

pub fn parse_model(text: &str) -> Result<MrfModel> {
    let mut header: Option<(usize, Header)> = None;
    let mut field = 0.0;
    let mut dynamics = Dynamics::default();
    let mut edges: Vec<(usize, usize, Option<f64>)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let words: Vec<&str> = body.split_whitespace().collect();
        match words.as_slice() {
            ["ising", ..] | ["coloring", ..] if header.is_some() => return parse_err(line, "second model header"),
            ["ising", n] => header = Some((line, Header::Ising(num(line, "node count", n)?))),
            ["coloring", n, q] => {
                header = Some((line, Header::Coloring(num(line, "node count", n)?, num(line, "color count", q)?)))
            }
            ["field", b] => field = num(line, "field", b)?,
            ["dynamics", d] => {
                dynamics =
                    Dynamics::parse(d).ok_or_else(|| Error::Parse { line, msg: format!("unknown dynamics '{d}'") })?
            }
            ["edge", a, b] => edges.push((num(line, "node", a)?, num(line, "node", b)?, None)),
            ["edge", a, b, w] => {
                edges.push((num(line, "node", a)?, num(line, "node", b)?, Some(num(line, "coupling", w)?)))
            }
            _ => return parse_err(line, format!("unrecognized line '{body}'")),
        }
    }
    let Some((hline, header)) = header else {
        return parse_err(0, "missing 'ising N' or 'coloring N Q' header");
    };
    let n = match header {
        Header::Ising(n) | Header::Coloring(n, _) => n,
    };
    // Couplings follow the graph's sorted edge order.
    let mut sorted: Vec<(usize, usize, Option<f64>)> = edges.iter().map(|&(a, b, w)| (a.min(b), a.max(b), w)).collect();
    sorted.sort_by_key(|&(a, b, _)| (a, b));
    let graph = Graph::new(n, sorted.iter().map(|&(a, b, _)| (a, b)))?;
    match header {
        Header::Ising(_) => {
            let beta: Option<Vec<f64>> = sorted.iter().map(|e| e.2).collect();
            let Some(beta) = beta else {
                return parse_err(hline, "every ising edge needs a coupling");
            };
            Ok(MrfModel::Ising(IsingModel::new(graph, beta, field)?.with_dynamics(dynamics)))
        }
        Header::Coloring(_, q) => {
            if sorted.iter().any(|e| e.2.is_some()) {
                return parse_err(hline, "coloring edges take no coupling");
            }
            Ok(MrfModel::Coloring(ColoringModel::new(graph, q)?))
        }
    }
}

/// `step,state,label` with 1-based steps and states as alphabet strings.
pub fn walk_to_csv(walk: &LabeledWalk, alphabet: Alphabet) -> String {
    let mut s = String::from("step,state,label\n");
    for (k, (x, y)) in walk.states.iter().zip(&walk.labels).enumerate() {
        let _ = writeln!(s, "{},{},{}", k + 1, alphabet.format(x), y);
    }
    s
}

/// Parses a walk dump and validates it; steps must run `1, 2, ...`.
pub fn parse_walk_csv(text: &str, alphabet: Alphabet) -> Result<LabeledWalk> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == "step,state,label" => {}
        _ => return parse_err(1, "expected header 'step,state,label'"),
    }
    let mut walk = LabeledWalk { states: Vec::new(), labels: Vec::new() };
    for (k, l) in lines {
        let line = k + 1;
        let cols: Vec<&str> = l.trim().split(',').collect();
        let [step, state, label] = cols.as_slice() else {
            return parse_err(line, "expected three columns");
        };
        if num::<usize>(line, "step", step)? != walk.states.len() + 1 {
            return parse_err(line, "steps must be consecutive from 1");
        }
        let x = alphabet.parse_state(state).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        walk.states.push(Configuration::new(x));
        walk.labels.push(num(line, "label", label)?);
    }
    walk.validate()?;
    Ok(walk)
}

/// Inverse of [`JuntaHypothesis::to_text`]; witness steps are not stored and
/// every listed assignment counts as seen.
pub fn parse_junta_hypothesis(text: &str, alphabet: Alphabet) -> Result<JuntaHypothesis> {
    let mut vars = None;
    let mut default_label = None;
    let mut complete = None;
    let mut rows: Vec<(usize, Vec<i8>, i8)> = Vec::new();
    let mut header_seen = false;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if let Some(meta) = l.strip_prefix('#') {
            let Some((key, value)) = meta.trim().split_once('=') else {
                return parse_err(line, "expected '# key=value'");
            };
            match key {
                "vars" => {
                    vars = Some(
                        value.split_whitespace().map(|v| num(line, "variable", v)).collect::<Result<Vec<usize>>>()?,
                    )
                }
                "default" => default_label = Some(num::<i8>(line, "default label", value)?),
                "complete" => complete = Some(num::<bool>(line, "completeness flag", value)?),
                _ => return parse_err(line, format!("unknown key '{key}'")),
            }
        } else if l == "assignment,label" {
            header_seen = true;
        } else {
            let Some((a, y)) = l.split_once(',') else {
                return parse_err(line, "expected 'assignment,label'");
            };
            let b = alphabet.parse_state(a).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
            rows.push((line, b, num(line, "label", y)?));
        }
    }
    let (Some(vars), Some(default_label), Some(complete), true) = (vars, default_label, complete, header_seen) else {
        return parse_err(0, "missing vars, default, complete or the column header");
    };
    let size = alphabet.size().pow(vars.len() as u32);
    if rows.len() != size {
        return parse_err(0, format!("{} rows for {} assignments", rows.len(), size));
    }
    let mut table = vec![0i8; size];
    for (code, (line, b, y)) in rows.into_iter().enumerate() {
        if b.len() != vars.len() {
            return parse_err(line, "assignment length differs from the variable count");
        }
        let c = b.iter().fold(0, |c, &v| c * alphabet.size() + alphabet.ordinal(v).expect("parsed symbol"));
        if c != code {
            return parse_err(line, "assignments must be listed in code order");
        }
        if y != 1 && y != -1 {
            return parse_err(line, "label must be ±1");
        }
        table[code] = y;
    }
    Ok(JuntaHypothesis {
        witness_steps: vec![0; vars.len()],
        seen: vec![true; size],
        vars,
        alphabet,
        table,
        default_label,
        complete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_text_round_trips() {
        let g = Graph::cycle(4).unwrap();
        let m = MrfModel::Ising(
            IsingModel::new(g, vec![0.1, -0.2, 0.3, 1.0], 0.25).unwrap().with_dynamics(Dynamics::HeatBath),
        );
        let t = model_to_text(&m);
        assert_eq!(parse_model(&t).unwrap(), m);
        let c = MrfModel::Coloring(ColoringModel::new(Graph::grid(2, 3).unwrap(), 7).unwrap());
        assert_eq!(parse_model(&model_to_text(&c)).unwrap(), c);
    }

    #[test]
    fn hash_separates_dynamics_and_coupling() {
        let g = Graph::cycle(5).unwrap();
        let a = MrfModel::Ising(IsingModel::uniform(g.clone(), 0.1, 0.0).unwrap());
        let b = MrfModel::Ising(IsingModel::uniform(g.clone(), 0.1, 0.0).unwrap().with_dynamics(Dynamics::HeatBath));
        let c = MrfModel::Ising(IsingModel::uniform(g, 0.2, 0.0).unwrap());
        assert_ne!(model_hash(&a), model_hash(&b));
        assert_ne!(model_hash(&a), model_hash(&c));
        assert_eq!(model_hash_hex(&a).len(), 64);
    }

    #[test]
    fn model_parse_errors_carry_lines() {
        assert!(matches!(parse_model("ising 3\nedge 0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_model("ising 3\nbogus\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_model("coloring 3 3\nedge 0 1 0.5\n"), Err(Error::Parse { .. })));
        assert!(parse_model("# nothing\n").is_err());
        let m = parse_model("ising 3 # header\nedge 2 1 0.5\nedge 0 1 0.25\n").unwrap();
        let MrfModel::Ising(i) = m else { unreachable!() };
        assert_eq!(i.beta(), &[0.25, 0.5]);
    }

    #[test]
    fn walk_csv_round_trips_and_validates() {
        let walk = LabeledWalk {
            states: vec![Configuration::new(vec![1, -1]), Configuration::new(vec![1, 1])],
            labels: vec![-1, 1],
        };
        let t = walk_to_csv(&walk, Alphabet::Spins);
        assert_eq!(t, "step,state,label\n1,+-,-1\n2,++,1\n");
        assert_eq!(parse_walk_csv(&t, Alphabet::Spins).unwrap(), walk);
        assert!(parse_walk_csv("step,state,label\n1,++,1\n2,--,1\n", Alphabet::Spins).is_err());
        assert!(parse_walk_csv("step,state,label\n2,++,1\n", Alphabet::Spins).is_err());
    }

    #[test]
    fn junta_hypothesis_round_trips() {
        let h = JuntaHypothesis {
            vars: vec![1, 3],
            alphabet: Alphabet::Colors(3),
            table: vec![1, -1, 1, 1, 1, -1, -1, 1, 1],
            seen: vec![true; 9],
            default_label: 1,
            complete: true,
            witness_steps: vec![0, 0],
        };
        let back = parse_junta_hypothesis(&h.to_text(), Alphabet::Colors(3)).unwrap();
        assert_eq!(back, h);
    }
}
