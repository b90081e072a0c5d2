//! Bounded basis families `g : X -> [-1, 1]`.

use crate::error::{input, Result};
use crate::model::{Alphabet, Configuration, MrfModel};
use crate::spectral::SupportIndex;
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Parity,
    Conjunction,
    Local,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Parity => "parity",
            FamilyKind::Conjunction => "conjunction",
            FamilyKind::Local => "local",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisFunction {
    name: String,
    kind: FamilyKind,
    support: Vec<usize>,
    pattern: Vec<i8>,
    /// Local indicators only: per-site centering frequencies.
    centering: Vec<f64>,
    /// Local indicators only: divisor bringing the sup norm to at most 1.
    scale: f64,
}

impl BasisFunction {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn pattern(&self) -> &[i8] {
        &self.pattern
    }

    #[inline]
    pub fn eval(&self, x: &[i8]) -> f64 {
        match self.kind {
            FamilyKind::Parity => {
                let mut s = 1i8;
                for &i in &self.support {
                    s *= x[i];
                }
                f64::from(s)
            }
            FamilyKind::Conjunction => {
                if self.support.iter().zip(&self.pattern).all(|(&i, &b)| x[i] == b) {
                    1.0
                } else {
                    -1.0
                }
            }
            FamilyKind::Local => {
                let mut v = 1.0;
                for ((&i, &b), &f) in self.support.iter().zip(&self.pattern).zip(&self.centering) {
                    v *= if x[i] == b { 1.0 - f } else { -f };
                }
                (v / self.scale).clamp(-1.0, 1.0)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisFamily {
    kind: FamilyKind,
    functions: Vec<BasisFunction>,
}

impl BasisFamily {
    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn functions(&self) -> &[BasisFunction] {
        &self.functions
    }

    pub fn get(&self, m: usize) -> &BasisFunction {
        &self.functions[m]
    }

    /// `out[m] = g_m(x)`.
    #[inline]
    pub fn eval_all(&self, x: &[i8], out: &mut [f64]) {
        for (o, g) in out.iter_mut().zip(&self.functions) {
            *o = g.eval(x);
        }
    }

    /// `table[m][a] = g_m(state a)`.
    pub fn tabulate(&self, support: &SupportIndex) -> Vec<Vec<f64>> {
        let mut table = vec![Vec::with_capacity(support.len()); self.len()];
        let mut x = vec![0i8; support.n()];
        for a in 0..support.len() {
            support.decode_into(a, &mut x);
            for (row, g) in table.iter_mut().zip(&self.functions) {
                row.push(g.eval(&x));
            }
        }
        table
    }

    /// CSV with columns `index,name,kind,support,pattern`; sets and patterns are `;`-separated.
    pub fn manifest_csv(&self) -> String {
        let mut out = String::from("index,name,kind,support,pattern\n");
        for (m, g) in self.functions.iter().enumerate() {
            let support: Vec<String> = g.support.iter().map(usize::to_string).collect();
            let pattern: Vec<String> = g.pattern.iter().map(i8::to_string).collect();
            let _ = writeln!(out, "{m},{},{},{},{}", g.name, g.kind.name(), support.join(";"), pattern.join(";"));
        }
        out
    }
}

/// Subsets of `0..n` with sizes in `lo..=hi`, ordered by size then lexicographically.
pub fn graded_subsets(n: usize, lo: usize, hi: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in lo..=hi.min(n) {
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            out.push(comb.clone());
            let mut i = size;
            let advanced = loop {
                if i == 0 {
                    break false;
                }
                i -= 1;
                if comb[i] < n - size + i {
                    break true;
                }
            };
            if !advanced {
                break;
            }
            comb[i] += 1;
            for k in i + 1..size {
                comb[k] = comb[k - 1] + 1;
            }
        }
    }
    out
}

/// All assignments of `len` symbols, lexicographic in symbol order.
fn patterns(alphabet: Alphabet, len: usize) -> Vec<Vec<i8>> {
    let a = alphabet.size();
    let total = a.pow(len as u32);
    (0..total)
        .map(|mut code| {
            let mut p = vec![0i8; len];
            for slot in p.iter_mut().rev() {
                *slot = alphabet.symbol(code % a);
                code /= a;
            }
            p
        })
        .collect()
}

fn set_name(prefix: &str, support: &[usize], pattern: Option<&[i8]>) -> String {
    let mut s = format!("{prefix}{{");
    for (k, i) in support.iter().enumerate() {
        if k > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{i}");
        if let Some(p) = pattern {
            let _ = match p[k] {
                1 if prefix == "and" => write!(s, ":+"),
                -1 if prefix == "and" => write!(s, ":-"),
                v => write!(s, ":{v}"),
            };
        }
    }
    s.push('}');
    s
}

/// Parities `χ_S(x) = Π_{i∈S} x_i` for `|S| <= k`.
pub fn parity_family(n: usize, k: usize) -> BasisFamily {
    let functions = graded_subsets(n, 0, k)
        .into_iter()
        .map(|s| BasisFunction {
            name: set_name("chi", &s, None),
            kind: FamilyKind::Parity,
            support: s,
            pattern: Vec::new(),
            centering: Vec::new(),
            scale: 1.0,
        })
        .collect();
    BasisFamily { kind: FamilyKind::Parity, functions }
}

/// `2 Π 1(x_i = b_i) - 1` for `1 <= |S| <= k` and every sign pattern `b`.
pub fn conjunction_family(n: usize, k: usize) -> BasisFamily {
    let mut functions = Vec::new();
    for s in graded_subsets(n, 1, k) {
        for b in patterns(Alphabet::Spins, s.len()) {
            functions.push(BasisFunction {
                name: set_name("and", &s, Some(&b)),
                kind: FamilyKind::Conjunction,
                support: s.clone(),
                pattern: b,
                centering: Vec::new(),
                scale: 1.0,
            });
        }
    }
    BasisFamily { kind: FamilyKind::Conjunction, functions }
}

/// Site marginals used to center local indicators.
pub enum Frequencies<'a> {
    /// Exact stationary law on an enumerated support.
    Exact { support: &'a SupportIndex, pi: &'a [f64] },
    /// Empirical frequencies of a sample.
    Sample(&'a [Configuration]),
}

/// `Π_{i∈S} (1(x_i = b_i) - freq_i(b_i))`, rescaled by its largest magnitude.
pub fn local_indicator_family(model: &MrfModel, k: usize, freq: Frequencies<'_>) -> Result<BasisFamily> {
    let n = model.n();
    let alphabet = model.alphabet();
    let a = alphabet.size();
    // marginal[i][ordinal]
    let mut marginal = vec![vec![0.0; a]; n];
    let states: Vec<(Vec<i8>, f64)> = match freq {
        Frequencies::Exact { support, pi } => {
            if pi.len() != support.len() {
                return input("stationary weights must match the support");
            }
            (0..support.len()).map(|s| (support.state(s).into_inner(), pi[s])).collect()
        }
        Frequencies::Sample(xs) => {
            if xs.is_empty() {
                return input("local indicator frequencies need a nonempty sample");
            }
            let w = 1.0 / xs.len() as f64;
            xs.iter().map(|x| (x.to_vec(), w)).collect()
        }
    };
    for (x, w) in &states {
        model.check_shape(x)?;
        for (i, &v) in x.iter().enumerate() {
            marginal[i][alphabet.ordinal(v).expect("checked shape")] += w;
        }
    }
    let exact = matches!(freq, Frequencies::Exact { .. });
    let mut functions = Vec::new();
    if k == 0 {
        return Ok(BasisFamily { kind: FamilyKind::Local, functions });
    }
    for s in graded_subsets(n, 1, k) {
        for b in patterns(alphabet, s.len()) {
            let centering: Vec<f64> =
                s.iter().zip(&b).map(|(&i, &v)| marginal[i][alphabet.ordinal(v).expect("pattern symbols")]).collect();
            let mut g = BasisFunction {
                name: set_name("loc", &s, Some(&b)),
                kind: FamilyKind::Local,
                support: s.clone(),
                pattern: b,
                centering,
                scale: 1.0,
            };
            let top = states.iter().map(|(x, _)| raw_local(&g, x).abs()).fold(0.0, f64::max);
            let scale = if exact { top } else { 1.1 * top };
            if scale > 0.0 {
                g.scale = scale;
                functions.push(g);
            }
        }
    }
    Ok(BasisFamily { kind: FamilyKind::Local, functions })
}

fn raw_local(g: &BasisFunction, x: &[i8]) -> f64 {
    g.support
        .iter()
        .zip(&g.pattern)
        .zip(&g.centering)
        .map(|((&i, &b), &f)| if x[i] == b { 1.0 - f } else { -f })
        .product()
}
