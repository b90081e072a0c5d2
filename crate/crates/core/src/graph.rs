//! Simple undirected graphs with sorted edge lists and adjacency lists.

use crate::error::{input, Error, Result};
use crate::rng::RngStream;
use std::collections::VecDeque;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Edges are stored as `(min, max)` pairs in ascending order.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return input(format!("edge ({a}, {b}) out of range for {n} nodes"));
            }
            if a == b {
                return input(format!("self-loop at node {a}"));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        for w in list.windows(2) {
            if w[0] == w[1] {
                return input(format!("duplicate edge ({}, {})", w[0].0, w[0].1));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &list {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for nb in &mut adjacency {
            nb.sort_unstable();
        }
        Ok(Self { n, edges: list, adjacency })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, edges: Vec::new(), adjacency: vec![Vec::new(); n] }
    }

    pub fn path(n: usize) -> Result<Self> {
        if n == 0 {
            return input("path needs at least one node");
        }
        Self::new(n, (1..n).map(|i| (i - 1, i)))
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return input(format!("cycle needs n >= 3, got {n}"));
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn complete(n: usize) -> Result<Self> {
        if n == 0 {
            return input("complete graph needs at least one node");
        }
        Self::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
    }

    /// Node `(r, c)` has index `r * cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return input(format!("grid needs positive dimensions, got {rows}x{cols}"));
        }
        let mut e = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    e.push((v, v + 1));
                }
                if r + 1 < rows {
                    e.push((v, v + cols));
                }
            }
        }
        Self::new(rows * cols, e)
    }

    /// Each pair `i < j` is visited in lexicographic order and kept with probability `p`.
    pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return input(format!("edge probability {p} outside [0, 1]"));
        }
        if n == 0 {
            return input("random graph needs at least one node");
        }
        let mut rng = RngStream::new(seed, 0x4552);
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.unit() < p {
                    e.push((i, j));
                }
            }
        }
        Self::new(n, e)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_index(a, b).is_some()
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&(a.min(b), a.max(b))).ok()
    }

    /// Breadth-first hop distances from `src`; unreachable nodes are `None`.
    pub fn distances_from(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for &w in &self.adjacency[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// Named graph families.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphKind {
    Empty(usize),
    Cycle(usize),
    Path(usize),
    Complete(usize),
    Grid(usize, usize),
    /// `G(n, p)` drawn with the given seed.
    ErdosRenyi {
        n: usize,
        p: f64,
        seed: u64,
    },
}

impl GraphKind {
    pub fn build(&self) -> Result<Graph> {
        match *self {
            GraphKind::Empty(n) => Ok(Graph::empty(n)),
            GraphKind::Cycle(n) => Graph::cycle(n),
            GraphKind::Path(n) => Graph::path(n),
            GraphKind::Complete(n) => Graph::complete(n),
            GraphKind::Grid(r, c) => Graph::grid(r, c),
            GraphKind::ErdosRenyi { n, p, seed } => Graph::erdos_renyi(n, p, seed),
        }
    }

    /// Short label such as `K11`, `C11`, `P5`, `grid2x3` or `G(11,0.3)#7`.
    pub fn label(&self) -> String {
        match *self {
            GraphKind::Empty(n) => format!("E{n}"),
            GraphKind::Cycle(n) => format!("C{n}"),
            GraphKind::Path(n) => format!("P{n}"),
            GraphKind::Complete(n) => format!("K{n}"),
            GraphKind::Grid(r, c) => format!("grid{r}x{c}"),
            GraphKind::ErdosRenyi { n, p, seed } => format!("G({n},{p})#{seed}"),
        }
    }

    /// Parses `empty:N`, `cycle:N`, `path:N`, `complete:N`, `grid:RxC` or `er:N:P:SEED`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |v: &str| v.parse::<usize>().map_err(|_| Error::Input(format!("bad graph size '{v}'")));
        match parts.as_slice() {
            ["empty", n] => Ok(GraphKind::Empty(num(n)?)),
            ["cycle", n] => Ok(GraphKind::Cycle(num(n)?)),
            ["path", n] => Ok(GraphKind::Path(num(n)?)),
            ["complete", n] => Ok(GraphKind::Complete(num(n)?)),
            ["grid", rc] => {
                let (r, c) = rc.split_once('x').ok_or_else(|| Error::Input(format!("bad grid '{rc}'")))?;
                Ok(GraphKind::Grid(num(r)?, num(c)?))
            }
            ["er", n, p, seed] => Ok(GraphKind::ErdosRenyi {
                n: num(n)?,
                p: p.parse().map_err(|_| Error::Input(format!("bad edge probability '{p}'")))?,
                seed: seed.parse().map_err(|_| Error::Input(format!("bad seed '{seed}'")))?,
            }),
            _ => input(format!("unknown graph '{s}'")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_edge_counts() {
        assert_eq!(Graph::cycle(11).unwrap().edges().len(), 11);
        assert_eq!(Graph::complete(11).unwrap().edges().len(), 55);
        assert_eq!(Graph::grid(2, 3).unwrap().edges().len(), 7);
        assert_eq!(Graph::path(4).unwrap().edges().len(), 3);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(Graph::cycle(2).is_err());
        assert!(Graph::erdos_renyi(5, 1.5, 0).is_err());
        assert!(Graph::erdos_renyi(5, -0.1, 0).is_err());
        assert!(Graph::new(3, [(0, 0)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
    }

    #[test]
    fn erdos_renyi_is_seed_deterministic() {
        let a = Graph::erdos_renyi(11, 0.3, 4).unwrap();
        let b = Graph::erdos_renyi(11, 0.3, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn adjacency_matches_edges() {
        let g = Graph::grid(3, 3).unwrap();
        for &(a, b) in g.edges() {
            assert!(g.neighbors(a).contains(&b));
            assert!(g.neighbors(b).contains(&a));
        }
        let total: usize = (0..g.n()).map(|i| g.degree(i)).sum();
        assert_eq!(total, 2 * g.edges().len());
        assert_eq!(g.max_degree(), 4);
    }

    #[test]
    fn cycle_distances() {
        let g = Graph::cycle(10).unwrap();
        let d = g.distances_from(0);
        assert_eq!(d[5], Some(5));
        assert_eq!(d[7], Some(3));
    }
}
