//! Immutable undirected graphs, generators for the benchmark families, and
//! the plain-text edge-list format.
//!
//! Vertex numbering is canonical per family so traces are comparable across
//! runs:
//!
//! * star: center `0`, leaves `1..=leaves`.
//! * double star: centers `0` and `1`, then the leaves of `0`, then the leaves of `1`.
//! * heavy binary tree: heap order (root `0`, children of `i` are `2i+1`, `2i+2`);
//!   the leaves are the last `(n+1)/2` ids.
//! * siamese trees: shared root `0`, first tree at heap ids `1..n-1`, second tree
//!   at `n-1+i` for heap id `i >= 1`.
//! * cycle of stars of cliques: ring `c_i = i`, star leaves `l_{i,j} = m + i*m + j`,
//!   clique vertices `q_{i,j,k} = m + m^2 + (i*m + j)*m + k`.
//! * clique path: clique `i` occupies `i*d..(i+1)*d`; the last vertex of clique `i`
//!   is joined to the first vertex of clique `i+1`.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{stream, Role, RngSeed};

/// Dense zero-based vertex index.
pub type VertexId = u32;

/// Configuration-model restarts allowed before giving up.
pub const RANDOM_REGULAR_RETRY_BUDGET: usize = 1000;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("generation failed: {0}")]
    GenerationFailure(String),
    #[error("load error at line {line}: {msg}")]
    Load { line: usize, msg: String },
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn invalid(msg: impl Into<String>) -> GraphError {
    GraphError::InvalidParameter(msg.into())
}

/// Undirected simple connected graph in compressed adjacency form.
///
/// `neighbors[offsets[v]..offsets[v+1]]` is the strictly increasing neighbor
/// list of `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    family: Option<String>,
}

impl Graph {
    /// Builds a graph from an undirected edge list and validates every
    /// invariant (no loops, no duplicates, connected).
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Invalid("graph needs at least one vertex".into()));
        }
        if n > VertexId::MAX as usize {
            return Err(GraphError::Invalid(format!("{n} vertices exceed the id range")));
        }
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(GraphError::Invalid(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(GraphError::Invalid(format!("self-loop at vertex {u}")));
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0; offsets[n]];
        for &(u, v) in edges {
            neighbors[fill[u as usize]] = v;
            fill[u as usize] += 1;
            neighbors[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for v in 0..n {
            let list = &mut neighbors[offsets[v]..offsets[v + 1]];
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::Invalid(format!("duplicate edge ({v}, {})", w[0])));
            }
        }
        let graph = Graph { offsets, neighbors, family: None };
        if !graph.is_connected() {
            return Err(GraphError::Invalid("graph is disconnected".into()));
        }
        Ok(graph)
    }

    fn tagged(mut self, tag: impl Into<String>) -> Self {
        self.family = Some(tag.into());
        self
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn family(&self) -> Option<&str> {
        self.family.as_deref()
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Start of `v`'s slot range in the adjacency array.
    #[inline]
    pub(crate) fn offset(&self, v: usize) -> usize {
        self.offsets[v]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.n() as VertexId
    }

    /// Edges with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices()
            .flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Common degree when every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degree(0);
        self.vertices().all(|v| self.degree(v) == d).then_some(d)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0 as VertexId]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in self.neighbors(u) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == n
    }

    pub fn is_bipartite(&self) -> bool {
        let mut side = vec![u8::MAX; self.n()];
        side[0] = 0;
        let mut queue = VecDeque::from([0 as VertexId]);
        while let Some(u) = queue.pop_front() {
            for &v in self.neighbors(u) {
                if side[v as usize] == u8::MAX {
                    side[v as usize] = 1 - side[u as usize];
                    queue.push_back(v);
                } else if side[v as usize] == side[u as usize] {
                    return false;
                }
            }
        }
        true
    }

    /// Graphviz rendering, for visual inspection only.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for (u, v) in self.edges() {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }

    /// Edge-list text: header `n m`, then `u v` with `u < v`, one per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 * (self.m() + 1));
        let _ = writeln!(out, "{} {}", self.n(), self.m());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn parse_edge_list(reader: impl BufRead) -> Result<Self, GraphError> {
        let mut lines = reader.lines().enumerate().filter_map(|(i, l)| match l {
            Ok(l) if l.trim().is_empty() => None,
            other => Some((i + 1, other)),
        });
        let load = |line: usize, msg: String| GraphError::Load { line, msg };
        let (hline, header) = lines.next().ok_or_else(|| load(1, "missing `n m` header".into()))?;
        let header = header?;
        let (n, m) = parse_pair::<usize>(&header).map_err(|e| load(hline, e))?;
        let mut edges = Vec::with_capacity(m);
        let mut last_line = hline;
        for (line, text) in lines {
            let text = text?;
            let (u, v) = parse_pair::<VertexId>(&text).map_err(|e| load(line, e))?;
            if u == v {
                return Err(load(line, format!("self-loop at vertex {u}")));
            }
            if u as usize >= n || v as usize >= n {
                return Err(load(line, format!("vertex out of range for n = {n}")));
            }
            edges.push((u.min(v), u.max(v)));
            last_line = line;
        }
        if edges.len() != m {
            return Err(load(last_line, format!("header declares {m} edges, found {}", edges.len())));
        }
        Graph::from_edges(n, &edges).map_err(|e| load(last_line, e.to_string()))
    }

    pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Self, GraphError> {
        let file = fs::File::open(path)?;
        Self::parse_edge_list(BufReader::new(file))
    }

    pub fn save_edge_list(&self, path: impl AsRef<Path>) -> Result<(), GraphError> {
        let mut file = fs::File::create(path)?;
        file.write_all(self.to_edge_list().as_bytes())?;
        Ok(())
    }
}

fn parse_pair<T: std::str::FromStr>(line: &str) -> Result<(T, T), String> {
    let mut it = line.split_whitespace();
    let parse = |tok: Option<&str>| -> Result<T, String> {
        let tok = tok.ok_or_else(|| format!("expected two integers, got {line:?}"))?;
        tok.parse().map_err(|_| format!("not a non-negative integer: {tok:?}"))
    };
    let a = parse(it.next())?;
    let b = parse(it.next())?;
    if it.next().is_some() {
        return Err(format!("trailing tokens in {line:?}"));
    }
    Ok((a, b))
}

pub fn generate_star(leaves: usize) -> Result<Graph, GraphError> {
    if leaves == 0 {
        return Err(invalid("star needs at least one leaf"));
    }
    let edges: Vec<_> = (1..=leaves as VertexId).map(|l| (0, l)).collect();
    Ok(Graph::from_edges(leaves + 1, &edges)?.tagged("star"))
}

pub fn generate_double_star(n: usize) -> Result<Graph, GraphError> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(invalid(format!("double star needs an even n >= 4, got {n}")));
    }
    let per = (n / 2 - 1) as VertexId;
    let mut edges = vec![(0, 1)];
    edges.extend((0..per).map(|j| (0, 2 + j)));
    edges.extend((0..per).map(|j| (1, 2 + per + j)));
    Ok(Graph::from_edges(n, &edges)?.tagged("double-star"))
}

fn complete_tree_height(n: usize) -> Option<u32> {
    let h = (n + 1).trailing_zeros();
    (n >= 3 && (n + 1).is_power_of_two()).then_some(h)
}

/// Edges of a heavy binary tree in heap order, with heap index `i` mapped
/// through `id`.
fn heavy_tree_edges(n: usize, id: impl Fn(usize) -> VertexId, edges: &mut Vec<(VertexId, VertexId)>) {
    for i in 1..n {
        edges.push((id((i - 1) / 2), id(i)));
    }
    let first_leaf = (n - 1) / 2;
    for a in first_leaf..n {
        for b in a + 1..n {
            edges.push((id(a), id(b)));
        }
    }
}

pub fn generate_heavy_binary_tree(n: usize) -> Result<Graph, GraphError> {
    complete_tree_height(n).ok_or_else(|| invalid(format!("heavy binary tree needs n = 2^h - 1 >= 3, got {n}")))?;
    let mut edges = Vec::new();
    heavy_tree_edges(n, |i| i as VertexId, &mut edges);
    Ok(Graph::from_edges(n, &edges)?.tagged("heavy-tree"))
}

pub fn generate_siamese_trees(n: usize) -> Result<Graph, GraphError> {
    complete_tree_height(n).ok_or_else(|| invalid(format!("siamese trees need n = 2^h - 1 >= 3, got {n}")))?;
    let mut edges = Vec::new();
    heavy_tree_edges(n, |i| i as VertexId, &mut edges);
    heavy_tree_edges(n, |i| if i == 0 { 0 } else { (n - 1 + i) as VertexId }, &mut edges);
    Ok(Graph::from_edges(2 * n - 1, &edges)?.tagged("siamese-trees"))
}

pub fn generate_cycle_stars_cliques(m: usize) -> Result<Graph, GraphError> {
    if m < 3 {
        return Err(invalid(format!("cycle of stars of cliques needs m >= 3, got {m}")));
    }
    let ring = |i: usize| i as VertexId;
    let leaf = |i: usize, j: usize| (m + i * m + j) as VertexId;
    let clique = |i: usize, j: usize, k: usize| (m + m * m + (i * m + j) * m + k) as VertexId;
    let mut edges = Vec::new();
    for i in 0..m {
        edges.push((ring(i), ring((i + 1) % m)));
        for j in 0..m {
            edges.push((ring(i), leaf(i, j)));
            for k in 0..m {
                edges.push((leaf(i, j), clique(i, j, k)));
                for k2 in k + 1..m {
                    edges.push((clique(i, j, k), clique(i, j, k2)));
                }
            }
        }
    }
    Ok(Graph::from_edges(m + m * m + m * m * m, &edges)?.tagged("cycle-stars-cliques"))
}

pub fn generate_complete(n: usize) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(invalid(format!("complete graph needs n >= 2, got {n}")));
    }
    let n32 = n as VertexId;
    let edges: Vec<_> = (0..n32).flat_map(|u| (u + 1..n32).map(move |v| (u, v))).collect();
    Ok(Graph::from_edges(n, &edges)?.tagged("complete"))
}

pub fn generate_cycle(n: usize) -> Result<Graph, GraphError> {
    if n < 3 {
        return Err(invalid(format!("cycle needs n >= 3, got {n}")));
    }
    let n32 = n as VertexId;
    let edges: Vec<_> = (0..n32).map(|u| (u, (u + 1) % n32)).collect();
    Ok(Graph::from_edges(n, &edges)?.tagged("cycle"))
}

pub fn generate_clique_path(k: usize, d: usize) -> Result<Graph, GraphError> {
    if k < 2 || d < 2 {
        return Err(invalid(format!("clique path needs k >= 2 cliques of size d >= 2, got k = {k}, d = {d}")));
    }
    let mut edges = Vec::new();
    for c in 0..k {
        let base = c * d;
        for a in 0..d {
            for b in a + 1..d {
                edges.push(((base + a) as VertexId, (base + b) as VertexId));
            }
        }
        if c + 1 < k {
            edges.push(((base + d - 1) as VertexId, (base + d) as VertexId));
        }
    }
    Ok(Graph::from_edges(k * d, &edges)?.tagged("clique-path"))
}

/// Uniform-ish simple connected `d`-regular graph.
///
/// Points are paired one at a time; a pair that would create a loop or a
/// parallel edge is redrawn. When no admissible pair is left, or the finished
/// graph is disconnected, generation restarts from scratch.
pub fn generate_random_regular(n: usize, d: usize, seed: RngSeed) -> Result<Graph, GraphError> {
    if d == 0 || d >= n || !(n * d).is_multiple_of(2) {
        return Err(invalid(format!("no simple connected {d}-regular graph on {n} vertices")));
    }
    if d == 1 && n != 2 {
        return Err(invalid("a 1-regular graph is connected only for n = 2"));
    }
    let mut rng = stream(seed, Role::Generator, 0);
    for _ in 0..RANDOM_REGULAR_RETRY_BUDGET {
        if let Some(edges) = try_pairing(n, d, &mut rng) {
            match Graph::from_edges(n, &edges) {
                Ok(g) => return Ok(g.tagged("regular")),
                Err(GraphError::Invalid(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    Err(GraphError::GenerationFailure(format!(
        "random {d}-regular graph on {n} vertices not found in {RANDOM_REGULAR_RETRY_BUDGET} attempts"
    )))
}

fn try_pairing(n: usize, d: usize, rng: &mut impl Rng) -> Option<Vec<(VertexId, VertexId)>> {
    let mut points: Vec<VertexId> = (0..n as VertexId).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut adj: Vec<Vec<VertexId>> = vec![Vec::with_capacity(d); n];
    let mut edges = Vec::with_capacity(n * d / 2);
    let admissible = |adj: &[Vec<VertexId>], u: VertexId, v: VertexId| u != v && !adj[u as usize].contains(&v);
    while !points.is_empty() {
        let len = points.len();
        let mut found = None;
        for _ in 0..64 {
            let i = rng.random_range(0..len);
            let j = rng.random_range(0..len - 1);
            let j = if j >= i { j + 1 } else { j };
            if admissible(&adj, points[i], points[j]) {
                found = Some((i, j));
                break;
            }
        }
        if found.is_none() {
            // Near the end the pool is small; enumerate admissible pairs and
            // restart if there are none.
            let pairs: Vec<_> = (0..len)
                .flat_map(|i| (i + 1..len).map(move |j| (i, j)))
                .filter(|&(i, j)| admissible(&adj, points[i], points[j]))
                .collect();
            if pairs.is_empty() {
                return None;
            }
            found = Some(pairs[rng.random_range(0..pairs.len())]);
        }
        let (i, j) = found.unwrap();
        let (u, v) = (points[i], points[j]);
        adj[u as usize].push(v);
        adj[v as usize].push(u);
        edges.push((u.min(v), u.max(v)));
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        points.swap_remove(hi);
        points.swap_remove(lo);
    }
    Some(edges)
}

/// Named family with its size parameters, as used by configs and the CLI.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    Star { leaves: usize },
    DoubleStar { n: usize },
    HeavyTree { n: usize },
    SiameseTrees { n: usize },
    CycleStarsCliques { m: usize },
    Regular { n: usize, d: usize },
    CliquePath { k: usize, d: usize },
    Complete { n: usize },
    Cycle { n: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Star { .. } => "star",
            Family::DoubleStar { .. } => "double-star",
            Family::HeavyTree { .. } => "heavy-tree",
            Family::SiameseTrees { .. } => "siamese-trees",
            Family::CycleStarsCliques { .. } => "cycle-stars-cliques",
            Family::Regular { .. } => "regular",
            Family::CliquePath { .. } => "clique-path",
            Family::Complete { .. } => "complete",
            Family::Cycle { .. } => "cycle",
        }
    }

    pub const NAMES: [&'static str; 9] = [
        "star",
        "double-star",
        "heavy-tree",
        "siamese-trees",
        "cycle-stars-cliques",
        "regular",
        "clique-path",
        "complete",
        "cycle",
    ];

    /// The family's primary size parameter (what a sweep varies).
    pub fn size(&self) -> usize {
        match *self {
            Family::Star { leaves } => leaves,
            Family::DoubleStar { n }
            | Family::HeavyTree { n }
            | Family::SiameseTrees { n }
            | Family::Regular { n, .. }
            | Family::Complete { n }
            | Family::Cycle { n } => n,
            Family::CycleStarsCliques { m } => m,
            Family::CliquePath { k, .. } => k,
        }
    }

    /// Same family with the primary size parameter replaced. A regular
    /// family with `d = 0` picks `d = ceil(log2 n)`.
    pub fn with_size(&self, size: usize) -> Family {
        let mut f = self.clone();
        match &mut f {
            Family::Star { leaves } => *leaves = size,
            Family::DoubleStar { n }
            | Family::HeavyTree { n }
            | Family::SiameseTrees { n }
            | Family::Complete { n }
            | Family::Cycle { n } => *n = size,
            Family::Regular { n, .. } => *n = size,
            Family::CycleStarsCliques { m } => *m = size,
            Family::CliquePath { k, .. } => *k = size,
        }
        f
    }

    pub fn build(&self, seed: RngSeed) -> Result<Graph, GraphError> {
        match *self {
            Family::Star { leaves } => generate_star(leaves),
            Family::DoubleStar { n } => generate_double_star(n),
            Family::HeavyTree { n } => generate_heavy_binary_tree(n),
            Family::SiameseTrees { n } => generate_siamese_trees(n),
            Family::CycleStarsCliques { m } => generate_cycle_stars_cliques(m),
            Family::Regular { n, d } => generate_random_regular(n, if d == 0 { log2_ceil(n) } else { d }, seed),
            Family::CliquePath { k, d } => generate_clique_path(k, d),
            Family::Complete { n } => generate_complete(n),
            Family::Cycle { n } => generate_cycle(n),
        }
    }

    /// A vertex of the lowest-numbered leaf for families with leaves,
    /// otherwise `None`.
    pub fn first_leaf(&self) -> Option<VertexId> {
        match *self {
            Family::Star { .. } => Some(1),
            Family::DoubleStar { .. } => Some(2),
            Family::HeavyTree { n } => Some((n.saturating_sub(1) / 2) as VertexId),
            Family::SiameseTrees { n } => Some((n.saturating_sub(1) / 2) as VertexId),
            Family::CycleStarsCliques { m } => Some((m + m * m) as VertexId),
            _ => None,
        }
    }
}

/// `ceil(log2 n)` for `n >= 1`.
pub fn log2_ceil(n: usize) -> usize {
    n.next_power_of_two().trailing_zeros() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_invariants(g: &Graph) {
        let mut degree_sum = 0;
        for u in g.vertices() {
            let list = g.neighbors(u);
            assert!(list.windows(2).all(|w| w[0] < w[1]), "unsorted or duplicate at {u}");
            assert!(!list.contains(&u), "self-loop at {u}");
            for &v in list {
                assert!(g.has_edge(v, u), "asymmetric edge {u}-{v}");
            }
            degree_sum += list.len();
        }
        assert_eq!(degree_sum, 2 * g.m());
        assert!(g.is_connected());
    }

    #[test]
    fn star_shapes() {
        let g = generate_star(4).unwrap();
        assert_eq!((g.n(), g.m(), g.degree(0)), (5, 4, 4));
        assert!((1..5).all(|v| g.degree(v) == 1));
        let k2 = generate_star(1).unwrap();
        assert_eq!((k2.n(), k2.m()), (2, 1));
        let big = generate_star(1000).unwrap();
        assert_eq!(big.vertices().map(|v| big.degree(v)).sum::<usize>(), 2000);
        assert!(matches!(generate_star(0), Err(GraphError::InvalidParameter(_))));
        assert_invariants(&big);
    }

    #[test]
    fn double_star_shapes() {
        let g = generate_double_star(8).unwrap();
        assert_eq!((g.degree(0), g.degree(1)), (4, 4));
        assert!(g.has_edge(0, 1));
        let p = generate_double_star(4).unwrap();
        assert_eq!(p.m(), 3);
        assert_eq!(p.vertices().map(|v| p.degree(v)).collect::<Vec<_>>(), vec![2, 2, 1, 1]);
        assert_eq!(generate_double_star(1024).unwrap().m(), 1023);
        assert!(generate_double_star(7).is_err());
        assert!(generate_double_star(2).is_err());
    }

    #[test]
    fn heavy_tree_shapes() {
        let g = generate_heavy_binary_tree(7).unwrap();
        assert_eq!(g.m(), 12);
        assert_eq!(generate_heavy_binary_tree(3).unwrap(), generate_complete(3).unwrap().tagged("heavy-tree"));
        let big = generate_heavy_binary_tree(1023).unwrap();
        assert_eq!(big.m(), 1022 + 130816);
        assert_invariants(&big);
        for n in [0, 1, 2, 4, 6, 8, 1000] {
            assert!(generate_heavy_binary_tree(n).is_err(), "n = {n}");
        }
    }

    #[test]
    fn siamese_shapes() {
        let g = generate_siamese_trees(7).unwrap();
        assert_eq!((g.n(), g.m(), g.degree(0)), (13, 24, 4));
        assert_eq!(generate_siamese_trees(3).unwrap().n(), 5);
        let big = generate_siamese_trees(511).unwrap();
        assert_eq!(big.n(), 1021);
        assert_invariants(&big);
        assert!(generate_siamese_trees(8).is_err());
    }

    #[test]
    fn cycle_stars_cliques_shapes() {
        let g = generate_cycle_stars_cliques(3).unwrap();
        assert_eq!(g.n(), 39);
        assert!((0..3).all(|c| g.degree(c) == 5));
        let big = generate_cycle_stars_cliques(10).unwrap();
        assert_eq!(big.n(), 1110);
        assert!((10..110).all(|l| big.degree(l) == 11));
        assert!((110..1110).all(|q| big.degree(q) == 10));
        assert_invariants(&big);
        assert!(generate_cycle_stars_cliques(2).is_err());
    }

    #[test]
    fn random_regular_small_cases() {
        let k4 = generate_random_regular(4, 3, RngSeed(1)).unwrap();
        assert_eq!(k4.m(), 6);
        // Any connected 2-regular graph is a single cycle.
        for seed in 0..20 {
            let c6 = generate_random_regular(6, 2, RngSeed(seed)).unwrap();
            assert_eq!(c6.regular_degree(), Some(2));
            assert_invariants(&c6);
        }
        assert!(matches!(generate_random_regular(5, 3, RngSeed(0)), Err(GraphError::InvalidParameter(_))));
        assert!(generate_random_regular(4, 4, RngSeed(0)).is_err());
    }

    #[test]
    fn random_regular_large_degree_exact() {
        let g = generate_random_regular(1 << 12, 12, RngSeed(3)).unwrap();
        assert_eq!(g.regular_degree(), Some(12));
        assert_invariants(&g);
    }

    #[test]
    fn random_regular_is_deterministic() {
        let a = generate_random_regular(200, 7 + 1, RngSeed(9)).unwrap();
        let b = generate_random_regular(200, 8, RngSeed(9)).unwrap();
        assert_eq!(a.to_edge_list(), b.to_edge_list());
        let c = generate_random_regular(200, 8, RngSeed(10)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn clique_path_join_rule() {
        let p = generate_clique_path(2, 2).unwrap();
        assert_eq!(p.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2), (2, 3)]);
        let g = generate_clique_path(3, 4).unwrap();
        assert_invariants(&g);
        assert!(!g.has_edge(0, 11));
        let degrees: Vec<_> = g.vertices().map(|v| g.degree(v)).collect();
        assert_eq!(degrees, vec![3, 3, 3, 4, 4, 3, 3, 4, 4, 3, 3, 3]);
        assert!(generate_clique_path(1, 3).is_err());
    }

    #[test]
    fn baselines() {
        assert_eq!(generate_complete(3).unwrap().edges().collect::<Vec<_>>(), generate_cycle(3).unwrap().edges().collect::<Vec<_>>());
        assert_eq!(generate_complete(10).unwrap().m(), 45);
        assert_eq!(generate_cycle(9).unwrap().regular_degree(), Some(2));
        assert!(generate_complete(1).is_err());
        assert!(generate_cycle(2).is_err());
    }

    #[test]
    fn edge_list_rejects_bad_input() {
        let parse = |s: &str| Graph::parse_edge_list(s.as_bytes());
        assert!(matches!(parse("2 1\n0 0\n"), Err(GraphError::Load { line: 2, .. })));
        assert!(matches!(parse("4 2\n0 1\n2 3\n"), Err(GraphError::Load { .. })));
        assert!(matches!(parse("3 3\n0 1\n1 2\n1 0\n"), Err(GraphError::Load { .. })));
        assert!(matches!(parse("3 2\n0 1\n"), Err(GraphError::Load { .. })));
        assert!(matches!(parse("3 2\n0 x\n1 2\n"), Err(GraphError::Load { line: 2, .. })));
        assert!(parse("").is_err());
        let g = parse("3 2\n0 1\n2 1\n").unwrap();
        assert_eq!(g.to_edge_list(), "3 2\n0 1\n1 2\n");
    }

    #[test]
    fn single_vertex_graph() {
        let g = parse_single();
        assert_eq!((g.n(), g.m()), (1, 0));
        fn parse_single() -> Graph {
            Graph::parse_edge_list("1 0\n".as_bytes()).unwrap()
        }
    }

    #[test]
    fn bipartite_detection() {
        assert!(generate_star(5).unwrap().is_bipartite());
        assert!(generate_cycle(6).unwrap().is_bipartite());
        assert!(!generate_cycle(7).unwrap().is_bipartite());
        assert!(!generate_heavy_binary_tree(7).unwrap().is_bipartite());
    }
}
