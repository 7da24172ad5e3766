#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use walkcast::coupling::VisitHistory;
use walkcast::graph::{Graph, VertexId};

/// Maximum congestion per end vertex over every labeled canonical walk of
/// length `k`, by explicit enumeration.
pub fn brute_force_max_congestion(history: &VisitHistory, source: VertexId, n: usize, k: u32) -> Vec<Option<u64>> {
    fn go(h: &VisitHistory, t: u32, k: u32, at: VertexId, q: u64, best: &mut [Option<u64>]) {
        if t == k {
            let b = &mut best[at as usize];
            *b = Some(b.map_or(q, |x| x.max(q)));
            return;
        }
        let q2 = q + h.visits(t, at) as u64;
        go(h, t + 1, k, at, q2, best);
        let prev = h.row(t);
        let next = h.row(t + 1);
        for g in 0..prev.len() {
            if prev[g] == at {
                go(h, t + 1, k, next[g], q2, best);
            }
        }
    }
    let mut best = vec![None; n];
    go(history, 0, k, source, 0, &mut best);
    best
}

/// A small random connected graph: a random spanning tree plus extra edges.
pub fn random_small_graph(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n as VertexId {
        edges.push((rng.random_range(0..v), v));
    }
    for u in 0..n as VertexId {
        for v in u + 1..n as VertexId {
            if rng.random_bool(0.3) && !edges.contains(&(u, v)) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// `rounds + 1` rows of positions for `agents` walkers that step to a
/// uniform neighbor or stay put.
pub fn random_history(graph: &Graph, agents: usize, rounds: u32, rng: &mut ChaCha8Rng) -> VisitHistory {
    let n = graph.n() as VertexId;
    let mut row: Vec<VertexId> = (0..agents).map(|_| rng.random_range(0..n)).collect();
    let mut rows = vec![row.clone()];
    for _ in 0..rounds {
        for v in row.iter_mut() {
            let nb = graph.neighbors(*v);
            if !nb.is_empty() && !rng.random_bool(0.25) {
                *v = nb[rng.random_range(0..nb.len())];
            }
        }
        rows.push(row.clone());
    }
    VisitHistory::new(rows)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
