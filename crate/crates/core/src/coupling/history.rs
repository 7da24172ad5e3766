use serde::{Deserialize, Serialize};

use crate::graph::VertexId;
use crate::protocols::Round;

/// Agent positions per round, `rows[t][g] = x_g(t)`. Rows may grow when
/// agents are added; an agent exists from the first row that has its index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<Vec<VertexId>>", into = "Vec<Vec<VertexId>>")]
pub struct VisitHistory {
    rows: Vec<Vec<VertexId>>,
    counts: Vec<Vec<(VertexId, u32)>>,
}

impl From<Vec<Vec<VertexId>>> for VisitHistory {
    fn from(rows: Vec<Vec<VertexId>>) -> Self {
        VisitHistory::new(rows)
    }
}

impl From<VisitHistory> for Vec<Vec<VertexId>> {
    fn from(h: VisitHistory) -> Self {
        h.rows
    }
}

impl VisitHistory {
    pub fn new(rows: Vec<Vec<VertexId>>) -> Self {
        let counts = rows.iter().map(|r| sparse(r)).collect();
        VisitHistory { rows, counts }
    }

    pub fn rows(&self) -> &[Vec<VertexId>] {
        &self.rows
    }

    /// Number of recorded rounds (`last round + 1`).
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, t: Round) -> &[VertexId] {
        &self.rows[t as usize]
    }

    /// `|Z_v(t)|`.
    pub fn visits(&self, t: Round, v: VertexId) -> u32 {
        let c = &self.counts[t as usize];
        c.binary_search_by_key(&v, |&(w, _)| w).map_or(0, |i| c[i].1)
    }

    /// Occupied vertices at round `t` with their counts, ascending.
    pub fn occupied(&self, t: Round) -> &[(VertexId, u32)] {
        &self.counts[t as usize]
    }

    /// Agents that moved `from -> to` between rounds `t - 1` and `t`, in
    /// ascending order. Requires `t >= 1`.
    pub fn movers(&self, t: Round, from: VertexId, to: VertexId) -> impl Iterator<Item = usize> + '_ {
        let prev = &self.rows[t as usize - 1];
        let cur = &self.rows[t as usize];
        (0..prev.len()).filter(move |&g| prev[g] == from && cur[g] == to)
    }

    /// `(agent, x_g(t-1), x_g(t))` for every agent present in both rows.
    pub fn moves(&self, t: Round) -> impl Iterator<Item = (usize, VertexId, VertexId)> + '_ {
        let prev = &self.rows[t as usize - 1];
        let cur = &self.rows[t as usize];
        prev.iter().zip(cur).enumerate().map(|(g, (&a, &b))| (g, a, b))
    }
}

fn sparse(row: &[VertexId]) -> Vec<(VertexId, u32)> {
    let mut vs: Vec<VertexId> = row.iter().copied().filter(|&v| v != VertexId::MAX).collect();
    vs.sort_unstable();
    let mut out: Vec<(VertexId, u32)> = Vec::new();
    for v in vs {
        match out.last_mut() {
            Some((w, c)) if *w == v => *c += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}
