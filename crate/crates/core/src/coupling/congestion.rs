use serde::{Deserialize, Serialize};

use super::{CouplingError, CouplingTranscript, VisitHistory};
use crate::graph::VertexId;
use crate::protocols::{Round, REMOVED};

/// A walk `theta_0 = s, ..., theta_k` that in each round stays put or
/// follows an agent leaving its current vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalWalk {
    pub vertices: Vec<VertexId>,
    /// `steps[t - 1]`: the agent followed into `theta_t`, `None` for a stay.
    pub steps: Vec<Option<usize>>,
    pub congestion: u64,
}

impl CanonicalWalk {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// `Q(theta) = sum over t < k of |Z_{theta_t}(t)|`.
pub fn congestion(history: &VisitHistory, vertices: &[VertexId]) -> u64 {
    let k = vertices.len().saturating_sub(1);
    (0..k).map(|t| history.visits(t as Round, vertices[t]) as u64).sum()
}

/// The walk that follows the argmin chain through the `S` sets from `u`
/// back to the source (lowest id among equal counters), waits at each chain
/// vertex until the next one is informed and pads with stays up to round
/// `t`. Fails unless its congestion equals `C_u(t)`.
pub fn reconstruct_min_chain_walk(
    transcript: &CouplingTranscript,
    u: VertexId,
    t: Round,
) -> Result<CanonicalWalk, CouplingError> {
    let corrupt = |msg: String| CouplingError::TranscriptCorrupt(msg);
    let times = &transcript.visitx_times;
    let tu = times
        .get(u as usize)
        .copied()
        .flatten()
        .ok_or_else(|| corrupt(format!("vertex {u} is not informed")))?;
    if t < tu || t > transcript.rounds() {
        return Err(CouplingError::InvalidParameter(format!(
            "round {t} outside [{tu}, {}] for vertex {u}",
            transcript.rounds()
        )));
    }

    let mut chain = vec![u];
    let mut cur = u;
    while cur != transcript.source {
        let tc = times[cur as usize].expect("chain vertices are informed");
        let prev = transcript.s_sets[cur as usize]
            .iter()
            .copied()
            .min_by_key(|&v| (transcript.counter(v, tc), v))
            .ok_or_else(|| corrupt(format!("S_{cur} is empty")))?;
        let tp = times[prev as usize].ok_or_else(|| corrupt(format!("vertex {prev} in S_{cur} is not informed")))?;
        if tp >= tc {
            return Err(corrupt(format!("vertex {prev} in S_{cur} was informed at {tp}, not before {tc}")));
        }
        if transcript.counter(prev, tc) != transcript.counter(cur, tc) {
            return Err(corrupt(format!("C_{cur}({tc}) is not the minimum over S_{cur}")));
        }
        chain.push(prev);
        cur = prev;
    }
    chain.reverse();

    let history = &transcript.positions;
    let mut vertices = Vec::with_capacity(t as usize + 1);
    let mut steps = Vec::with_capacity(t as usize);
    vertices.push(transcript.source);
    let mut next = 1;
    for r in 1..=t {
        let here = *vertices.last().unwrap();
        if next < chain.len() && times[chain[next] as usize] == Some(r) {
            let to = chain[next];
            let g = history
                .movers(r, here, to)
                .next()
                .ok_or_else(|| corrupt(format!("no agent moved {here} -> {to} in round {r}")))?;
            vertices.push(to);
            steps.push(Some(g));
            next += 1;
        } else {
            vertices.push(here);
            steps.push(None);
        }
    }
    let q = congestion(history, &vertices);
    let c = transcript.counter(u, t);
    if q != c {
        return Err(CouplingError::CongestionMismatch { vertex: u, round: t, congestion: q, counter: c });
    }
    Ok(CanonicalWalk { vertices, steps, congestion: q })
}

/// `max_q[t][v]`: the largest congestion of a canonical walk of length `t`
/// ending at `v`, `None` if no such walk exists, for `t = 0..=k`.
pub fn max_congestion_dp(history: &VisitHistory, source: VertexId, n: usize, k: Round) -> Vec<Vec<Option<u64>>> {
    assert!((k as usize) < history.len().max(1), "history ends before round {k}");
    let mut table = Vec::with_capacity(k as usize + 1);
    let mut cur = vec![None; n];
    cur[source as usize] = Some(0u64);
    table.push(cur);
    for t in 1..=k {
        let prev = &table[t as usize - 1];
        let mut next: Vec<Option<u64>> = vec![None; n];
        for v in 0..n {
            if let Some(q) = prev[v] {
                next[v] = Some(q + history.visits(t - 1, v as VertexId) as u64);
            }
        }
        for (_, from, to) in history.moves(t) {
            if from == REMOVED || to == REMOVED {
                continue;
            }
            if let Some(q) = prev[from as usize] {
                let q = q + history.visits(t - 1, from) as u64;
                let slot = &mut next[to as usize];
                *slot = Some(slot.map_or(q, |x| x.max(q)));
            }
        }
        table.push(next);
    }
    table
}
