use serde::{Deserialize, Serialize};

use super::{CouplingError, CouplingTranscript, VisitHistory};
use crate::graph::{Graph, VertexId};
use crate::protocols::{Round, REMOVED};

/// `S_u`: neighbors `v` with `t_v < t_u` from which some agent moved to `u`
/// in round `t_u`. Sorted ascending; empty for the source and for vertices
/// never informed.
pub fn compute_s_sets(
    graph: &Graph,
    history: &VisitHistory,
    times: &[Option<Round>],
) -> Result<Vec<Vec<VertexId>>, CouplingError> {
    let mut s = vec![Vec::new(); graph.n()];
    let before = |v: VertexId, t: Round| times[v as usize].is_some_and(|r| r < t);
    for t in 1..history.len() as Round {
        for (_, from, to) in history.moves(t) {
            if from == REMOVED || to == REMOVED || from == to {
                continue;
            }
            if times[to as usize] == Some(t) && before(from, t) && graph.has_edge(from, to) {
                s[to as usize].push(from);
            }
        }
    }
    for (u, set) in s.iter_mut().enumerate() {
        set.sort_unstable();
        set.dedup();
        if set.is_empty() && times[u].is_some_and(|t| t > 0) {
            return Err(CouplingError::TranscriptCorrupt(format!("vertex {u} was informed without an informed arrival")));
        }
    }
    Ok(s)
}

/// The counter table `c[t][u] = C_u(t)` for every recorded round:
///
/// * `0` while `t < t_u`, and at `t = t_u = 0`;
/// * `min over S_u of C_v(t_u)` at `t = t_u > 0`;
/// * `C_u(t - 1) + |Z_u(t - 1)|` after that.
pub fn compute_c_counters(
    history: &VisitHistory,
    times: &[Option<Round>],
    s_sets: &[Vec<VertexId>],
) -> Result<Vec<Vec<u64>>, CouplingError> {
    let n = times.len();
    let rounds = history.len();
    let mut by_round: Vec<Vec<usize>> = vec![Vec::new(); rounds];
    for (u, t) in times.iter().enumerate() {
        if let Some(t) = *t {
            if t as usize >= rounds {
                return Err(CouplingError::TranscriptCorrupt(format!("vertex {u} informed at {t}, after the last round")));
            }
            by_round[t as usize].push(u);
        }
    }
    let mut c: Vec<Vec<u64>> = Vec::with_capacity(rounds);
    if rounds == 0 {
        return Ok(c);
    }
    c.push(vec![0; n]);
    for t in 1..rounds {
        let mut row = c[t - 1].clone();
        for &(v, z) in history.occupied(t as Round - 1) {
            if times[v as usize].is_some_and(|r| (r as usize) < t) {
                row[v as usize] += z as u64;
            }
        }
        for &u in &by_round[t] {
            row[u] = s_sets[u]
                .iter()
                .map(|&v| row[v as usize])
                .min()
                .ok_or_else(|| CouplingError::TranscriptCorrupt(format!("S_{u} is empty")))?;
        }
        c.push(row);
    }
    Ok(c)
}

/// A vertex whose PUSH time exceeds its counter at its VISIT-EXCHANGE time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauViolation {
    pub vertex: VertexId,
    /// `None` when PUSH had not informed the vertex by the round cap.
    pub tau: Option<Round>,
    pub counter: u64,
}

/// First vertex (by id) with `tau_u > C_u(t_u)`, if any. Vertices that
/// VISIT-EXCHANGE never informed are not checked.
pub fn verify_tau_leq_c(transcript: &CouplingTranscript) -> Option<TauViolation> {
    (0..transcript.n).find_map(|u| {
        let t = transcript.visitx_times[u]?;
        let counter = transcript.counter(u as VertexId, t);
        let tau = transcript.push_times[u];
        let ok = match tau {
            Some(tau) => tau as u64 <= counter,
            None => counter >= transcript.round_cap as u64,
        };
        (!ok).then_some(TauViolation { vertex: u as VertexId, tau, counter })
    })
}
