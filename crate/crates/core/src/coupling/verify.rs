use serde::{Deserialize, Serialize};

use super::{
    compute_c_counters, compute_s_sets, max_congestion_dp, push_oracle_seed, reconstruct_min_chain_walk,
    verify_tau_leq_c, CouplingError, CouplingMode, CouplingTranscript,
};
use crate::graph::VertexId;
use crate::protocols::{place_agents, run_push_with, Round, REMOVED};
use crate::rng::{ChoiceOracle, Streams};

/// What [`verify_transcript`] checked.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub rounds: Round,
    /// Whether the `tau <= C` bound was checked (even mode only).
    pub tau_bound_checked: bool,
    /// Number of `(u, t)` pairs whose reconstructed walk matched `C_u(t)`.
    pub walks_checked: u64,
    pub oracle_entries: u64,
}

/// Re-derives every part of a transcript from its seed and positions and
/// checks the coupling invariants. Returns the first failure.
pub fn verify_transcript(tr: &CouplingTranscript) -> Result<VerifyReport, CouplingError> {
    let corrupt = |msg: String| Err(CouplingError::TranscriptCorrupt(msg));
    let graph = tr.graph()?;
    let n = graph.n();
    if tr.source as usize >= n {
        return corrupt(format!("source {} out of range", tr.source));
    }
    for (name, len) in [
        ("push_times", tr.push_times.len()),
        ("visitx_times", tr.visitx_times.len()),
        ("oracle_log", tr.oracle_log.len()),
        ("walk_consumption", tr.walk_consumption.len()),
        ("s_sets", tr.s_sets.len()),
    ] {
        if len != n {
            return corrupt(format!("{name} has {len} entries for {n} vertices"));
        }
    }
    let history = &tr.positions;
    if history.is_empty() {
        return corrupt("no recorded rounds".into());
    }
    let last = tr.rounds();
    if last > tr.round_cap {
        return corrupt(format!("{last} rounds recorded with a cap of {}", tr.round_cap));
    }

    let initial = place_agents(&graph, &tr.config, &mut Streams::new(tr.seed).placement)?;
    if history.row(0) != initial.as_slice() {
        return corrupt("initial positions differ from the seeded placement".into());
    }

    // Agent steps and VISIT-EXCHANGE informing times.
    let mut vertex_at: Vec<Option<Round>> = vec![None; n];
    vertex_at[tr.source as usize] = Some(0);
    let mut agent_at: Vec<Option<Round>> = history.row(0).iter().map(|&v| (v == tr.source).then_some(0)).collect();
    let mut additions = tr.additions.iter();
    let mut oracle = ChoiceOracle::new(n, tr.seed);
    let mut consumed = vec![0usize; n];
    for t in 1..=last {
        let (prev, cur) = (history.row(t - 1), history.row(t));
        if cur.len() < prev.len() {
            return corrupt(format!("agents disappeared in round {t}"));
        }
        for (g, (&a, &b)) in prev.iter().zip(cur).enumerate() {
            if a == REMOVED || b == REMOVED || !graph.has_edge(a, b) {
                return corrupt(format!("agent {g} moved {a} -> {b} in round {t}"));
            }
            if tr.mode.consumes(t, vertex_at[a as usize]) {
                consumed[a as usize] += 1;
                let w = oracle.next_neighbor_choice(&graph, a, consumed[a as usize]);
                if w != b {
                    return corrupt(format!(
                        "departure {} from {a} went to {b}, the oracle says {w}",
                        consumed[a as usize]
                    ));
                }
            }
        }
        for (g, &v) in cur.iter().enumerate().take(prev.len()) {
            if agent_at[g].is_some_and(|r| r < t) && vertex_at[v as usize].is_none() {
                vertex_at[v as usize] = Some(t);
            }
        }
        for (g, &v) in cur.iter().enumerate().take(prev.len()) {
            if agent_at[g].is_none() && vertex_at[v as usize].is_some() {
                agent_at[g] = Some(t);
            }
        }
        for (g, &v) in cur.iter().enumerate().skip(prev.len()) {
            match additions.next() {
                Some(e) if e.round == t && e.agent == g && e.agent_vertex == v => {}
                _ => return corrupt(format!("agent {g} appeared in round {t} without a matching addition")),
            }
            if tr.r_floor.is_none() || t % 2 == 0 {
                return corrupt(format!("agent {g} added in round {t}"));
            }
            agent_at.push(vertex_at[v as usize].map(|_| t));
        }
    }
    if additions.next().is_some() {
        return corrupt("addition events beyond the recorded rounds".into());
    }
    if vertex_at != tr.visitx_times {
        return corrupt("VISIT-EXCHANGE informing times do not replay".into());
    }
    if agent_at != tr.agent_informed_at {
        return corrupt("agent informing times do not replay".into());
    }
    let visit_done = vertex_at.iter().all(|t| t.is_some());
    if tr.visitx_time != visit_done.then_some(last) || (!visit_done && last != tr.round_cap) {
        return corrupt("VISIT-EXCHANGE completion does not replay".into());
    }
    if consumed != tr.walk_consumption {
        return corrupt("walk oracle consumption does not replay".into());
    }

    // PUSH on the same oracle (or the independent one).
    let (push, push_log) = if tr.mode == CouplingMode::Independent {
        let mut other = ChoiceOracle::new(n, push_oracle_seed(tr.seed));
        (run_push_with(&graph, tr.source, &mut other, tr.round_cap)?, Some(other.into_log()))
    } else {
        (run_push_with(&graph, tr.source, &mut oracle, tr.round_cap)?, None)
    };
    if push.trace.vertex_informed_at != tr.push_times || push.broadcast_time != tr.push_time {
        return corrupt("PUSH informing times do not replay on the oracle".into());
    }
    if push_log != tr.push_oracle_log {
        return corrupt("PUSH oracle log does not replay".into());
    }
    let oracle_log = oracle.into_log();
    if oracle_log != tr.oracle_log {
        return corrupt("oracle log does not replay".into());
    }

    // Counters.
    let s_sets = compute_s_sets(&graph, history, &tr.visitx_times)?;
    if s_sets != tr.s_sets {
        return corrupt("S sets do not match the positions".into());
    }
    if tr.s_sets.iter().enumerate().any(|(u, s)| s.iter().any(|&v| !graph.has_edge(u as VertexId, v))) {
        return corrupt("S set contains a non-neighbor".into());
    }
    let c = compute_c_counters(history, &tr.visitx_times, &s_sets)?;
    if c != tr.c_counters {
        return corrupt("C counters do not match the recursion".into());
    }
    let tau_bound_checked = tr.mode == CouplingMode::Even;
    if tau_bound_checked {
        if let Some(v) = verify_tau_leq_c(tr) {
            return Err(CouplingError::TauViolation(v));
        }
    }

    // Walks, the congestion maximum and monotonicity.
    let dp = max_congestion_dp(history, tr.source, n, last);
    let mut walks_checked = 0;
    for u in graph.vertices() {
        let Some(tu) = tr.visitx_times[u as usize] else { continue };
        for t in tu..=last {
            let counter = tr.counter(u, t);
            if t > tu && counter < tr.counter(u, t - 1) {
                return corrupt(format!("C_{u} decreases at round {t}"));
            }
            let max = dp[t as usize][u as usize];
            if max.is_none_or(|m| counter > m) {
                return Err(CouplingError::AboveMaxCongestion { vertex: u, round: t, counter, max });
            }
            reconstruct_min_chain_walk(tr, u, t)?;
            walks_checked += 1;
        }
    }
    Ok(VerifyReport {
        rounds: last,
        tau_bound_checked,
        walks_checked,
        oracle_entries: oracle_log.iter().map(|l| l.len() as u64).sum(),
    })
}
