//! PUSH and VISIT-EXCHANGE driven by one table of neighbor choices, with the
//! counters and canonical-walk congestion that bound PUSH by VISIT-EXCHANGE.
//!
//! Both processes read `w_u(1), w_u(2), ...` from a [`ChoiceOracle`]. PUSH
//! vertex `u` uses `w_u(i)` for its `i`-th sample after it got informed. On
//! the walk side:
//!
//! * [`CouplingMode::Even`]: the `i`-th departure from `u` of an agent that
//!   stood on `u` at a round `>= t_u` moves to `w_u(i)`, departures ordered by
//!   `(round, agent)`.
//! * [`CouplingMode::Odd`]: only departures after an even round consume
//!   choices; all other steps come from the independent walk stream.
//! * [`CouplingMode::Independent`]: walks as in the even mode, but PUSH reads
//!   an unrelated oracle. Used as a negative control.

mod congestion;
mod counters;
mod history;
mod verify;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexId};
use crate::protocols::{
    drive_visit, enforce_floor, floor_target, initial_agents, run_push_with, AdditionEvent, AgentConfig, AgentSet,
    ProtocolError, RFloor, Round, TraceOptions, VisitState,
};
use crate::rng::{derive_seed, uniform_neighbor, ChoiceOracle, RngSeed, Role, Streams};

pub use congestion::{congestion, max_congestion_dp, reconstruct_min_chain_walk, CanonicalWalk};
pub use counters::{compute_c_counters, compute_s_sets, verify_tau_leq_c, TauViolation};
pub use history::VisitHistory;
pub use verify::{verify_transcript, VerifyReport};

#[derive(Debug, Error)]
pub enum CouplingError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("transcript corrupt: {0}")]
    TranscriptCorrupt(String),
    #[error("tau bound violated at vertex {}: tau = {:?}, C = {}", .0.vertex, .0.tau, .0.counter)]
    TauViolation(TauViolation),
    #[error("walk to vertex {vertex} at round {round} has congestion {congestion}, counter is {counter}")]
    CongestionMismatch { vertex: VertexId, round: Round, congestion: u64, counter: u64 },
    #[error("counter of vertex {vertex} at round {round} is {counter}, above the maximum congestion {max:?}")]
    AboveMaxCongestion { vertex: VertexId, round: Round, counter: u64, max: Option<u64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingMode {
    Even,
    Odd,
    Independent,
}

impl CouplingMode {
    pub fn name(&self) -> &'static str {
        match self {
            CouplingMode::Even => "even",
            CouplingMode::Odd => "odd",
            CouplingMode::Independent => "independent",
        }
    }

    /// Whether an agent leaving `u` in round `t` takes its step from the
    /// oracle, given `u`'s informing round.
    pub fn consumes(&self, t: Round, vertex_informed: Option<Round>) -> bool {
        let prev = t - 1;
        vertex_informed.is_some_and(|r| r <= prev) && (*self != CouplingMode::Odd || prev.is_multiple_of(2))
    }
}

/// Everything a coupled run produced, self-contained so it can be re-checked
/// from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingTranscript {
    pub mode: CouplingMode,
    pub n: usize,
    pub edges: Vec<(VertexId, VertexId)>,
    pub source: VertexId,
    pub config: AgentConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_floor: Option<RFloor>,
    pub seed: RngSeed,
    pub round_cap: Round,
    pub push_time: Option<Round>,
    pub visitx_time: Option<Round>,
    /// `tau_u`.
    pub push_times: Vec<Option<Round>>,
    /// `t_u`.
    pub visitx_times: Vec<Option<Round>>,
    pub agent_informed_at: Vec<Option<Round>>,
    pub positions: VisitHistory,
    /// Materialized oracle prefix per vertex, shared by both processes
    /// except in independent mode.
    pub oracle_log: Vec<Vec<VertexId>>,
    /// The PUSH oracle of an independent run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub push_oracle_log: Option<Vec<Vec<VertexId>>>,
    /// Oracle entries consumed by agent steps, per vertex.
    pub walk_consumption: Vec<usize>,
    pub s_sets: Vec<Vec<VertexId>>,
    /// `c_counters[t][u] = C_u(t)` for every recorded round.
    pub c_counters: Vec<Vec<u64>>,
    #[serde(default)]
    pub additions: Vec<AdditionEvent>,
}

impl CouplingTranscript {
    pub fn graph(&self) -> Result<Graph, GraphError> {
        Graph::from_edges(self.n, &self.edges)
    }

    /// Both processes finished before the round cap.
    pub fn is_complete(&self) -> bool {
        self.push_time.is_some() && self.visitx_time.is_some()
    }

    /// Last recorded round of VISIT-EXCHANGE.
    pub fn rounds(&self) -> Round {
        self.positions.len() as Round - 1
    }

    /// `C_u(t)`.
    pub fn counter(&self, u: VertexId, t: Round) -> u64 {
        self.c_counters[t as usize][u as usize]
    }
}

pub(crate) fn push_oracle_seed(seed: RngSeed) -> RngSeed {
    derive_seed(seed, Role::Push, 1)
}

pub fn run_coupled_even(
    graph: &Graph,
    source: VertexId,
    config: &AgentConfig,
    seed: RngSeed,
    round_cap: Round,
) -> Result<CouplingTranscript, CouplingError> {
    run_coupled(graph, source, config, seed, round_cap, CouplingMode::Even, None)
}

pub fn run_coupled_odd(
    graph: &Graph,
    source: VertexId,
    config: &AgentConfig,
    seed: RngSeed,
    round_cap: Round,
    r_floor: Option<RFloor>,
) -> Result<CouplingTranscript, CouplingError> {
    run_coupled(graph, source, config, seed, round_cap, CouplingMode::Odd, r_floor)
}

/// Runs VISIT-EXCHANGE with oracle-driven steps, then replays PUSH on the
/// oracle (or on a separate one in independent mode). `r_floor` adds agents
/// after odd rounds as in R-VISIT-EXCHANGE and is only accepted in odd mode.
pub fn run_coupled(
    graph: &Graph,
    source: VertexId,
    config: &AgentConfig,
    seed: RngSeed,
    round_cap: Round,
    mode: CouplingMode,
    r_floor: Option<RFloor>,
) -> Result<CouplingTranscript, CouplingError> {
    if config.lazy {
        return Err(CouplingError::InvalidParameter("coupled runs need non-lazy walks".into()));
    }
    if r_floor.is_some() && mode != CouplingMode::Odd {
        return Err(CouplingError::InvalidParameter("the agent floor is only available in odd mode".into()));
    }
    let target = r_floor.map(|f| floor_target(graph, config.count, f)).transpose()?;
    let n = graph.n();
    let mut streams = Streams::new(seed);
    let agents = initial_agents(graph, source, config, &mut streams)?;
    let mut oracle = ChoiceOracle::new(n, seed);
    let mut consumed = vec![0usize; n];
    let mut additions = Vec::new();
    let walk = &mut streams.walk;
    let mover = |state: &VisitState, t: Round, _: usize, from: VertexId| {
        if mode.consumes(t, state.vertex_at[from as usize]) {
            consumed[from as usize] += 1;
            oracle.next_neighbor_choice(graph, from, consumed[from as usize])
        } else {
            uniform_neighbor(graph, from, walk)
        }
    };
    let hook = |t: Round, agents: &mut AgentSet, state: &mut VisitState| {
        if let Some(target) = target {
            if t % 2 == 1 {
                enforce_floor(graph, t, target, agents, state, &mut additions);
            }
        }
    };
    let opts = TraceOptions { positions: true, visit_counts: false };
    let mut visit = drive_visit(graph, source, agents, mover, hook, round_cap, opts);

    let (push, push_oracle_log) = match mode {
        CouplingMode::Independent => {
            let mut other = ChoiceOracle::new(n, push_oracle_seed(seed));
            (run_push_with(graph, source, &mut other, round_cap)?, Some(other.into_log()))
        }
        _ => (run_push_with(graph, source, &mut oracle, round_cap)?, None),
    };

    let positions = VisitHistory::new(visit.trace.positions.take().expect("positions were recorded"));
    let times = visit.trace.vertex_informed_at;
    let s_sets = compute_s_sets(graph, &positions, &times)?;
    let c_counters = compute_c_counters(&positions, &times, &s_sets)?;
    Ok(CouplingTranscript {
        mode,
        n,
        edges: graph.edges().collect(),
        source,
        config: *config,
        r_floor,
        seed,
        round_cap,
        push_time: push.broadcast_time,
        visitx_time: visit.broadcast_time,
        push_times: push.trace.vertex_informed_at,
        visitx_times: times,
        agent_informed_at: visit.trace.agent_informed_at,
        positions,
        oracle_log: oracle.into_log(),
        push_oracle_log,
        walk_consumption: consumed,
        s_sets,
        c_counters,
        additions,
    })
}

#[cfg(test)]
mod tests;
