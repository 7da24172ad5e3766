//! Round-synchronous broadcast protocols.
//!
//! All protocols start with the source informed at round 0 and report the
//! first round after which the completion condition holds. Same-round events
//! are processed in ascending agent index, and informing never chains within
//! a round except vertex-to-agent in visit-exchange.

mod push;
mod tweaked;
mod walks;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, VertexId};
use crate::rng::{sample_stationary_vertex, RngSeed, Streams};

pub use push::{run_push, run_push_pull, run_push_with, ChoiceSource, RngChoices};
pub use tweaked::{run_r_visit_exchange, run_t_visit_exchange, AdditionEvent, RemovalEvent, RFloor};
pub use walks::{run_meet_exchange, run_shared_walks, run_visit_exchange, SharedWalkOutcome};

pub(crate) use tweaked::{enforce_floor, floor_target};
pub(crate) use walks::{drive_visit, initial_agents, AgentSet, VisitState, REMOVED};

/// Round number; round 0 is the initial configuration.
pub type Round = u32;

#[derive(Debug, Error, PartialEq)]
pub enum ProtocolError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Where agents start.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    /// Independent draws from the stationary distribution.
    Stationary,
    /// Agent `i` starts at vertex `i`; requires `count == n`.
    OnePerVertex,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    pub count: usize,
    pub placement: Placement,
    pub lazy: bool,
}

impl AgentConfig {
    /// `round(alpha * n)` agents placed from stationarity.
    pub fn stationary(n: usize, alpha: f64, lazy: bool) -> Self {
        AgentConfig { count: (alpha * n as f64).round() as usize, placement: Placement::Stationary, lazy }
    }

    pub fn validate(&self, graph: &Graph) -> Result<(), ProtocolError> {
        if self.placement == Placement::OnePerVertex && self.count != graph.n() {
            return Err(ProtocolError::InvalidParameter(format!(
                "one-per-vertex placement needs {} agents, got {}",
                graph.n(),
                self.count
            )));
        }
        Ok(())
    }
}

/// Which informed-at values define completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompletionKind {
    AllVertices,
    AllAgents,
}

/// Which per-round data a run keeps beyond informing times.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TraceOptions {
    pub positions: bool,
    pub visit_counts: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTrace {
    pub rounds: Round,
    pub vertex_informed_at: Vec<Option<Round>>,
    pub agent_informed_at: Vec<Option<Round>>,
    /// `positions[t][g]`, agent `g`'s vertex at round `t`; `u32::MAX` for a
    /// removed agent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<Vec<VertexId>>>,
    /// `visit_counts[t]`: `(v, |Z_v(t)|)` for every occupied `v`, ascending.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub visit_counts: Option<Vec<Vec<(VertexId, u32)>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BroadcastResult {
    /// `None` when the round cap was hit first.
    pub broadcast_time: Option<Round>,
    pub completion: CompletionKind,
    pub trace: ProtocolTrace,
}

impl BroadcastResult {
    pub fn is_complete(&self) -> bool {
        self.broadcast_time.is_some()
    }
}

/// `64 * n * ceil(log2 n)`, at least 64.
pub fn default_round_cap(n: usize) -> Round {
    let log = crate::graph::log2_ceil(n).max(1) as u64;
    (64 * n as u64 * log).clamp(64, Round::MAX as u64) as Round
}

pub fn place_agents(graph: &Graph, config: &AgentConfig, rng: &mut impl Rng) -> Result<Vec<VertexId>, ProtocolError> {
    config.validate(graph)?;
    Ok(match config.placement {
        Placement::Stationary => (0..config.count).map(|_| sample_stationary_vertex(graph, rng)).collect(),
        Placement::OnePerVertex => (0..config.count as VertexId).collect(),
    })
}

pub(crate) fn check_source(graph: &Graph, source: VertexId) -> Result<(), ProtocolError> {
    if (source as usize) < graph.n() {
        Ok(())
    } else {
        Err(ProtocolError::InvalidParameter(format!("source {source} out of range for n = {}", graph.n())))
    }
}

/// Protocol selector used by experiments and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "kebab-case")]
pub enum Protocol {
    Push,
    PushPull,
    VisitExchange,
    MeetExchange,
    TVisitExchange { gamma: f64 },
    RVisitExchange { floor: RFloor },
}

impl Protocol {
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Push => "push",
            Protocol::PushPull => "push-pull",
            Protocol::VisitExchange => "visit-exchange",
            Protocol::MeetExchange => "meet-exchange",
            Protocol::TVisitExchange { .. } => "t-visit-exchange",
            Protocol::RVisitExchange { .. } => "r-visit-exchange",
        }
    }

    /// Parses the plain protocol names; the tweaked variants take their
    /// default parameters (`gamma = 2e * alpha`, standard floor).
    pub fn parse(name: &str, alpha: f64) -> Option<Protocol> {
        Some(match name {
            "push" => Protocol::Push,
            "push-pull" => Protocol::PushPull,
            "visit-exchange" => Protocol::VisitExchange,
            "meet-exchange" => Protocol::MeetExchange,
            "t-visit-exchange" => Protocol::TVisitExchange { gamma: 2.0 * std::f64::consts::E * alpha },
            "r-visit-exchange" => Protocol::RVisitExchange { floor: RFloor::Standard },
            _ => return None,
        })
    }

    pub fn uses_agents(&self) -> bool {
        !matches!(self, Protocol::Push | Protocol::PushPull)
    }
}

/// Runs one protocol with all randomness derived from `seed`.
pub fn run_protocol(
    graph: &Graph,
    source: VertexId,
    protocol: Protocol,
    agents: &AgentConfig,
    seed: RngSeed,
    round_cap: Round,
) -> Result<BroadcastResult, ProtocolError> {
    let mut streams = Streams::new(seed);
    let opts = TraceOptions::default();
    match protocol {
        Protocol::Push => run_push(graph, source, &mut streams.push, round_cap),
        Protocol::PushPull => run_push_pull(graph, source, &mut streams.push, round_cap),
        Protocol::VisitExchange => run_visit_exchange(graph, source, agents, &mut streams, round_cap, opts),
        Protocol::MeetExchange => run_meet_exchange(graph, source, agents, &mut streams, round_cap, opts),
        Protocol::TVisitExchange { gamma } => {
            run_t_visit_exchange(graph, source, agents, gamma, &mut streams, round_cap, opts).map(|(r, _)| r)
        }
        Protocol::RVisitExchange { floor } => {
            run_r_visit_exchange(graph, source, agents, floor, &mut streams, round_cap, opts).map(|(r, _)| r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_random_regular, generate_star};
    use crate::rng::{stream, Role};

    #[test]
    fn one_per_vertex_is_identity() {
        let g = generate_star(5).unwrap();
        let cfg = AgentConfig { count: 6, placement: Placement::OnePerVertex, lazy: false };
        let pos = place_agents(&g, &cfg, &mut stream(RngSeed(0), Role::Placement, 0)).unwrap();
        assert_eq!(pos, vec![0, 1, 2, 3, 4, 5]);
        let bad = AgentConfig { count: 5, ..cfg };
        assert!(matches!(
            place_agents(&g, &bad, &mut stream(RngSeed(0), Role::Placement, 0)),
            Err(ProtocolError::InvalidParameter(_))
        ));
    }

    #[test]
    fn stationary_placement_uniform_on_regular() {
        let g = generate_random_regular(20, 4, RngSeed(1)).unwrap();
        let cfg = AgentConfig { count: 100_000, placement: Placement::Stationary, lazy: false };
        let pos = place_agents(&g, &cfg, &mut stream(RngSeed(7), Role::Placement, 0)).unwrap();
        let mut counts = [0f64; 20];
        pos.iter().for_each(|&v| counts[v as usize] += 1.0);
        let e = 100_000.0 / 20.0;
        let chi2: f64 = counts.iter().map(|c| (c - e).powi(2) / e).sum();
        // chi-square, 19 dof: P(X > 43.82) = 0.001
        assert!(chi2 < 43.82, "chi2 = {chi2}");
    }

    #[test]
    fn stationary_placement_on_star() {
        let g = generate_star(4).unwrap();
        let cfg = AgentConfig { count: 100_000, placement: Placement::Stationary, lazy: false };
        let pos = place_agents(&g, &cfg, &mut stream(RngSeed(8), Role::Placement, 0)).unwrap();
        let center = pos.iter().filter(|&&v| v == 0).count() as f64;
        assert!((center - 50_000.0).abs() < 3.0 * 25_000f64.sqrt());
    }

    #[test]
    fn round_cap_formula() {
        assert_eq!(default_round_cap(1024), 64 * 1024 * 10);
        assert_eq!(default_round_cap(1), 64);
        assert_eq!(default_round_cap(3), 64 * 3 * 2);
    }
}
