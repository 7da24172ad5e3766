//! Agent-based protocols: visit-exchange and meet-exchange, plus a joint run
//! of both on one set of walks.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    check_source, place_agents, AgentConfig, BroadcastResult, CompletionKind, ProtocolError, ProtocolTrace, Round,
    TraceOptions,
};
use crate::graph::{Graph, VertexId};
use crate::rng::{uniform_neighbor, SimRng, Streams};

/// Marker stored in position history for removed agents.
pub(crate) const REMOVED: VertexId = VertexId::MAX;

#[derive(Clone, Debug)]
pub(crate) struct AgentSet {
    pub pos: Vec<VertexId>,
    pub alive: Vec<bool>,
    pub alive_count: usize,
}

impl AgentSet {
    pub fn new(pos: Vec<VertexId>) -> Self {
        let n = pos.len();
        AgentSet { pos, alive: vec![true; n], alive_count: n }
    }

    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn push(&mut self, v: VertexId) -> usize {
        self.pos.push(v);
        self.alive.push(true);
        self.alive_count += 1;
        self.pos.len() - 1
    }

    pub fn remove(&mut self, g: usize) {
        debug_assert!(self.alive[g]);
        self.alive[g] = false;
        self.alive_count -= 1;
    }

    pub fn live(&self) -> impl Iterator<Item = (usize, VertexId)> + '_ {
        self.pos.iter().enumerate().filter(|(g, _)| self.alive[*g]).map(|(g, &v)| (g, v))
    }

    /// `|Z_v|` for every vertex.
    pub fn occupancy(&self, n: usize) -> Vec<u32> {
        let mut z = vec![0u32; n];
        for (_, v) in self.live() {
            z[v as usize] += 1;
        }
        z
    }

    fn snapshot(&self) -> Vec<VertexId> {
        self.pos.iter().zip(&self.alive).map(|(&v, &a)| if a { v } else { REMOVED }).collect()
    }
}

/// Independent (optionally lazy) simple random walk steps.
pub(crate) struct Mover<'a> {
    pub lazy: bool,
    pub walk: &'a mut SimRng,
    pub coin: &'a mut SimRng,
}

impl Mover<'_> {
    #[inline]
    pub fn step(&mut self, graph: &Graph, v: VertexId) -> VertexId {
        if self.lazy && self.coin.random_bool(0.5) {
            return v;
        }
        uniform_neighbor(graph, v, self.walk)
    }
}

/// Informing state of visit-exchange.
#[derive(Clone, Debug)]
pub(crate) struct VisitState {
    pub vertex_at: Vec<Option<Round>>,
    pub agent_at: Vec<Option<Round>>,
    informed_vertices: usize,
    informed_agents: usize,
}

impl VisitState {
    /// Round 0: the source and every agent on it are informed.
    pub fn new(n: usize, source: VertexId, agents: &AgentSet) -> Self {
        let mut vertex_at = vec![None; n];
        vertex_at[source as usize] = Some(0);
        let agent_at: Vec<_> = agents.pos.iter().map(|&v| (v == source).then_some(0)).collect();
        let informed_agents = agent_at.iter().filter(|a| a.is_some()).count();
        VisitState { vertex_at, agent_at, informed_vertices: 1, informed_agents }
    }

    /// Informing at round `t`, after agents moved.
    pub fn update(&mut self, t: Round, agents: &AgentSet) {
        // Agents informed in an earlier round inform the vertices they visit.
        for (g, v) in agents.live() {
            if self.agent_at[g].is_some_and(|r| r < t) && self.vertex_at[v as usize].is_none() {
                self.vertex_at[v as usize] = Some(t);
                self.informed_vertices += 1;
            }
        }
        // Uninformed agents pick up the rumor from any informed vertex,
        // including one informed in this round.
        for (g, v) in agents.live() {
            if self.agent_at[g].is_none() && self.vertex_at[v as usize].is_some() {
                self.agent_at[g] = Some(t);
                self.informed_agents += 1;
            }
        }
    }

    /// Registers a newly added agent with the given state.
    pub fn add_agent(&mut self, informed: Option<Round>) {
        self.informed_agents += informed.is_some() as usize;
        self.agent_at.push(informed);
    }

    pub fn all_vertices(&self) -> bool {
        self.informed_vertices == self.vertex_at.len()
    }

    pub fn all_agents(&self) -> bool {
        self.informed_agents == self.agent_at.len()
    }
}

/// Informing state of meet-exchange.
#[derive(Clone, Debug)]
struct MeetState {
    source: VertexId,
    agent_at: Vec<Option<Round>>,
    armed: bool,
    stamp: Vec<Round>,
    informed: usize,
    source_round: Option<Round>,
}

impl MeetState {
    fn new(n: usize, source: VertexId, agents: &AgentSet) -> Self {
        let agent_at: Vec<_> = agents.pos.iter().map(|&v| (v == source).then_some(0)).collect();
        let informed = agent_at.iter().filter(|a| a.is_some()).count();
        MeetState {
            source,
            armed: informed == 0,
            source_round: (informed > 0).then_some(0),
            agent_at,
            stamp: vec![Round::MAX; n],
            informed,
        }
    }

    fn update(&mut self, t: Round, agents: &AgentSet) {
        for (g, v) in agents.live() {
            if self.agent_at[g].is_some_and(|r| r < t) {
                self.stamp[v as usize] = t;
            }
        }
        let mut source_fired = false;
        for (g, v) in agents.live() {
            if self.agent_at[g].is_some() {
                continue;
            }
            if self.stamp[v as usize] == t || (self.armed && v == self.source) {
                source_fired |= self.armed && v == self.source;
                self.agent_at[g] = Some(t);
                self.informed += 1;
            }
        }
        if source_fired {
            self.armed = false;
            self.source_round = Some(t);
        }
    }

    fn complete(&self) -> bool {
        self.informed == self.agent_at.len()
    }
}

struct Recorder {
    positions: Option<Vec<Vec<VertexId>>>,
    counts: Option<Vec<Vec<(VertexId, u32)>>>,
}

impl Recorder {
    fn new(opts: TraceOptions) -> Self {
        Recorder { positions: opts.positions.then(Vec::new), counts: opts.visit_counts.then(Vec::new) }
    }

    fn record(&mut self, agents: &AgentSet) {
        if let Some(p) = &mut self.positions {
            p.push(agents.snapshot());
        }
        if let Some(c) = &mut self.counts {
            c.push(sparse_counts(agents));
        }
    }
}

pub(crate) fn sparse_counts(agents: &AgentSet) -> Vec<(VertexId, u32)> {
    let mut vs: Vec<VertexId> = agents.live().map(|(_, v)| v).collect();
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

/// Drives visit-exchange. `mover(state, t, g, from)` picks agent `g`'s
/// vertex at round `t`; `hook(t, agents, state)` runs after informing in
/// every round, including round 0.
pub(crate) fn drive_visit(
    graph: &Graph,
    source: VertexId,
    mut agents: AgentSet,
    mut mover: impl FnMut(&VisitState, Round, usize, VertexId) -> VertexId,
    mut hook: impl FnMut(Round, &mut AgentSet, &mut VisitState),
    round_cap: Round,
    opts: TraceOptions,
) -> BroadcastResult {
    let mut state = VisitState::new(graph.n(), source, &agents);
    let mut rec = Recorder::new(opts);
    hook(0, &mut agents, &mut state);
    rec.record(&agents);
    let mut t: Round = 0;
    while !state.all_vertices() && t < round_cap {
        t += 1;
        for g in 0..agents.len() {
            if agents.alive[g] {
                agents.pos[g] = mover(&state, t, g, agents.pos[g]);
            }
        }
        state.update(t, &agents);
        hook(t, &mut agents, &mut state);
        rec.record(&agents);
    }
    BroadcastResult {
        broadcast_time: state.all_vertices().then_some(t),
        completion: CompletionKind::AllVertices,
        trace: ProtocolTrace {
            rounds: t,
            vertex_informed_at: state.vertex_at,
            agent_informed_at: state.agent_at,
            positions: rec.positions,
            visit_counts: rec.counts,
        },
    }
}

pub(crate) fn initial_agents(
    graph: &Graph,
    source: VertexId,
    config: &AgentConfig,
    streams: &mut Streams,
) -> Result<AgentSet, ProtocolError> {
    check_source(graph, source)?;
    Ok(AgentSet::new(place_agents(graph, config, &mut streams.placement)?))
}

pub fn run_visit_exchange(
    graph: &Graph,
    source: VertexId,
    config: &AgentConfig,
    streams: &mut Streams,
    round_cap: Round,
    opts: TraceOptions,
) -> Result<BroadcastResult, ProtocolError> {
    let agents = initial_agents(graph, source, config, streams)?;
    let mut mv = Mover { lazy: config.lazy, walk: &mut streams.walk, coin: &mut streams.coin };
    Ok(drive_visit(graph, source, agents, |_, _, _, v| mv.step(graph, v), |_, _, _| {}, round_cap, opts))
}

pub fn run_meet_exchange(
    graph: &Graph,
    source: VertexId,
    config: &AgentConfig,
    streams: &mut Streams,
    round_cap: Round,
    opts: TraceOptions,
) -> Result<BroadcastResult, ProtocolError> {
    if config.count == 0 {
        return Err(ProtocolError::InvalidParameter("meet-exchange needs at least one agent".into()));
    }
    let mut agents = initial_agents(graph, source, config, streams)?;
    let mut mv = Mover { lazy: config.lazy, walk: &mut streams.walk, coin: &mut streams.coin };
    let mut state = MeetState::new(graph.n(), source, &agents);
    let mut rec = Recorder::new(opts);
    rec.record(&agents);
    let mut t: Round = 0;
    while !state.complete() && t < round_cap {
        t += 1;
        for v in agents.pos.iter_mut() {
            *v = mv.step(graph, *v);
        }
        state.update(t, &agents);
        rec.record(&agents);
    }
    let mut vertex_informed_at = vec![None; graph.n()];
    vertex_informed_at[source as usize] = Some(0);
    Ok(BroadcastResult {
        broadcast_time: state.complete().then_some(t),
        completion: CompletionKind::AllAgents,
        trace: ProtocolTrace {
            rounds: t,
            vertex_informed_at,
            agent_informed_at: state.agent_at,
            positions: rec.positions,
            visit_counts: rec.counts,
        },
    })
}

/// Visit-exchange and meet-exchange evaluated on the same walk realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharedWalkOutcome {
    /// Visit-exchange: every vertex informed.
    pub visit_all_vertices: Option<Round>,
    /// Visit-exchange: every agent informed.
    pub visit_all_agents: Option<Round>,
    /// Meet-exchange: every agent informed.
    pub meet_all_agents: Option<Round>,
    /// Round in which the source informed agents under meet-exchange.
    pub meet_source_round: Option<Round>,
    pub visit_agent_informed_at: Vec<Option<Round>>,
    pub meet_agent_informed_at: Vec<Option<Round>>,
}

pub fn run_shared_walks(
    graph: &Graph,
    source: VertexId,
    config: &AgentConfig,
    streams: &mut Streams,
    round_cap: Round,
) -> Result<SharedWalkOutcome, ProtocolError> {
    if config.count == 0 {
        return Err(ProtocolError::InvalidParameter("meet-exchange needs at least one agent".into()));
    }
    let mut agents = initial_agents(graph, source, config, streams)?;
    let mut mv = Mover { lazy: config.lazy, walk: &mut streams.walk, coin: &mut streams.coin };
    let mut visit = VisitState::new(graph.n(), source, &agents);
    let mut meet = MeetState::new(graph.n(), source, &agents);
    let mut out = SharedWalkOutcome {
        visit_all_vertices: visit.all_vertices().then_some(0),
        visit_all_agents: visit.all_agents().then_some(0),
        meet_all_agents: meet.complete().then_some(0),
        meet_source_round: None,
        visit_agent_informed_at: Vec::new(),
        meet_agent_informed_at: Vec::new(),
    };
    let mut t: Round = 0;
    while !(visit.all_vertices() && meet.complete()) && t < round_cap {
        t += 1;
        for v in agents.pos.iter_mut() {
            *v = mv.step(graph, *v);
        }
        visit.update(t, &agents);
        meet.update(t, &agents);
        let first = |slot: &mut Option<Round>, done: bool| {
            if slot.is_none() && done {
                *slot = Some(t);
            }
        };
        first(&mut out.visit_all_vertices, visit.all_vertices());
        first(&mut out.visit_all_agents, visit.all_agents());
        first(&mut out.meet_all_agents, meet.complete());
    }
    out.meet_source_round = meet.source_round;
    out.visit_agent_informed_at = visit.agent_at;
    out.meet_agent_informed_at = meet.agent_at;
    Ok(out)
}
