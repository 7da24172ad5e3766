use rand::Rng;

use super::{check_source, BroadcastResult, CompletionKind, ProtocolError, ProtocolTrace, Round};
use crate::graph::{Graph, VertexId};
use crate::rng::{uniform_neighbor, ChoiceOracle};

/// Source of the neighbor that vertex `u` samples for the `i`-th time after
/// it got informed.
pub trait ChoiceSource {
    fn choose(&mut self, graph: &Graph, u: VertexId, i: usize) -> VertexId;
}

impl ChoiceSource for ChoiceOracle {
    fn choose(&mut self, graph: &Graph, u: VertexId, i: usize) -> VertexId {
        self.next_neighbor_choice(graph, u, i)
    }
}

/// Fresh uniform draws that ignore the sample index.
pub struct RngChoices<'a, R>(pub &'a mut R);

impl<R: Rng> ChoiceSource for RngChoices<'_, R> {
    fn choose(&mut self, graph: &Graph, u: VertexId, _i: usize) -> VertexId {
        uniform_neighbor(graph, u, self.0)
    }
}

pub fn run_push(graph: &Graph, source: VertexId, rng: &mut impl Rng, round_cap: Round) -> Result<BroadcastResult, ProtocolError> {
    run_push_with(graph, source, &mut RngChoices(rng), round_cap)
}

/// PUSH driven by an arbitrary choice source. Vertex `u` samples
/// `choose(u, t - tau_u)` in round `t`.
///
/// A vertex whose neighbors are all informed is skipped: its samples cannot
/// change the outcome, and with an indexed source the skipped indices are
/// simply never requested.
pub fn run_push_with(
    graph: &Graph,
    source: VertexId,
    choices: &mut impl ChoiceSource,
    round_cap: Round,
) -> Result<BroadcastResult, ProtocolError> {
    check_source(graph, source)?;
    let n = graph.n();
    let mut informed_at: Vec<Option<Round>> = vec![None; n];
    let mut uninformed_nbrs: Vec<u32> = graph.vertices().map(|v| graph.degree(v) as u32).collect();
    informed_at[source as usize] = Some(0);
    let mut informed = 1;
    for &w in graph.neighbors(source) {
        uninformed_nbrs[w as usize] -= 1;
    }
    let mut active: Vec<VertexId> = if uninformed_nbrs[source as usize] > 0 { vec![source] } else { Vec::new() };
    let mut fresh = Vec::new();
    let mut round: Round = 0;
    while informed < n && round < round_cap {
        round += 1;
        for &u in &active {
            let i = (round - informed_at[u as usize].unwrap()) as usize;
            let v = choices.choose(graph, u, i);
            if informed_at[v as usize].is_none() {
                informed_at[v as usize] = Some(round);
                fresh.push(v);
            }
        }
        informed += fresh.len();
        for &v in &fresh {
            for &w in graph.neighbors(v) {
                uninformed_nbrs[w as usize] -= 1;
            }
        }
        active.append(&mut fresh);
        active.retain(|&u| uninformed_nbrs[u as usize] > 0);
    }
    Ok(finish(informed == n, round, informed_at))
}

pub fn run_push_pull(graph: &Graph, source: VertexId, rng: &mut impl Rng, round_cap: Round) -> Result<BroadcastResult, ProtocolError> {
    check_source(graph, source)?;
    let n = graph.n();
    let mut informed_at: Vec<Option<Round>> = vec![None; n];
    informed_at[source as usize] = Some(0);
    let mut informed = 1;
    let mut round: Round = 0;
    let before = |at: Option<Round>, t: Round| at.is_some_and(|r| r < t);
    while informed < n && round < round_cap {
        round += 1;
        for u in graph.vertices() {
            let v = uniform_neighbor(graph, u, rng);
            let (iu, iv) = (before(informed_at[u as usize], round), before(informed_at[v as usize], round));
            let newly = match (iu, iv) {
                (true, false) => v,
                (false, true) => u,
                _ => continue,
            };
            if informed_at[newly as usize].is_none() {
                informed_at[newly as usize] = Some(round);
                informed += 1;
            }
        }
    }
    Ok(finish(informed == n, round, informed_at))
}

fn finish(complete: bool, rounds: Round, vertex_informed_at: Vec<Option<Round>>) -> BroadcastResult {
    BroadcastResult {
        broadcast_time: complete.then_some(rounds),
        completion: CompletionKind::AllVertices,
        trace: ProtocolTrace { rounds, vertex_informed_at, ..Default::default() },
    }
}
