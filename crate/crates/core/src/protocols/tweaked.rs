//! Visit-exchange variants that keep the number of agents around every
//! vertex inside a band.
//!
//! With `N(u) = sum over v in Γ(u) of |Z_v(t)|`:
//!
//! * the capped variant removes agents after every round until
//!   `N(u) <= gamma * d` for all `u`. Greedy rule: take the vertex with the
//!   largest excess (lowest id on ties) and remove the highest-indexed agent
//!   located in its neighborhood.
//! * the floored variant adds agents after every odd round until
//!   `N(u) >= floor * d` for all `u`. Greedy rule: scan vertices in id order
//!   and put the missing agents on the lowest-indexed neighbor of the
//!   deficient vertex; a new agent takes that vertex's informed state.
//!
//! Neither rule is guaranteed set-minimal.

use serde::{Deserialize, Serialize};

use super::walks::{drive_visit, initial_agents, AgentSet, Mover, VisitState};
use super::{AgentConfig, BroadcastResult, ProtocolError, Round, TraceOptions};
use crate::graph::{Graph, VertexId};
use crate::rng::Streams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalEvent {
    pub round: Round,
    /// Vertex whose neighborhood exceeded the cap.
    pub vertex: VertexId,
    pub agent: usize,
    /// Where the removed agent stood.
    pub agent_vertex: VertexId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdditionEvent {
    pub round: Round,
    /// Vertex whose neighborhood fell below the floor.
    pub vertex: VertexId,
    pub agent: usize,
    /// Where the new agent was placed.
    pub agent_vertex: VertexId,
}

/// Per-degree floor of the floored variant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RFloor {
    /// `|A| / (2n)` with `|A|` the initial agent count.
    Standard,
    /// Explicit agents-per-neighbor floor.
    PerDegree(f64),
}

fn require_regular(graph: &Graph) -> Result<usize, ProtocolError> {
    match graph.regular_degree() {
        Some(d) if d >= 1 && graph.n() >= 2 => Ok(d),
        _ => Err(ProtocolError::InvalidParameter("tweaked visit-exchange needs a regular graph with n >= 2".into())),
    }
}

/// `N(u)` for every vertex given occupancies `z`.
fn neighborhood_loads(graph: &Graph, z: &[u32]) -> Vec<u64> {
    graph.vertices().map(|u| graph.neighbors(u).iter().map(|&v| z[v as usize] as u64).sum()).collect()
}

pub fn run_t_visit_exchange(
    graph: &Graph,
    source: VertexId,
    config: &AgentConfig,
    gamma: f64,
    streams: &mut Streams,
    round_cap: Round,
    opts: TraceOptions,
) -> Result<(BroadcastResult, Vec<RemovalEvent>), ProtocolError> {
    let d = require_regular(graph)?;
    let min_gamma = 2.0 * std::f64::consts::E * config.count as f64 / graph.n() as f64;
    if !(gamma >= min_gamma) {
        return Err(ProtocolError::InvalidParameter(format!("gamma must be at least 2e|A|/n = {min_gamma:.4}, got {gamma}")));
    }
    let cap = gamma * d as f64;
    let agents = initial_agents(graph, source, config, streams)?;
    let mut mv = Mover { lazy: config.lazy, walk: &mut streams.walk, coin: &mut streams.coin };
    let mut log = Vec::new();
    let hook = |t: Round, agents: &mut AgentSet, _: &mut VisitState| enforce_cap(graph, t, cap, agents, &mut log);
    let result = drive_visit(graph, source, agents, |_, _, _, v| mv.step(graph, v), hook, round_cap, opts);
    Ok((result, log))
}

fn enforce_cap(graph: &Graph, t: Round, cap: f64, agents: &mut AgentSet, log: &mut Vec<RemovalEvent>) {
    let mut z = agents.occupancy(graph.n());
    let mut load = neighborhood_loads(graph, &z);
    let excess = |l: u64| l as f64 - cap;
    if load.iter().all(|&l| excess(l) <= 0.0) {
        return;
    }
    loop {
        let Some((u, _)) = load
            .iter()
            .enumerate()
            .filter(|(_, &l)| excess(l) > 0.0)
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        else {
            break;
        };
        let u = u as VertexId;
        let g = (0..agents.len())
            .rev()
            .find(|&g| agents.alive[g] && graph.has_edge(u, agents.pos[g]))
            .expect("a vertex over its cap has agents around it");
        let w = agents.pos[g];
        agents.remove(g);
        z[w as usize] -= 1;
        for &x in graph.neighbors(w) {
            load[x as usize] -= 1;
        }
        log.push(RemovalEvent { round: t, vertex: u, agent: g, agent_vertex: w });
    }
}

pub fn run_r_visit_exchange(
    graph: &Graph,
    source: VertexId,
    config: &AgentConfig,
    floor: RFloor,
    streams: &mut Streams,
    round_cap: Round,
    opts: TraceOptions,
) -> Result<(BroadcastResult, Vec<AdditionEvent>), ProtocolError> {
    let target = floor_target(graph, config.count, floor)?;
    let agents = initial_agents(graph, source, config, streams)?;
    let mut mv = Mover { lazy: config.lazy, walk: &mut streams.walk, coin: &mut streams.coin };
    let mut log = Vec::new();
    let hook = |t: Round, agents: &mut AgentSet, state: &mut VisitState| {
        if t % 2 == 1 {
            enforce_floor(graph, t, target, agents, state, &mut log)
        }
    };
    let result = drive_visit(graph, source, agents, |_, _, _, v| mv.step(graph, v), hook, round_cap, opts);
    Ok((result, log))
}

/// `floor * d` for a regular graph.
pub(crate) fn floor_target(graph: &Graph, count: usize, floor: RFloor) -> Result<f64, ProtocolError> {
    let d = require_regular(graph)?;
    let per_degree = match floor {
        RFloor::Standard => count as f64 / (2.0 * graph.n() as f64),
        RFloor::PerDegree(f) => f,
    };
    Ok(per_degree * d as f64)
}

pub(crate) fn enforce_floor(
    graph: &Graph,
    t: Round,
    target: f64,
    agents: &mut AgentSet,
    state: &mut VisitState,
    log: &mut Vec<AdditionEvent>,
) {
    let z = agents.occupancy(graph.n());
    let mut load = neighborhood_loads(graph, &z);
    for u in graph.vertices() {
        let have = load[u as usize] as f64;
        if have >= target {
            continue;
        }
        let missing = (target - have).ceil() as u64;
        let w = graph.neighbors(u)[0];
        let informed = state.vertex_at[w as usize].map(|_| t);
        for _ in 0..missing {
            let g = agents.push(w);
            state.add_agent(informed);
            log.push(AdditionEvent { round: t, vertex: u, agent: g, agent_vertex: w });
        }
        for &x in graph.neighbors(w) {
            load[x as usize] += missing;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_complete, generate_random_regular, generate_star, log2_ceil};
    use crate::protocols::{run_visit_exchange, Placement};
    use crate::rng::RngSeed;

    fn cfg(count: usize) -> AgentConfig {
        AgentConfig { count, placement: Placement::Stationary, lazy: false }
    }

    fn opts() -> TraceOptions {
        TraceOptions { positions: true, visit_counts: false }
    }

    #[test]
    fn huge_gamma_matches_plain() {
        let g = generate_random_regular(128, 7 + 1, RngSeed(1)).unwrap();
        for s in 0..5 {
            let plain = run_visit_exchange(&g, 0, &cfg(128), &mut Streams::new(RngSeed(s)), 10_000, opts()).unwrap();
            let (t, log) =
                run_t_visit_exchange(&g, 0, &cfg(128), 1e6, &mut Streams::new(RngSeed(s)), 10_000, opts()).unwrap();
            assert!(log.is_empty());
            assert_eq!(plain, t);
        }
    }

    #[test]
    fn single_agent_never_removed() {
        let g = generate_random_regular(32, 4, RngSeed(2)).unwrap();
        let (r, log) = run_t_visit_exchange(&g, 0, &cfg(1), 1.0, &mut Streams::new(RngSeed(3)), 100_000, opts()).unwrap();
        assert!(log.is_empty());
        assert!(r.is_complete());
    }

    #[test]
    fn tight_cap_removes_and_holds() {
        let g = generate_random_regular(64, 6, RngSeed(4)).unwrap();
        let config = cfg(640);
        let gamma = 2.0 * std::f64::consts::E * 10.0;
        let (r, log) = run_t_visit_exchange(&g, 0, &config, gamma, &mut Streams::new(RngSeed(5)), 2000, opts()).unwrap();
        // After every round the cap holds for the surviving agents.
        let pos = r.trace.positions.unwrap();
        for row in &pos {
            let mut z = vec![0u64; 64];
            row.iter().filter(|&&v| v != u32::MAX).for_each(|&v| z[v as usize] += 1);
            for u in g.vertices() {
                let load: u64 = g.neighbors(u).iter().map(|&v| z[v as usize]).sum();
                assert!(load as f64 <= gamma * 6.0);
            }
        }
        for e in &log {
            assert!(g.has_edge(e.vertex, e.agent_vertex));
            assert_eq!(pos[e.round as usize][e.agent], u32::MAX);
        }
    }

    #[test]
    fn gamma_precondition_and_regularity() {
        let g = generate_random_regular(32, 4, RngSeed(2)).unwrap();
        assert!(run_t_visit_exchange(&g, 0, &cfg(32), 1.0, &mut Streams::new(RngSeed(0)), 10, opts()).is_err());
        let star = generate_star(5).unwrap();
        assert!(run_t_visit_exchange(&star, 0, &cfg(6), 100.0, &mut Streams::new(RngSeed(0)), 10, opts()).is_err());
        assert!(run_r_visit_exchange(&star, 0, &cfg(6), RFloor::Standard, &mut Streams::new(RngSeed(0)), 10, opts()).is_err());
    }

    #[test]
    fn rare_removals_at_2e() {
        // |A| = n, d = ceil(log2 n), gamma = 2e: removals are rare.
        let n = 256;
        let g = generate_random_regular(n, log2_ceil(n), RngSeed(6)).unwrap();
        let gamma = 2.0 * std::f64::consts::E;
        let with_removal = (0..100)
            .filter(|&s| {
                let (_, log) =
                    run_t_visit_exchange(&g, 0, &cfg(n), gamma, &mut Streams::new(RngSeed(s)), n as Round, opts()).unwrap();
                !log.is_empty()
            })
            .count();
        assert!(with_removal <= 5, "{with_removal} trials removed agents");
    }

    #[test]
    fn zero_floor_matches_plain() {
        let g = generate_random_regular(64, 6, RngSeed(7)).unwrap();
        for s in 0..5 {
            let plain = run_visit_exchange(&g, 0, &cfg(64), &mut Streams::new(RngSeed(s)), 10_000, opts()).unwrap();
            let (r, log) =
                run_r_visit_exchange(&g, 0, &cfg(64), RFloor::PerDegree(0.0), &mut Streams::new(RngSeed(s)), 10_000, opts())
                    .unwrap();
            assert!(log.is_empty());
            assert_eq!(plain, r);
        }
    }

    #[test]
    fn rare_additions_on_complete() {
        let n = 64;
        let g = generate_complete(n).unwrap();
        let with_addition = (0..100)
            .filter(|&s| {
                let (_, log) = run_r_visit_exchange(
                    &g,
                    0,
                    &cfg(n),
                    RFloor::Standard,
                    &mut Streams::new(RngSeed(s)),
                    n as Round,
                    opts(),
                )
                .unwrap();
                !log.is_empty()
            })
            .count();
        assert!(with_addition <= 5);
    }

    #[test]
    fn high_floor_adds_and_holds_after_odd_rounds() {
        let g = generate_random_regular(32, 4, RngSeed(8)).unwrap();
        let (r, log) =
            run_r_visit_exchange(&g, 0, &cfg(8), RFloor::PerDegree(1.0), &mut Streams::new(RngSeed(9)), 1000, opts()).unwrap();
        assert!(!log.is_empty());
        let pos = r.trace.positions.unwrap();
        for (t, row) in pos.iter().enumerate().filter(|(t, _)| t % 2 == 1) {
            let mut z = vec![0u64; 32];
            row.iter().for_each(|&v| z[v as usize] += 1);
            for u in g.vertices() {
                let load: u64 = g.neighbors(u).iter().map(|&v| z[v as usize]).sum();
                assert!(load >= 4, "round {t} vertex {u}");
            }
        }
        for e in &log {
            assert_eq!(e.round % 2, 1);
            assert_eq!(e.agent_vertex, g.neighbors(e.vertex)[0]);
            // Added agents adopt the vertex state at the end of the round.
            let vertex_time = r.trace.vertex_informed_at[e.agent_vertex as usize];
            let agent_time = r.trace.agent_informed_at[e.agent];
            if vertex_time.is_some_and(|vt| vt <= e.round) {
                assert_eq!(agent_time, Some(e.round));
            } else {
                assert!(agent_time.is_none_or(|at| at > e.round));
            }
        }
    }
}
