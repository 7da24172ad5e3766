use super::*;
use crate::graph::{generate_complete, generate_cycle, generate_star};
use crate::protocols::{place_agents, Placement};

fn cfg(count: usize) -> AgentConfig {
    AgentConfig { count, placement: Placement::Stationary, lazy: false }
}

/// First seed whose stationary placement is exactly `want`.
fn seed_placing(graph: &Graph, want: &[VertexId]) -> RngSeed {
    (0..10_000)
        .map(RngSeed)
        .find(|&s| place_agents(graph, &cfg(want.len()), &mut Streams::new(s).placement).unwrap() == want)
        .expect("some seed yields the placement")
}

#[test]
fn k2_agent_on_source() {
    let g = generate_complete(2).unwrap();
    let seed = seed_placing(&g, &[0]);
    let tr = run_coupled_even(&g, 0, &cfg(1), seed, 100).unwrap();
    assert_eq!(tr.push_times, vec![Some(0), Some(1)]);
    assert_eq!(tr.visitx_times, vec![Some(0), Some(1)]);
    assert_eq!(tr.s_sets, vec![vec![], vec![0]]);
    assert_eq!(tr.c_counters, vec![vec![0, 0], vec![1, 1]]);
    assert_eq!(tr.oracle_log[0], vec![1]);
    assert_eq!(verify_tau_leq_c(&tr), None);
    let walk = reconstruct_min_chain_walk(&tr, 1, 1).unwrap();
    assert_eq!(walk.vertices, vec![0, 1]);
    assert_eq!(walk.steps, vec![Some(0)]);
    assert_eq!(walk.congestion, 1);
    let empty = reconstruct_min_chain_walk(&tr, 0, 0).unwrap();
    assert_eq!((empty.vertices, empty.congestion), (vec![0], 0));
    verify_transcript(&tr).unwrap();
}

#[test]
fn k2_agent_off_source() {
    // The agent reaches s in round 1 on the walk stream, then leaves s in
    // round 2 on w_s(1): t_1 = 2, C_1(2) = |Z_0(1)| = 1, tau_1 = 1.
    let g = generate_complete(2).unwrap();
    let seed = seed_placing(&g, &[1]);
    let tr = run_coupled_even(&g, 0, &cfg(1), seed, 100).unwrap();
    assert_eq!(tr.visitx_times, vec![Some(0), Some(2)]);
    assert_eq!(tr.agent_informed_at, vec![Some(1)]);
    assert_eq!(tr.walk_consumption, vec![1, 0]);
    assert_eq!(tr.c_counters, vec![vec![0, 0], vec![0, 0], vec![1, 1]]);
    assert_eq!(tr.push_times[1], Some(1));
    let walk = reconstruct_min_chain_walk(&tr, 1, 2).unwrap();
    assert_eq!(walk.vertices, vec![0, 0, 1]);
    assert_eq!(walk.steps, vec![None, Some(0)]);
    verify_transcript(&tr).unwrap();
}

#[test]
fn k2_odd_consumes_at_even_visit() {
    let g = generate_complete(2).unwrap();
    let seed = seed_placing(&g, &[0]);
    let tr = run_coupled_odd(&g, 0, &cfg(1), seed, 100, None).unwrap();
    assert_eq!(tr.walk_consumption[0], 1);
    assert_eq!(tr.oracle_log[0][0], tr.positions.row(1)[0]);
    verify_transcript(&tr).unwrap();
}

#[test]
fn departures_follow_the_oracle_in_order() {
    let g = generate_star(12).unwrap();
    for s in 0..20 {
        let tr = run_coupled_even(&g, 0, &cfg(13), RngSeed(s), 10_000).unwrap();
        let mut seen: Vec<Vec<VertexId>> = vec![Vec::new(); g.n()];
        for t in 1..=tr.rounds() {
            for (_, a, b) in tr.positions.moves(t) {
                if tr.visitx_times[a as usize].is_some_and(|r| r < t) {
                    seen[a as usize].push(b);
                }
            }
        }
        for u in g.vertices() {
            let k = tr.walk_consumption[u as usize];
            assert_eq!(seen[u as usize].len(), k);
            assert_eq!(&tr.oracle_log[u as usize][..k], seen[u as usize].as_slice());
        }
    }
}

#[test]
fn transcript_json_round_trip() {
    let g = generate_cycle(8).unwrap();
    let tr = run_coupled_even(&g, 3, &cfg(8), RngSeed(11), 10_000).unwrap();
    let json = serde_json::to_string(&tr).unwrap();
    let back: CouplingTranscript = serde_json::from_str(&json).unwrap();
    assert_eq!(back, tr);
    assert_eq!(back.positions.visits(0, 3), tr.positions.visits(0, 3));
    verify_transcript(&back).unwrap();
}

#[test]
fn corrupted_tau_is_rejected() {
    let g = generate_cycle(8).unwrap();
    let mut tr = run_coupled_even(&g, 0, &cfg(8), RngSeed(5), 10_000).unwrap();
    let u = 4;
    tr.push_times[u] = tr.push_times[u].map(|t| t + 1);
    assert!(matches!(verify_transcript(&tr), Err(CouplingError::TranscriptCorrupt(_))));
}

#[test]
fn corrupted_counter_is_rejected() {
    let g = generate_cycle(8).unwrap();
    let mut tr = run_coupled_even(&g, 0, &cfg(8), RngSeed(6), 10_000).unwrap();
    let last = tr.c_counters.len() - 1;
    tr.c_counters[last][2] += 1;
    assert!(verify_transcript(&tr).is_err());
}

#[test]
fn zero_agents_leave_push_alone() {
    let g = generate_complete(2).unwrap();
    let tr = run_coupled_odd(&g, 0, &cfg(0), RngSeed(1), 50, None).unwrap();
    assert_eq!(tr.visitx_time, None);
    assert_eq!(tr.rounds(), 50);
    assert_eq!(tr.push_time, Some(1));
    verify_transcript(&tr).unwrap();
}

#[test]
fn rejects_lazy_and_misplaced_floor() {
    let g = generate_complete(4).unwrap();
    let lazy = AgentConfig { lazy: true, ..cfg(4) };
    assert!(matches!(run_coupled_even(&g, 0, &lazy, RngSeed(0), 10), Err(CouplingError::InvalidParameter(_))));
    let r = run_coupled(&g, 0, &cfg(4), RngSeed(0), 10, CouplingMode::Even, Some(RFloor::Standard));
    assert!(matches!(r, Err(CouplingError::InvalidParameter(_))));
}

#[test]
fn odd_with_floor_verifies() {
    let g = generate_complete(8).unwrap();
    let mut added = 0;
    for s in 0..20 {
        let tr = run_coupled_odd(&g, 0, &cfg(2), RngSeed(s), 10_000, Some(RFloor::PerDegree(0.5))).unwrap();
        added += tr.additions.len();
        verify_transcript(&tr).unwrap();
    }
    assert!(added > 0);
}

#[test]
fn independent_mode_can_violate_the_bound() {
    let g = generate_cycle(8).unwrap();
    let violations = (0..200)
        .filter(|&s| {
            let tr = run_coupled(&g, 0, &cfg(1), RngSeed(s), 10_000, CouplingMode::Independent, None).unwrap();
            verify_transcript(&tr).unwrap();
            verify_tau_leq_c(&tr).is_some()
        })
        .count();
    assert!(violations > 0);
}
