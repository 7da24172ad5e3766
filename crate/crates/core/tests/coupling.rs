mod common;

use common::{brute_force_max_congestion, random_history, random_small_graph, rng};
use proptest::prelude::*;
use walkcast::coupling::{
    max_congestion_dp, reconstruct_min_chain_walk, run_coupled_even, run_coupled_odd, verify_tau_leq_c,
    verify_transcript, VisitHistory,
};
use walkcast::graph::{generate_random_regular, log2_ceil, Family, Graph};
use walkcast::protocols::{AgentConfig, Placement};
use walkcast::RngSeed;

fn cfg(count: usize) -> AgentConfig {
    AgentConfig { count, placement: Placement::Stationary, lazy: false }
}

#[test]
fn even_coupling_verifies_on_mixed_families() {
    let families = [
        Family::Complete { n: 2 },
        Family::Cycle { n: 8 },
        Family::Star { leaves: 16 },
        Family::Regular { n: 64, d: 8 },
        Family::HeavyTree { n: 15 },
    ];
    for (i, f) in families.iter().enumerate() {
        let g = f.build(RngSeed(i as u64)).unwrap();
        for s in 0..20 {
            let source = (s as usize % g.n()) as u32;
            let tr = run_coupled_even(&g, source, &cfg(g.n()), RngSeed(s), 100_000).unwrap();
            assert!(tr.is_complete());
            assert_eq!(verify_tau_leq_c(&tr), None, "{f:?} seed {s}");
            verify_transcript(&tr).unwrap();
        }
    }
}

#[test]
fn walk_congestion_matches_counters_on_regular_256() {
    let g = generate_random_regular(256, 8, RngSeed(3)).unwrap();
    for s in 0..3 {
        let tr = run_coupled_even(&g, 0, &cfg(256), RngSeed(s), 100_000).unwrap();
        let last = tr.rounds();
        for u in g.vertices() {
            let tu = tr.visitx_times[u as usize].unwrap();
            for t in tu..=last {
                let w = reconstruct_min_chain_walk(&tr, u, t).unwrap();
                assert_eq!(w.vertices.len(), t as usize + 1);
                assert_eq!(w.congestion, tr.counter(u, t));
            }
        }
    }
}

#[test]
fn odd_coupling_tail_is_bounded() {
    // 99th percentile of t_u / (tau_u + log2 n) per trial stays below 2.
    let n = 1024;
    let g = generate_random_regular(n, 10, RngSeed(1)).unwrap();
    let log = log2_ceil(n) as f64;
    for s in 0..5 {
        let tr = run_coupled_odd(&g, 0, &cfg(n), RngSeed(100 + s), 100_000, None).unwrap();
        let mut r: Vec<f64> = (0..n)
            .map(|u| tr.visitx_times[u].unwrap() as f64 / (tr.push_times[u].unwrap() as f64 + log))
            .collect();
        r.sort_by(f64::total_cmp);
        let p99 = r[(0.99 * (n - 1) as f64) as usize];
        assert!(p99 <= 2.0, "seed {s}: p99 = {p99}");
    }
}

#[test]
fn dp_source_only_at_zero() {
    let h = VisitHistory::new(vec![vec![1, 2]]);
    let t = max_congestion_dp(&h, 0, 3, 0);
    assert_eq!(t, vec![vec![Some(0), None, None]]);
}

#[test]
fn dp_single_agent_at_most_k() {
    for s in 0..50 {
        let mut r = rng(s);
        let g = random_small_graph(6, &mut r);
        let h = random_history(&g, 1, 8, &mut r);
        let t = max_congestion_dp(&h, 0, 6, 8);
        for (k, row) in t.iter().enumerate() {
            assert!(row.iter().flatten().all(|&q| q <= k as u64));
        }
    }
}

fn instance(seed: u64, n: usize, agents: usize, k: u32) -> (Graph, VisitHistory) {
    let mut r = rng(seed);
    let g = random_small_graph(n, &mut r);
    let h = random_history(&g, agents, k, &mut r);
    (g, h)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn dp_equals_brute_force(seed in any::<u64>(), n in 1usize..=6, agents in 0usize..=3, k in 0u32..=5) {
        let (g, h) = instance(seed, n, agents, k);
        let source = (seed % n as u64) as u32;
        let dp = max_congestion_dp(&h, source, g.n(), k);
        for t in 0..=k {
            prop_assert_eq!(&dp[t as usize], &brute_force_max_congestion(&h, source, g.n(), t));
        }
    }

    #[test]
    fn counters_non_decreasing(seed in 0u64..10_000, n in 2usize..=12) {
        let g = Family::Cycle { n: n.max(3) }.build(RngSeed(0)).unwrap();
        let tr = run_coupled_even(&g, 0, &cfg(2), RngSeed(seed), 10_000).unwrap();
        for u in 0..g.n() {
            if let Some(tu) = tr.visitx_times[u] {
                for t in tu + 1..=tr.rounds() {
                    prop_assert!(tr.counter(u as u32, t) >= tr.counter(u as u32, t - 1));
                }
            }
        }
    }
}
