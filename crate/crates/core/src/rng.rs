//! Seeded randomness.
//!
//! Every random quantity in a run comes from a stream derived from the master
//! seed by a stable role label and an index, so a run is a pure function of
//! `(graph, seed, parameters)` and consuming one stream never perturbs
//! another. The generator is ChaCha8 (`rand_chacha`), seeded through
//! SplitMix64 mixing of `(seed, role, index)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, VertexId};

/// Master seed of a run or experiment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl std::fmt::Display for RngSeed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Concrete generator used for every stream.
pub type SimRng = ChaCha8Rng;

/// Named sub-streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Trial,
    Generator,
    Placement,
    Walk,
    LazyCoin,
    Push,
    Oracle,
    Bootstrap,
    Source,
}

impl Role {
    fn label(self) -> &'static str {
        match self {
            Role::Trial => "trial",
            Role::Generator => "graph-generator",
            Role::Placement => "agent-placement",
            Role::Walk => "agent-walk",
            Role::LazyCoin => "lazy-coin",
            Role::Push => "push-choice",
            Role::Oracle => "choice-oracle",
            Role::Bootstrap => "bootstrap",
            Role::Source => "source-choice",
        }
    }
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn label_hash(label: &str) -> u64 {
    // FNV-1a
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Seed of sub-stream `(role, index)` under `master`.
pub fn derive_seed(master: RngSeed, role: Role, index: u64) -> RngSeed {
    let a = splitmix64(master.0 ^ label_hash(role.label()));
    RngSeed(splitmix64(a ^ splitmix64(index)))
}

/// Seed of the `index`-th trial of an experiment.
pub fn trial_seed(master: RngSeed, index: u64) -> RngSeed {
    derive_seed(master, Role::Trial, index)
}

pub fn stream(master: RngSeed, role: Role, index: u64) -> SimRng {
    SimRng::seed_from_u64(derive_seed(master, role, index).0)
}

/// The independent streams one protocol run draws from.
pub struct Streams {
    pub placement: SimRng,
    pub walk: SimRng,
    pub coin: SimRng,
    pub push: SimRng,
}

impl Streams {
    pub fn new(seed: RngSeed) -> Self {
        Streams {
            placement: stream(seed, Role::Placement, 0),
            walk: stream(seed, Role::Walk, 0),
            coin: stream(seed, Role::LazyCoin, 0),
            push: stream(seed, Role::Push, 0),
        }
    }
}

/// Lazily materialized neighbor choices `w_u(1), w_u(2), ...` for every
/// vertex, each uniform over the neighbors of `u` and independent.
///
/// `w_u(i)` is a function of `(seed, u, i)` only, so the order in which
/// coupled processes request entries cannot change their values. Requested
/// prefixes are kept as the access log.
#[derive(Clone, Debug)]
pub struct ChoiceOracle {
    key: u64,
    choices: Vec<Vec<VertexId>>,
}

impl ChoiceOracle {
    pub fn new(n: usize, seed: RngSeed) -> Self {
        ChoiceOracle { key: derive_seed(seed, Role::Oracle, 0).0, choices: vec![Vec::new(); n] }
    }

    /// `w_u(i)` for `i >= 1`. Panics if `u` is isolated or `i == 0`.
    pub fn next_neighbor_choice(&mut self, graph: &Graph, u: VertexId, i: usize) -> VertexId {
        assert!(i >= 1, "choice indices start at 1");
        let nbrs = graph.neighbors(u);
        assert!(!nbrs.is_empty(), "vertex {u} has no neighbors");
        let log = &mut self.choices[u as usize];
        while log.len() < i {
            let idx = uniform_index(self.key, u, log.len() as u64 + 1, nbrs.len() as u64);
            log.push(nbrs[idx as usize]);
        }
        log[i - 1]
    }

    /// Number of materialized choices at `u`.
    pub fn accesses(&self, u: VertexId) -> usize {
        self.choices[u as usize].len()
    }

    /// Materialized prefix at `u`.
    pub fn log(&self, u: VertexId) -> &[VertexId] {
        &self.choices[u as usize]
    }

    pub fn into_log(self) -> Vec<Vec<VertexId>> {
        self.choices
    }
}

/// Exactly uniform draw from `0..range` keyed by `(key, u, i)`: Lemire's
/// multiply-shift with rejection, re-hashing on reject.
fn uniform_index(key: u64, u: VertexId, i: u64, range: u64) -> u64 {
    let mut x = splitmix64(key ^ splitmix64((u as u64) << 32 ^ splitmix64(i)));
    let threshold = range.wrapping_neg() % range;
    loop {
        let wide = x as u128 * range as u128;
        if (wide as u64) >= threshold {
            return (wide >> 64) as u64;
        }
        x = splitmix64(x);
    }
}

/// Vertex drawn with probability `deg(v) / 2m`; the lone vertex of a
/// one-vertex graph.
pub fn sample_stationary_vertex(graph: &Graph, rng: &mut impl Rng) -> VertexId {
    if graph.m() == 0 {
        return 0;
    }
    // A uniform endpoint slot of the adjacency array is degree-proportional.
    let slot = rng.random_range(0..2 * graph.m());
    let mut lo = 0usize;
    let mut hi = graph.n();
    // Largest v with offset(v) <= slot.
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if graph.offset(mid) <= slot {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo as VertexId
}

/// One step of a simple random walk from `v`; a lazy walk stays put with
/// probability 1/2 first.
pub fn step_walk(graph: &Graph, v: VertexId, lazy: bool, rng: &mut impl Rng) -> VertexId {
    if lazy && rng.random_bool(0.5) {
        return v;
    }
    uniform_neighbor(graph, v, rng)
}

/// Uniform neighbor of `v`, or `v` itself when isolated.
#[inline]
pub fn uniform_neighbor(graph: &Graph, v: VertexId, rng: &mut impl Rng) -> VertexId {
    let nbrs = graph.neighbors(v);
    match nbrs.len() {
        0 => v,
        1 => nbrs[0],
        d => nbrs[rng.random_range(0..d)],
    }
}
