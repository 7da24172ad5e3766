//! Deterministic simulation of randomized broadcast on graphs: PUSH,
//! PUSH-PULL, VISIT-EXCHANGE and MEET-EXCHANGE, the coupled PUSH /
//! VISIT-EXCHANGE executions with their counters and congestion checks, and a
//! Monte-Carlo experiment harness.

pub mod coupling;
pub mod experiments;
pub mod graph;
pub mod protocols;
pub mod rng;

pub use graph::{Family, Graph, GraphError, VertexId};
pub use protocols::{AgentConfig, BroadcastResult, Placement, Protocol, ProtocolError, Round};
pub use rng::RngSeed;
