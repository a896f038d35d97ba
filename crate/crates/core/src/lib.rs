//! Generation and analysis of simple directed social-network graphs with
//! reciprocal edges and high clustering.
//!
//! The pipeline samples correlated reciprocal / in / out degree sequences
//! ([`degree_sampler`]), wires them with a hub-then-neighbors procedure
//! ([`wiring`]), and validates the result with topological measurements
//! ([`metrics`]) and a discrete SIR epidemic ([`sir`]).

pub mod config;
pub mod degree_sampler;
pub mod edgelist;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod presets;
pub mod report;
pub mod sir;
pub mod wiring;

use rand::SeedableRng;

pub use degree_sampler::{
    CorrelationTargets, DegreeSequences, GenConfig, MarginalSpec, Marginals,
};
pub use config::{parse_config, RunConfig, SirSettings};
pub use error::{Error, Result};
pub use graph::{DirectedGraph, NodeId};
pub use sir::{run_sir, run_sir_batch, SirBatch, SirConfig, SirOutcome};
pub use wiring::{generate_graph, GeneratedGraph, WiringStats};

/// Random source used throughout the crate.
pub type SimRng = rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}
