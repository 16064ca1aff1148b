//! Sampling `d`-regular graphs with the lazy switch chain, exact mixing
//! diagnostics on enumerable state spaces, and the yellow/green bad-pair
//! accounting used to bound canonical-path congestion.

pub mod chain;
pub mod graph;
pub mod mixing;
pub mod pairing;
pub mod scenario;

pub use chain::{nonincident_pair_count, ChainConfig, ChainError, Proposal, SwitchChain, TransitionMatrix};
pub use graph::{
    apply_switch, build_graph, circulant_start, color_difference, encode, encode_graphs,
    symmetric_difference, ArcCounts, Color, ColoredDifference, Edge, EdgeLabeling, EdgeMembership,
    GraphError, RegularGraph, SwitchMove, VertexId,
};
pub use mixing::{BoundsReport, MixingError, MixingReport, StateSpace};
pub use pairing::{
    BadPairReport, CircuitDecomposition, InterestingEdge, InterestingKind, Pairing, PairingError,
    PairingMode,
};
pub use scenario::{Scenario, ScenarioError};
