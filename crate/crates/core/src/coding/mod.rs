//! Compilation of coding instances into x̃-linear polynomial systems.

pub mod files;
pub mod lrc;
pub mod network;
pub mod system;

pub use files::{parse_instance, read_instance, InputError, Instance};
pub use lrc::{build_lrc_layered_graph, build_lrc_problem, LrcSpec};
pub use network::{
    broadcast_constraints, build_lnc_problem, global_encoding_vectors, rank_constraint_polys, receive_matrix,
    routing_constraints, search_space_size, BroadcastMode, CodingError, InEdge, LncProblem, NetworkSpec, Node,
    NodeKind, SymbolicMatrix, Topology, VarMap,
};
pub use system::{PolySystem, RankBlock};
