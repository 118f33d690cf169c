//! Solvers for the strategic deployment problem.
//!
//! A group of agents starts at a start vertex and walks a graph in one
//! group. The first visit of a vertex `v` permanently leaves `w(v)` agents
//! there, and an edge `e` can only be crossed by at least `w(e)` agents.
//! The task is to find the smallest initial group that visits every vertex,
//! optionally returning to the start with at least one agent.
//!
//! Everything is generic over the [`Weight`] type; the aliases at the crate
//! root fix it to `u64`.

pub mod decomposition;
pub mod error;
pub mod generators;
pub mod graph_solver;
pub mod heap;
pub mod instance;
pub mod oracle;
pub mod schedule;
pub mod tree_solver;
pub mod weight;

pub use error::{Error, Result};
pub use instance::{EdgeId, Variant, VertexId};
pub use schedule::{Schedule, Step};
pub use tree_solver::{Method, SolveOptions};
pub use weight::Weight;

pub type Instance = instance::Instance<u64>;
pub type TreeInstance = instance::TreeInstance<u64>;
pub type Bounds = instance::Bounds<u64>;
pub type Solution = tree_solver::Solution<u64>;
pub type ApproxSolution = graph_solver::ApproxSolution<u64>;
pub type AgentCount = schedule::AgentCount<u64>;
pub type Decomposition = decomposition::Decomposition<u64>;
