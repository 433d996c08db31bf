use crate::connectivity::CutCertificate;
use crate::graph::{EdgeId, Vertex};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("flow domain does not match graph edge set: {0}")]
    DomainMismatch(String),
    #[error("edge {0} not in graph")]
    UnknownEdge(EdgeId),
    #[error("vertex {0} not in graph")]
    UnknownVertex(Vertex),
    #[error("edge {e} is a loop at {v}; lifting is defined on non-loop pairs")]
    LoopLift { v: Vertex, e: EdgeId },
    #[error("edge {e} is not incident with vertex {v}")]
    NotIncident { v: Vertex, e: EdgeId },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("graph is not {k}-edge-connected (witness cut of size {})", .cut.size)]
    NotKEdgeConnected { k: usize, cut: CutCertificate },
    #[error("no splittable pair at vertex {v}; splitting-lemma preconditions violated or implementation bug")]
    MaderViolation { v: Vertex },
    #[error("no {k}-edge-connectivity-preserving pair at vertex {v}")]
    CorollaryViolation { v: Vertex, k: usize },
    #[error("flow pullback is undefined across a {0} step")]
    PullbackUnsupported(&'static str),
    #[error("graph has no two disjoint spanning trees")]
    NoTreePair,
    #[error("cycle rank {rank} exceeds census cap {cap}; use the flow polynomial or raise the cap")]
    CensusCap { rank: usize, cap: usize },
    #[error("edge count {m} exceeds flow-polynomial cap {cap}")]
    PolyCap { m: usize, cap: usize },
    #[error("graph is not cubic")]
    NotCubic,
    #[error("oriented chain subgraph is missing a required directed path or cycle at chain {chain}")]
    CoverPath { chain: usize },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid family: {0}")]
    Family(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
