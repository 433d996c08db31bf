//! Multigraph library for group-valued nowhere-zero flows: constructive
//! flow-family generators for Z2xZ3, Z2xZ2, and Z3, an exact flow-census
//! oracle to verify them against, and the connectivity machinery (liftings,
//! tree packings, chain covers) the constructions are built on.

pub mod boundary;
pub mod bounds;
pub mod census;
pub mod connectivity;
pub mod cover;
pub mod error;
pub mod families;
pub mod flow;
pub mod format;
pub mod graph;
pub mod group;
pub mod trees;

pub use error::{Error, Result};
pub use flow::{is_nowhere_zero, validate_flow, Flow};
pub use graph::{pull_back_flow, EdgeId, Multigraph, Reducer, ReductionTrace, SurgeryStep, Vertex};
pub use group::{GroupElem, GroupSpec};
