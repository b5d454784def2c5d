//! Correlated-degree LDPC ensembles over the binary erasure channel:
//! degree distributions, Tanner-graph construction, density evolution,
//! peeling-decoder simulation and threshold optimization.
#![no_std]

extern crate alloc;

pub mod construct;
pub mod de;
pub mod dist;
pub mod error;
pub mod opt;
pub mod presets;
pub mod sim;

pub use dist::{
    BlockSpec, Degree, EdgeDegreeDistribution, JointEdgeDistribution, NodeDegreeDistribution,
};
pub use error::{Error, Result, Side};
