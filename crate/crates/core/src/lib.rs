//! Combinatorial and metric constructions for right-angled Artin groups:
//! defining graphs and their vertex orders, Whitehead partitions, blowup
//! cube complexes, hyperplane classification, parallelotope metrics with
//! straightening, and the linear shear equations.

pub mod blowup;
pub mod classify;
pub mod error;
pub mod graph;
pub mod label;
pub mod linalg;
pub mod metric;
pub mod partition;
pub mod shear;

pub use blowup::{BlowupComplex, Cube, Edge, Region};
pub use error::{Error, Result};
pub use graph::{DefiningGraph, VertexKind, VertexSet};
pub use label::Label;
pub use partition::{PartitionFamily, Side, SignedVertex, WPartition};
