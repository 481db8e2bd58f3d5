//! Graph analysis for mobility networks.
//!
//! Region Adjacency graphs are built from polygon partitions and
//! Origin-Destination digraphs from flow matrices. On either kind of graph the
//! crate computes node centralities, the stationary (Perron) vector of the
//! random walk with its induced circulation, and six Laplacian variants with
//! their spectra. The `flows` module adds a singly-constrained gravity model,
//! the common-part-of-commuters score, and diffusion-based population
//! estimates.

// `!(x > 0.0)` style guards deliberately reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod centrality;
pub mod construct;
pub mod error;
pub mod export;
pub mod flows;
pub mod graph;
pub mod laplacian;
pub mod metrics;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{
    components, largest_component_subgraph, prune_low_degree, shortest_path_distances,
    ComponentDecomposition, ComponentMode, DegreeVector, Graph, GraphBuilder, Orientation, Point,
    TransitionMatrix,
};
pub use metrics::{MetricTable, Normalization};
