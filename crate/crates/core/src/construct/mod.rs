//! Graph construction from spatial partitions and flow matrices.

mod adjacency;
pub mod geometry;
mod od;
mod partition;

pub use adjacency::{region_adjacency_graph, Contiguity, DEFAULT_SNAP_TOLERANCE};
pub use geometry::{centroid, PolygonShape};
pub use od::{od_graph, read_id_list, ODMatrix};
pub use partition::{Partition, Region};
