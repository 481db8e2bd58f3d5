use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::Graph;
use crate::error::{Error, Result};

/// Heap entry ordered so that `BinaryHeap` pops the smallest distance first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Frontier {
    pub dist: f64,
    pub node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Weighted distances from `source` along outgoing arcs; unreachable nodes
/// are `f64::INFINITY`.
pub fn shortest_path_distances(g: &Graph, source: &str) -> Result<Vec<f64>> {
    let s = g.index_of(source).ok_or_else(|| Error::UnknownNode {
        op: "shortest_path_distances",
        label: source.to_owned(),
    })?;
    Ok(distances_from(g, s))
}

pub(crate) fn distances_from(g: &Graph, source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.node_count()];
    let mut settled = vec![false; g.node_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Frontier {
        dist: 0.0,
        node: source,
    });
    while let Some(Frontier { dist: d, node: v }) = heap.pop() {
        if settled[v] {
            continue;
        }
        settled[v] = true;
        for (w, cost) in g.neighbors(v) {
            let alt = d + cost;
            if alt < dist[w] {
                dist[w] = alt;
                heap.push(Frontier { dist: alt, node: w });
            }
        }
    }
    dist
}

/// Row `i` holds the distances from node `i`.
pub fn all_pairs_distances(g: &Graph) -> Vec<Vec<f64>> {
    (0..g.node_count())
        .into_par_iter()
        .map(|s| distances_from(g, s))
        .collect()
}
