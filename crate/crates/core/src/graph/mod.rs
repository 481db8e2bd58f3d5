//! Weighted graphs in compressed row storage.
//!
//! A [`Graph`] is immutable once built. Undirected graphs store every edge in
//! both directions so the adjacency matrix is exactly symmetric, which lets the
//! directed and undirected code paths share the same row iteration.

mod components;
pub mod io;
pub(crate) mod paths;

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use components::{
    components, largest_component_subgraph, prune_low_degree, ComponentDecomposition,
    ComponentMode, Pruned,
};
pub use paths::{all_pairs_distances, shortest_path_distances};

/// A point in projected planar coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Out,
    In,
}

/// Weighted adjacency with node labels and an optional planar embedding.
#[derive(Debug, Clone)]
pub struct Graph {
    directed: bool,
    labels: Vec<String>,
    index: HashMap<String, usize>,
    coords: Option<Vec<Point>>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<f64>,
}

impl Graph {
    /// Builds a graph from labelled edges. Node order follows first appearance.
    pub fn from_edges<S: AsRef<str>>(edges: &[(S, S, f64)], directed: bool) -> Result<Graph> {
        let mut builder = GraphBuilder::new(directed);
        for (s, t, w) in edges {
            builder.add_edge(s.as_ref(), t.as_ref(), *w)?;
        }
        builder.build()
    }

    /// Assembles a graph from index triplets. Triplets must already be valid:
    /// positive weights, no duplicates, and for undirected graphs each edge
    /// listed once (it is mirrored here).
    pub(crate) fn from_triplets(
        directed: bool,
        labels: Vec<String>,
        coords: Option<Vec<Point>>,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Graph {
        let n = labels.len();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, j, w) in triplets {
            rows[i].push((j, w));
            if !directed && i != j {
                rows[j].push((i, w));
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut weights = Vec::new();
        row_ptr.push(0);
        for row in &mut rows {
            row.sort_by_key(|&(j, _)| j);
            for &(j, w) in row.iter() {
                cols.push(j);
                weights.push(w);
            }
            row_ptr.push(cols.len());
        }
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        Graph {
            directed,
            labels,
            index,
            coords,
            row_ptr,
            cols,
            weights,
        }
    }

    pub fn empty(directed: bool) -> Graph {
        Graph::from_triplets(directed, Vec::new(), None, std::iter::empty())
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of stored adjacency entries. For undirected graphs every
    /// non-loop edge counts twice.
    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Number of edges: arcs for directed graphs, unordered pairs otherwise.
    pub fn edge_count(&self) -> usize {
        if self.directed {
            self.nnz()
        } else {
            let loops = (0..self.node_count())
                .filter(|&i| self.weight(i, i) > 0.0)
                .count();
            (self.nnz() - loops) / 2 + loops
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn coords(&self) -> Option<&[Point]> {
        self.coords.as_deref()
    }

    /// Outgoing `(target, weight)` pairs of `node`, sorted by target.
    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[node]..self.row_ptr[node + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.weights[span].iter().copied())
    }

    pub(crate) fn targets(&self, node: usize) -> &[usize] {
        &self.cols[self.row_ptr[node]..self.row_ptr[node + 1]]
    }

    pub fn out_degree_count(&self, node: usize) -> usize {
        self.row_ptr[node + 1] - self.row_ptr[node]
    }

    /// Weight of the arc `i -> j`, zero when absent.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[span.clone()].binary_search(&j) {
            Ok(k) => self.weights[span.start + k],
            Err(_) => 0.0,
        }
    }

    /// All stored arcs `(i, j, w)` in row-major order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.node_count()).flat_map(move |i| self.neighbors(i).map(move |(j, w)| (i, j, w)))
    }

    /// Edges listed once each: all arcs when directed, `i <= j` otherwise.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let directed = self.directed;
        self.arcs().filter(move |&(i, j, _)| directed || i <= j)
    }

    /// The graph with every arc reversed. Undirected graphs are returned as is.
    pub fn reversed(&self) -> Graph {
        if !self.directed {
            return self.clone();
        }
        Graph::from_triplets(
            true,
            self.labels.clone(),
            self.coords.clone(),
            self.arcs().map(|(i, j, w)| (j, i, w)),
        )
    }

    /// Same topology with weights replaced by their reciprocals, turning flow
    /// volumes into traversal costs.
    pub fn with_reciprocal_weights(&self) -> Graph {
        let mut g = self.clone();
        for w in &mut g.weights {
            *w = 1.0 / *w;
        }
        g
    }

    /// Induced subgraph on `nodes`, in the given order.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut new_index = vec![usize::MAX; self.node_count()];
        for (k, &v) in nodes.iter().enumerate() {
            new_index[v] = k;
        }
        let labels = nodes.iter().map(|&v| self.labels[v].clone()).collect();
        let coords = self
            .coords
            .as_ref()
            .map(|c| nodes.iter().map(|&v| c[v]).collect());
        let triplets: Vec<_> = self
            .edges()
            .filter_map(|(i, j, w)| {
                let (a, b) = (new_index[i], new_index[j]);
                (a != usize::MAX && b != usize::MAX).then_some((a, b, w))
            })
            .collect();
        Graph::from_triplets(self.directed, labels, coords, triplets)
    }

    pub fn degrees(&self, orientation: Orientation) -> DegreeVector {
        let n = self.node_count();
        let mut values = vec![0.0; n];
        match orientation {
            Orientation::Out => {
                for (i, v) in values.iter_mut().enumerate() {
                    *v = self.neighbors(i).map(|(_, w)| w).sum();
                }
            }
            Orientation::In => {
                for (_, j, w) in self.arcs() {
                    values[j] += w;
                }
            }
        }
        DegreeVector {
            orientation,
            values,
        }
    }

    /// Dense copy of the adjacency matrix.
    pub fn adjacency_dense(&self) -> DMatrix<f64> {
        let n = self.node_count();
        let mut a = DMatrix::zeros(n, n);
        for (i, j, w) in self.arcs() {
            a[(i, j)] = w;
        }
        a
    }

    /// True when `A_ij == A_ji` for every pair, regardless of the directed flag.
    pub fn has_symmetric_adjacency(&self) -> bool {
        self.arcs().all(|(i, j, w)| self.weight(j, i) == w)
    }

    /// Row-stochastic matrix `P = D^{-1} A`.
    pub fn transition_matrix(&self) -> Result<TransitionMatrix> {
        let out = self.degrees(Orientation::Out);
        let dead: Vec<String> = out
            .values
            .iter()
            .enumerate()
            .filter(|(_, &d)| d <= 0.0)
            .map(|(i, _)| self.labels[i].clone())
            .collect();
        if !dead.is_empty() {
            return Err(Error::DeadEnds(dead));
        }
        let probs = self
            .weights
            .iter()
            .enumerate()
            .map(|(k, &w)| w / out.values[self.row_of(k)])
            .collect();
        Ok(TransitionMatrix {
            row_ptr: self.row_ptr.clone(),
            cols: self.cols.clone(),
            probs,
        })
    }

    fn row_of(&self, k: usize) -> usize {
        // row_ptr is non-decreasing; the last row whose start is <= k owns k
        self.row_ptr.partition_point(|&p| p <= k) - 1
    }

    /// Nonzero `(row, col)` positions of the adjacency, row-major sorted.
    pub fn sparsity_pattern(&self) -> Vec<(usize, usize)> {
        self.arcs().map(|(i, j, _)| (i, j)).collect()
    }

    /// Number of distinct neighbours ignoring direction and self-loops.
    pub(crate) fn undirected_neighbor_sets(&self) -> Vec<Vec<usize>> {
        let mut sets: Vec<Vec<usize>> = vec![Vec::new(); self.node_count()];
        for (i, j, _) in self.arcs() {
            if i != j {
                sets[i].push(j);
                sets[j].push(i);
            }
        }
        for s in &mut sets {
            s.sort_unstable();
            s.dedup();
        }
        sets
    }
}

/// Incremental construction of a [`Graph`] from labelled nodes and edges.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    directed: bool,
    labels: Vec<String>,
    index: HashMap<String, usize>,
    coords: Vec<Option<Point>>,
    edges: HashMap<(usize, usize), f64>,
    order: Vec<(usize, usize)>,
}

impl GraphBuilder {
    pub fn new(directed: bool) -> Self {
        GraphBuilder {
            directed,
            ..Default::default()
        }
    }

    /// Declares a node, returning its index. Re-declaring is a no-op.
    pub fn add_node(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), i);
        self.coords.push(None);
        i
    }

    pub fn add_node_at(&mut self, label: &str, at: Point) -> usize {
        let i = self.add_node(label);
        self.coords[i] = Some(at);
        i
    }

    pub fn add_edge(&mut self, source: &str, target: &str, weight: f64) -> Result<()> {
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::NonPositiveWeight {
                source_label: source.to_owned(),
                target: target.to_owned(),
                weight,
            });
        }
        let i = self.add_node(source);
        let j = self.add_node(target);
        let key = if self.directed {
            (i, j)
        } else {
            (i.min(j), i.max(j))
        };
        if self.edges.contains_key(&key) {
            return Err(Error::DuplicateEdge(source.to_owned(), target.to_owned()));
        }
        self.edges.insert(key, weight);
        self.order.push(key);
        Ok(())
    }

    pub fn build(self) -> Result<Graph> {
        let placed = self.coords.iter().filter(|c| c.is_some()).count();
        let coords = if placed == 0 {
            None
        } else if placed == self.labels.len() {
            Some(self.coords.into_iter().map(Option::unwrap).collect())
        } else {
            return Err(Error::invalid(
                "build_graph",
                format!(
                    "coordinates given for {placed} of {} nodes",
                    self.labels.len()
                ),
            ));
        };
        let edges = self.edges;
        Ok(Graph::from_triplets(
            self.directed,
            self.labels,
            coords,
            self.order.into_iter().map(|k| (k.0, k.1, edges[&k])),
        ))
    }
}

/// Weighted out- or in-degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeVector {
    pub orientation: Orientation,
    pub values: Vec<f64>,
}

/// Sparse row-stochastic transition matrix sharing the graph's sparsity.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    probs: Vec<f64>,
}

impl TransitionMatrix {
    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.probs[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, p)| p)
    }

    /// Computes `xᵀ P` into `out`.
    pub fn left_multiply(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (j, p) in self.row(i) {
                out[j] += xi * p;
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for (j, p) in self.row(i) {
                m[(i, j)] = p;
            }
        }
        m
    }

    /// Largest `|Σ_j P_ij − 1|` over rows.
    pub fn max_row_sum_defect(&self) -> f64 {
        (0..self.dim())
            .map(|i| (self.row(i).map(|(_, p)| p).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}
