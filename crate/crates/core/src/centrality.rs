//! Node centralities: closeness, harmonic, betweenness and PageRank.
//!
//! Distances are the weighted shortest-path costs of [`crate::graph`], so edge
//! weights act as traversal costs. Degree centrality is
//! [`Graph::degrees`].

use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::paths::{distances_from, Frontier};
use crate::graph::{Graph, Orientation};

/// Relative tolerance under which two path costs count as equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

fn oriented(g: &Graph, orientation: Orientation) -> std::borrow::Cow<'_, Graph> {
    match orientation {
        Orientation::Out => std::borrow::Cow::Borrowed(g),
        Orientation::In => std::borrow::Cow::Owned(g.reversed()),
    }
}

/// `C(v) = (N − 1) / Σ_{i≠v} d(v, i)`, zero when some node is unreachable.
/// The in-variant uses `d(i, v)`. Graphs with fewer than two nodes yield zeros.
pub fn closeness(g: &Graph, orientation: Orientation) -> Vec<f64> {
    let n = g.node_count();
    if n < 2 {
        return vec![0.0; n];
    }
    let h = oriented(g, orientation);
    (0..n)
        .into_par_iter()
        .map(|v| {
            let total: f64 = distances_from(&h, v).iter().sum();
            if total.is_finite() && total > 0.0 {
                (n - 1) as f64 / total
            } else {
                0.0
            }
        })
        .collect()
}

/// `H(v) = (1 / (N − 1)) Σ_{i≠v} 1 / d(v, i)` with unreachable terms dropped.
pub fn harmonic(g: &Graph, orientation: Orientation) -> Vec<f64> {
    let n = g.node_count();
    if n < 2 {
        return vec![0.0; n];
    }
    let h = oriented(g, orientation);
    (0..n)
        .into_par_iter()
        .map(|v| {
            let dist = distances_from(&h, v);
            let s: f64 = dist
                .iter()
                .enumerate()
                .filter(|&(i, d)| i != v && d.is_finite())
                .map(|(_, d)| 1.0 / d)
                .sum();
            s / (n - 1) as f64
        })
        .collect()
}

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs())
}

/// Per-source dependency accumulation over the weighted shortest-path DAG.
fn source_dependencies(g: &Graph, s: usize) -> Vec<f64> {
    let n = g.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut sigma = vec![0.0f64; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut settled = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut heap = BinaryHeap::new();

    dist[s] = 0.0;
    sigma[s] = 1.0;
    heap.push(Frontier { dist: 0.0, node: s });
    while let Some(Frontier { node: v, .. }) = heap.pop() {
        if settled[v] {
            continue;
        }
        settled[v] = true;
        order.push(v);
        for (w, cost) in g.neighbors(v) {
            if settled[w] {
                continue;
            }
            let alt = dist[v] + cost;
            if dist[w].is_finite() && tied(alt, dist[w]) {
                sigma[w] += sigma[v];
                preds[w].push(v);
            } else if alt < dist[w] {
                dist[w] = alt;
                sigma[w] = sigma[v];
                preds[w].clear();
                preds[w].push(v);
                heap.push(Frontier { dist: alt, node: w });
            }
        }
    }

    let mut delta = vec![0.0f64; n];
    for &w in order.iter().rev() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
    }
    delta[s] = 0.0;
    delta
}

/// `B(v) = Σ_{(a,b)} |S_v(a,b)| / |S(a,b)|` over ordered pairs `a ≠ b`, both
/// different from `v`, for which a path exists. No halving for undirected
/// graphs and no normalisation.
pub fn betweenness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    (0..n)
        .into_par_iter()
        .map(|s| source_dependencies(g, s))
        .reduce(
            || vec![0.0; n],
            |mut acc, d| {
                acc.iter_mut().zip(d).for_each(|(a, x)| *a += x);
                acc
            },
        )
}

#[derive(Debug, Clone)]
pub struct PageRankOptions {
    /// Damping factor `c`, strictly between 0 and 1.
    pub damping: f64,
    /// Teleportation distribution `b`; uniform when `None`.
    pub teleport: Option<Vec<f64>>,
    /// Stop when the L1 change between iterates is at most this.
    pub tol: f64,
    pub max_iter: usize,
    /// Multiply the result by `N`, matching the recursive `(1 − c) + c Σ …`
    /// convention for uniform teleportation.
    pub scaled: bool,
}

impl Default for PageRankOptions {
    fn default() -> Self {
        PageRankOptions {
            damping: 0.85,
            teleport: None,
            tol: 1e-12,
            max_iter: 1000,
            scaled: false,
        }
    }
}

/// PageRank as the principal eigenvector of `P̂ᵀ` with
/// `P̂ = c(P + δbᵀ) + (1 − c)𝟙bᵀ`, where `δ` flags dead-end rows. Power
/// iteration from `b`; the result sums to 1 unless `scaled`.
pub fn pagerank(g: &Graph, opts: &PageRankOptions) -> Result<Vec<f64>> {
    let n = g.node_count();
    let c = opts.damping;
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::invalid(
            "pagerank",
            format!("damping {c} outside (0, 1)"),
        ));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let b = match &opts.teleport {
        None => vec![1.0 / n as f64; n],
        Some(b) => {
            if b.len() != n {
                return Err(Error::DimensionMismatch {
                    op: "pagerank",
                    expected: n,
                    actual: b.len(),
                });
            }
            let sum: f64 = b.iter().sum();
            if b.iter().any(|&x| !(x >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(
                    "pagerank",
                    "teleport vector is not a probability vector",
                ));
            }
            b.clone()
        }
    };
    let out_deg = g.degrees(Orientation::Out).values;

    let mut x = b.clone();
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_iter {
        next.iter_mut().for_each(|v| *v = 0.0);
        let mut dangling = 0.0;
        for i in 0..n {
            if out_deg[i] > 0.0 {
                let share = x[i] / out_deg[i];
                for (j, w) in g.neighbors(i) {
                    next[j] += share * w;
                }
            } else {
                dangling += x[i];
            }
        }
        let mass: f64 = x.iter().sum();
        for j in 0..n {
            next[j] = c * (next[j] + dangling * b[j]) + (1.0 - c) * mass * b[j];
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        residual = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if residual <= opts.tol {
            if opts.scaled {
                x.iter_mut().for_each(|v| *v *= n as f64);
            }
            return Ok(x);
        }
    }
    Err(Error::NotConverged {
        op: "pagerank",
        iterations: opts.max_iter,
        residual,
        last_iterate: x,
    })
}
