//! Random graph generators and brute-force oracles shared by the
//! integration tests. Oracles work on plain edge lists, never on library
//! internals.

#![allow(dead_code)]

use mobgraph::{Graph, GraphBuilder};
use rand::rngs::StdRng;
use rand::Rng;

pub type Edges = Vec<(usize, usize, f64)>;

pub fn label(i: usize) -> String {
    format!("n{i}")
}

/// Graph over nodes `n0..n{n-1}` in index order, keeping isolated nodes.
pub fn build(n: usize, edges: &[(usize, usize, f64)], directed: bool) -> Graph {
    let mut b = GraphBuilder::new(directed);
    for i in 0..n {
        b.add_node(&label(i));
    }
    for &(i, j, w) in edges {
        b.add_edge(&label(i), &label(j), w).unwrap();
    }
    b.build().unwrap()
}

/// Erdős–Rényi style edge list. Undirected graphs list each pair once.
pub fn random_edges(
    rng: &mut StdRng,
    n: usize,
    p: f64,
    directed: bool,
    weight: impl Fn(&mut StdRng) -> f64,
) -> Edges {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j || (!directed && j < i) {
                continue;
            }
            if rng.gen_bool(p) {
                edges.push((i, j, weight(rng)));
            }
        }
    }
    edges
}

/// Random spanning tree plus extra edges with probability `p`.
pub fn random_connected_undirected(
    rng: &mut StdRng,
    n: usize,
    p: f64,
    weight: impl Fn(&mut StdRng) -> f64,
) -> Edges {
    let mut present = std::collections::HashSet::new();
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        present.insert((u, v));
        edges.push((u, v, weight(rng)));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !present.contains(&(i, j)) && rng.gen_bool(p) {
                edges.push((i, j, weight(rng)));
            }
        }
    }
    edges
}

/// A random Hamiltonian cycle plus extra arcs with probability `p`.
pub fn random_strongly_connected(
    rng: &mut StdRng,
    n: usize,
    p: f64,
    weight: impl Fn(&mut StdRng) -> f64,
) -> Edges {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut present = std::collections::HashSet::new();
    let mut edges = Vec::new();
    for k in 0..n {
        let (u, v) = (order[k], order[(k + 1) % n]);
        if u != v && present.insert((u, v)) {
            edges.push((u, v, weight(rng)));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && !present.contains(&(i, j)) && rng.gen_bool(p) {
                present.insert((i, j));
                edges.push((i, j, weight(rng)));
            }
        }
    }
    edges
}

/// `side × side` lattice with unit weights.
pub fn grid_edges(side: usize) -> Edges {
    let id = |r: usize, c: usize| r * side + c;
    let mut edges = Vec::new();
    for r in 0..side {
        for c in 0..side {
            if c + 1 < side {
                edges.push((id(r, c), id(r, c + 1), 1.0));
            }
            if r + 1 < side {
                edges.push((id(r, c), id(r + 1, c), 1.0));
            }
        }
    }
    edges
}

/// Arc lists `adj[u] = [(v, w)]`, mirroring undirected edges.
pub fn adjacency(
    n: usize,
    edges: &[(usize, usize, f64)],
    directed: bool,
) -> Vec<Vec<(usize, f64)>> {
    let mut adj = vec![Vec::new(); n];
    for &(i, j, w) in edges {
        adj[i].push((j, w));
        if !directed && i != j {
            adj[j].push((i, w));
        }
    }
    adj
}

/// Betweenness by enumerating every simple path between every ordered pair.
pub fn betweenness_by_enumeration(
    n: usize,
    edges: &[(usize, usize, f64)],
    directed: bool,
) -> Vec<f64> {
    let adj = adjacency(n, edges, directed);
    let mut b = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t {
                continue;
            }
            let mut paths: Vec<(f64, Vec<usize>)> = Vec::new();
            let mut stack = vec![s];
            let mut on = vec![false; n];
            on[s] = true;
            enumerate(&adj, t, &mut stack, &mut on, 0.0, &mut paths);
            let Some(best) = paths.iter().map(|p| p.0).reduce(f64::min) else {
                continue;
            };
            let shortest: Vec<&Vec<usize>> = paths
                .iter()
                .filter(|p| (p.0 - best).abs() <= 1e-12 * best.max(1.0))
                .map(|p| &p.1)
                .collect();
            let sigma = shortest.len() as f64;
            for path in shortest {
                for &v in &path[1..path.len() - 1] {
                    b[v] += 1.0 / sigma;
                }
            }
        }
    }
    b
}

fn enumerate(
    adj: &[Vec<(usize, f64)>],
    t: usize,
    stack: &mut Vec<usize>,
    on: &mut [bool],
    cost: f64,
    out: &mut Vec<(f64, Vec<usize>)>,
) {
    let u = *stack.last().unwrap();
    if u == t {
        out.push((cost, stack.clone()));
        return;
    }
    for &(v, w) in &adj[u] {
        if !on[v] {
            on[v] = true;
            stack.push(v);
            enumerate(adj, t, stack, on, cost + w, out);
            stack.pop();
            on[v] = false;
        }
    }
}

/// All-pairs distances by Floyd–Warshall; `INFINITY` when unreachable.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize, f64)], directed: bool) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for (u, row) in adjacency(n, edges, directed).into_iter().enumerate() {
        for (v, w) in row {
            d[u][v] = d[u][v].min(w);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Boolean reachability closure.
pub fn reachability(n: usize, edges: &[(usize, usize, f64)], directed: bool) -> Vec<Vec<bool>> {
    floyd_warshall(n, edges, directed)
        .into_iter()
        .map(|row| row.into_iter().map(f64::is_finite).collect())
        .collect()
}

/// Irreducibility test: every entry of `(I + A)^{n−1}` is positive.
pub fn irreducible_by_matrix_power(
    n: usize,
    edges: &[(usize, usize, f64)],
    directed: bool,
) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = vec![vec![false; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = true;
    }
    for (u, row) in adjacency(n, edges, directed).into_iter().enumerate() {
        for (v, _) in row {
            m[u][v] = true;
        }
    }
    let base = m.clone();
    for _ in 1..n.max(2) - 1 {
        let prev = m.clone();
        for i in 0..n {
            for j in 0..n {
                m[i][j] = (0..n).any(|k| prev[i][k] && base[k][j]);
            }
        }
    }
    m.iter().all(|row| row.iter().all(|&x| x))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
