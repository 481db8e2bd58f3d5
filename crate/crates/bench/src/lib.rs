//! Deterministic fixtures for the benchmarks.

use mobgraph::construct::{Partition, PolygonShape, Region};
use mobgraph::flows::{Distances, GravitySpec};
use mobgraph::{Graph, GraphBuilder, Point};

/// `side × side` lattice, undirected with unit weights.
pub fn grid(side: usize) -> Graph {
    let mut b = GraphBuilder::new(false);
    let id = |r: usize, c: usize| format!("{r}:{c}");
    for r in 0..side {
        for c in 0..side {
            b.add_node(&id(r, c));
        }
    }
    for r in 0..side {
        for c in 0..side {
            if c + 1 < side {
                b.add_edge(&id(r, c), &id(r, c + 1), 1.0).unwrap();
            }
            if r + 1 < side {
                b.add_edge(&id(r, c), &id(r + 1, c), 1.0).unwrap();
            }
        }
    }
    b.build().unwrap()
}

/// Directed cycle `0 → 1 → … → n−1 → 0` plus chords `i → i + stride`.
/// Strongly connected, with weights varying so the walk is non-uniform.
pub fn ring_with_chords(n: usize, stride: usize) -> Graph {
    let mut b = GraphBuilder::new(true);
    for i in 0..n {
        b.add_node(&i.to_string());
    }
    for i in 0..n {
        b.add_edge(
            &i.to_string(),
            &((i + 1) % n).to_string(),
            1.0 + (i % 3) as f64,
        )
        .unwrap();
        let j = (i + stride) % n;
        if stride > 1 && j != (i + 1) % n && j != i {
            b.add_edge(&i.to_string(), &j.to_string(), 0.5).unwrap();
        }
    }
    b.build().unwrap()
}

/// Unit-square tiling with `rows × cols` regions.
pub fn square_partition(rows: usize, cols: usize) -> Partition {
    let mut regions = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let (x, y) = (c as f64, r as f64);
            let ring = vec![
                Point::new(x, y),
                Point::new(x + 1.0, y),
                Point::new(x + 1.0, y + 1.0),
                Point::new(x, y + 1.0),
                Point::new(x, y),
            ];
            regions.push(Region::new(
                format!("{r}:{c}"),
                vec![PolygonShape {
                    exterior: ring,
                    holes: Vec::new(),
                }],
            ));
        }
    }
    Partition::new(regions).unwrap()
}

/// `n` locations on a sunflower spiral with varied masses and outflows.
pub fn gravity_spec(n: usize) -> GravitySpec {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let coords = (0..n)
        .map(|i| {
            let r = (i as f64 + 0.5).sqrt();
            let t = i as f64 * golden;
            Point::new(r * t.cos(), r * t.sin())
        })
        .collect();
    GravitySpec {
        ids: (0..n).map(|i| i.to_string()).collect(),
        outflows: (0..n).map(|i| 100.0 + (i % 17) as f64 * 10.0).collect(),
        masses: (0..n).map(|i| 1.0 + (i % 11) as f64).collect(),
        distances: Distances::Euclidean(coords),
        beta1: 1.0,
        deterrence: Default::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mobgraph::{components, ComponentMode};

    #[test]
    fn fixtures_have_expected_shape() {
        let g = grid(4);
        assert_eq!((g.node_count(), g.edge_count()), (16, 24));
        let r = ring_with_chords(10, 3);
        assert_eq!(r.edge_count(), 20);
        assert_eq!(components(&r, ComponentMode::Strong).count(), 1);
        assert_eq!(square_partition(2, 3).len(), 6);
        assert_eq!(gravity_spec(5).ids.len(), 5);
    }
}
