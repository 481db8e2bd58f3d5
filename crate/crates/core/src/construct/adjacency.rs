use std::collections::HashMap;

use rayon::prelude::*;

use super::geometry::{segment_distance, share_stretch, Segment};
use super::partition::Partition;
use crate::error::{Error, Result};
use crate::graph::{Graph, Point};

/// Boundary-contact rule for region adjacency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Contiguity {
    /// Any shared boundary point.
    #[default]
    Queen,
    /// A shared boundary stretch of positive length.
    Rook,
}

pub const DEFAULT_SNAP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
struct BBox {
    min: Point,
    max: Point,
}

impl BBox {
    fn of(points: impl Iterator<Item = Point>) -> BBox {
        let mut b = BBox {
            min: Point::new(f64::INFINITY, f64::INFINITY),
            max: Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        };
        for p in points {
            b.min.x = b.min.x.min(p.x);
            b.min.y = b.min.y.min(p.y);
            b.max.x = b.max.x.max(p.x);
            b.max.y = b.max.y.max(p.y);
        }
        b
    }

    fn grow(self, d: f64) -> BBox {
        BBox {
            min: Point::new(self.min.x - d, self.min.y - d),
            max: Point::new(self.max.x + d, self.max.y + d),
        }
    }

    fn intersects(&self, o: &BBox) -> bool {
        self.min.x <= o.max.x
            && o.min.x <= self.max.x
            && self.min.y <= o.max.y
            && o.min.y <= self.max.y
    }
}

struct Outline {
    segments: Vec<Segment>,
    bbox: BBox,
}

fn outline(region: &super::partition::Region) -> Outline {
    let segments: Vec<Segment> = region
        .polygons
        .iter()
        .flat_map(|p| p.rings())
        .flat_map(|ring| ring.windows(2).map(|w| Segment { a: w[0], b: w[1] }))
        .collect();
    let bbox = BBox::of(segments.iter().flat_map(|s| [s.a, s.b]));
    Outline { segments, bbox }
}

/// Region Adjacency graph: one node per region placed at its centroid, a unit
/// edge between every pair of regions whose boundaries touch under
/// `contiguity`, with vertices closer than `tol` treated as coincident.
pub fn region_adjacency_graph(p: &Partition, contiguity: Contiguity, tol: f64) -> Result<Graph> {
    if p.is_empty() {
        return Err(Error::invalid(
            "region_adjacency_graph",
            "partition has no regions",
        ));
    }
    if !(tol >= 0.0) {
        return Err(Error::invalid(
            "region_adjacency_graph",
            format!("tolerance {tol} is negative"),
        ));
    }
    let centroids = p
        .regions()
        .iter()
        .map(|r| r.centroid())
        .collect::<Result<Vec<_>>>()?;
    let outlines: Vec<Outline> = p.regions().iter().map(outline).collect();

    let pairs = candidate_pairs(&outlines, tol);
    let mut edges: Vec<(usize, usize)> = pairs
        .into_par_iter()
        .filter(|&(i, j)| touches(&outlines[i], &outlines[j], contiguity, tol))
        .collect();
    edges.sort_unstable();

    let labels = p.ids().map(str::to_owned).collect();
    Ok(Graph::from_triplets(
        false,
        labels,
        Some(centroids),
        edges.into_iter().map(|(i, j)| (i, j, 1.0)),
    ))
}

/// Region pairs `i < j` whose tolerance-grown bounding boxes overlap, found
/// through a uniform grid over the partition extent.
fn candidate_pairs(outlines: &[Outline], tol: f64) -> Vec<(usize, usize)> {
    let boxes: Vec<BBox> = outlines.iter().map(|o| o.bbox.grow(tol)).collect();
    let mut extents: Vec<f64> = boxes
        .iter()
        .map(|b| (b.max.x - b.min.x).max(b.max.y - b.min.y))
        .collect();
    extents.sort_by(f64::total_cmp);
    let cell = extents[extents.len() / 2].max(f64::MIN_POSITIVE);
    let key = |v: f64| (v / cell).floor() as i64;

    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, b) in boxes.iter().enumerate() {
        for gx in key(b.min.x)..=key(b.max.x) {
            for gy in key(b.min.y)..=key(b.max.y) {
                grid.entry((gx, gy)).or_default().push(i);
            }
        }
    }
    let mut pairs = Vec::new();
    for members in grid.values() {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                if boxes[i].intersects(&boxes[j]) {
                    pairs.push((i.min(j), i.max(j)));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

fn touches(a: &Outline, b: &Outline, contiguity: Contiguity, tol: f64) -> bool {
    let window = a.bbox.grow(tol);
    let near = |s: &&Segment| {
        let (lo, hi) = s.bbox();
        window.intersects(&BBox { min: lo, max: hi }.grow(tol))
    };
    let b_near: Vec<&Segment> = b.segments.iter().filter(near).collect();
    let window_b = b.bbox.grow(tol);
    a.segments
        .iter()
        .filter(|s| {
            let (lo, hi) = s.bbox();
            window_b.intersects(&BBox { min: lo, max: hi })
        })
        .any(|s| {
            b_near.iter().any(|t| match contiguity {
                Contiguity::Queen => segment_distance(*s, **t) <= tol,
                Contiguity::Rook => share_stretch(*s, **t, tol),
            })
        })
}
