//! Planar polygon helpers: areas, centroids and boundary-segment tests.

use crate::error::{Error, Result};
use crate::graph::Point;

/// One polygon: an exterior ring and zero or more holes. Rings are closed
/// (first vertex repeated at the end).
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonShape {
    pub exterior: Vec<Point>,
    pub holes: Vec<Vec<Point>>,
}

impl PolygonShape {
    pub fn new(exterior: Vec<Point>) -> Self {
        PolygonShape {
            exterior,
            holes: Vec::new(),
        }
    }

    pub fn rings(&self) -> impl Iterator<Item = &Vec<Point>> {
        std::iter::once(&self.exterior).chain(self.holes.iter())
    }
}

/// Signed shoelace area (positive for counter-clockwise) and the
/// area-weighted first moments `(Σ(x_i + x_{i+1}) c_i, Σ(y_i + y_{i+1}) c_i)`.
fn ring_moments(ring: &[Point]) -> (f64, f64, f64) {
    let mut twice_area = 0.0;
    let mut mx = 0.0;
    let mut my = 0.0;
    for w in ring.windows(2) {
        let (p, q) = (w[0], w[1]);
        let cross = p.x * q.y - q.x * p.y;
        twice_area += cross;
        mx += (p.x + q.x) * cross;
        my += (p.y + q.y) * cross;
    }
    (twice_area / 2.0, mx / 6.0, my / 6.0)
}

pub fn ring_area(ring: &[Point]) -> f64 {
    ring_moments(ring).0.abs()
}

/// Area-weighted centroid of a (multi)polygon. Exterior rings add area and
/// holes subtract it, whatever their winding order in the source data.
pub fn centroid(polygons: &[PolygonShape]) -> Result<Point> {
    let mut area = 0.0;
    let mut mx = 0.0;
    let mut my = 0.0;
    for poly in polygons {
        for (k, ring) in poly.rings().enumerate() {
            let (a, x, y) = ring_moments(ring);
            if a == 0.0 {
                continue;
            }
            // flip each ring to positive orientation, then negate holes
            let sign = a.signum() * if k == 0 { 1.0 } else { -1.0 };
            area += sign * a;
            mx += sign * x;
            my += sign * y;
        }
    }
    let scale = polygons
        .iter()
        .flat_map(|p| p.exterior.iter())
        .fold(0.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs()));
    if area.abs() <= f64::EPSILON * scale * scale || area == 0.0 {
        return Err(Error::DegeneratePolygon { op: "centroid" });
    }
    Ok(Point::new(mx / area, my / area))
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn bbox(&self) -> (Point, Point) {
        (
            Point::new(self.a.x.min(self.b.x), self.a.y.min(self.b.y)),
            Point::new(self.a.x.max(self.b.x), self.a.y.max(self.b.y)),
        )
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn point_segment_distance(p: Point, s: Segment) -> f64 {
    let (dx, dy) = (s.b.x - s.a.x, s.b.y - s.a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(s.a);
    }
    let t = (((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / len2).clamp(0.0, 1.0);
    p.distance(Point::new(s.a.x + t * dx, s.a.y + t * dy))
}

fn properly_cross(s: Segment, t: Segment) -> bool {
    let d1 = cross(t.a, t.b, s.a);
    let d2 = cross(t.a, t.b, s.b);
    let d3 = cross(s.a, s.b, t.a);
    let d4 = cross(s.a, s.b, t.b);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Minimum distance between two closed segments.
pub(crate) fn segment_distance(s: Segment, t: Segment) -> f64 {
    if properly_cross(s, t) {
        return 0.0;
    }
    point_segment_distance(s.a, t)
        .min(point_segment_distance(s.b, t))
        .min(point_segment_distance(t.a, s))
        .min(point_segment_distance(t.b, s))
}

/// Whether the segments are collinear within `tol` and overlap along a
/// stretch longer than `tol`.
pub(crate) fn share_stretch(s: Segment, t: Segment, tol: f64) -> bool {
    let (long, short) = if s.length() >= t.length() {
        (s, t)
    } else {
        (t, s)
    };
    let len = long.length();
    if len <= tol || short.length() <= tol {
        return false;
    }
    let ux = (long.b.x - long.a.x) / len;
    let uy = (long.b.y - long.a.y) / len;
    let offset = |p: Point| (p.x - long.a.x) * uy - (p.y - long.a.y) * ux;
    if offset(short.a).abs() > tol || offset(short.b).abs() > tol {
        return false;
    }
    let along = |p: Point| (p.x - long.a.x) * ux + (p.y - long.a.y) * uy;
    let (t0, t1) = (along(short.a), along(short.b));
    let lo = t0.min(t1).max(0.0);
    let hi = t0.max(t1).min(len);
    hi - lo > tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(pts: &[(f64, f64)]) -> Vec<Point> {
        let mut r: Vec<Point> = pts.iter().map(|&(x, y)| Point::new(x, y)).collect();
        r.push(r[0]);
        r
    }

    #[test]
    fn unit_square() {
        let sq = PolygonShape::new(ring(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]));
        assert_eq!(centroid(&[sq]).unwrap(), Point::new(0.5, 0.5));
    }

    #[test]
    fn triangle_is_vertex_average() {
        let t = PolygonShape::new(ring(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]));
        let c = centroid(&[t]).unwrap();
        assert!((c.x - 1.0 / 3.0).abs() < 1e-15 && (c.y - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn six_vertex_outline() {
        // [0,1]² ∪ [1,2]×[0,1] traced with its six outline vertices, clockwise
        let l = PolygonShape::new(ring(&[
            (0.0, 0.0),
            (0.0, 1.0),
            (1.0, 1.0),
            (2.0, 1.0),
            (2.0, 0.0),
            (1.0, 0.0),
        ]));
        assert_eq!(centroid(&[l]).unwrap(), Point::new(1.0, 0.5));
    }

    #[test]
    fn hole_shifts_centroid() {
        // 4x4 square with a 2x2 hole in its left half: area 12, moment
        // 16*2 - 4*1 = 28 -> x = 7/3
        let mut p = PolygonShape::new(ring(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]));
        p.holes
            .push(ring(&[(0.0, 1.0), (2.0, 1.0), (2.0, 3.0), (0.0, 3.0)]));
        let c = centroid(&[p]).unwrap();
        assert!((c.x - 7.0 / 3.0).abs() < 1e-12);
        assert!((c.y - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_area_rejected() {
        let flat = PolygonShape::new(ring(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]));
        assert!(matches!(
            centroid(&[flat]),
            Err(Error::DegeneratePolygon { .. })
        ));
    }

    #[test]
    fn segment_tests() {
        let s = |a: (f64, f64), b: (f64, f64)| Segment {
            a: Point::new(a.0, a.1),
            b: Point::new(b.0, b.1),
        };
        assert_eq!(
            segment_distance(s((0., 0.), (2., 2.)), s((0., 2.), (2., 0.))),
            0.0
        );
        assert_eq!(
            segment_distance(s((0., 0.), (1., 0.)), s((1., 0.), (1., 1.))),
            0.0
        );
        assert!(
            (segment_distance(s((0., 0.), (1., 0.)), s((0., 1.), (1., 1.))) - 1.0).abs() < 1e-15
        );
        assert!(share_stretch(
            s((0., 0.), (2., 0.)),
            s((1., 0.), (3., 0.)),
            1e-9
        ));
        assert!(!share_stretch(
            s((0., 0.), (1., 0.)),
            s((1., 0.), (2., 0.)),
            1e-9
        ));
        assert!(!share_stretch(
            s((0., 0.), (1., 0.)),
            s((0., 0.1), (1., 0.1)),
            1e-9
        ));
        assert!(share_stretch(
            s((0., 0.), (1., 0.)),
            s((1., 1e-12), (0., -1e-12)),
            1e-9
        ));
    }
}
