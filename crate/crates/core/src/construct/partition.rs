use std::collections::HashSet;
use std::io::Read;

use serde_json::{Map, Value};

use super::geometry::{centroid, PolygonShape};
use crate::error::{Error, Result};
use crate::graph::Point;

/// A region of a planar partition.
#[derive(Debug, Clone)]
pub struct Region {
    pub id: String,
    pub polygons: Vec<PolygonShape>,
    pub population: Option<f64>,
    /// Source GeoJSON geometry, kept verbatim for export.
    pub geometry: Option<Value>,
}

impl Region {
    pub fn new(id: impl Into<String>, polygons: Vec<PolygonShape>) -> Self {
        Region {
            id: id.into(),
            polygons,
            population: None,
            geometry: None,
        }
    }

    pub fn centroid(&self) -> Result<Point> {
        centroid(&self.polygons)
    }

    /// GeoJSON geometry: the stored source geometry, or one rebuilt from the rings.
    pub fn geometry_json(&self) -> Value {
        if let Some(g) = &self.geometry {
            return g.clone();
        }
        let ring_json = |ring: &Vec<Point>| -> Value {
            Value::Array(
                ring.iter()
                    .map(|p| Value::Array(vec![p.x.into(), p.y.into()]))
                    .collect(),
            )
        };
        let poly_json =
            |p: &PolygonShape| Value::Array(p.rings().map(ring_json).collect::<Vec<_>>());
        let mut m = Map::new();
        if self.polygons.len() == 1 {
            m.insert("type".into(), "Polygon".into());
            m.insert("coordinates".into(), poly_json(&self.polygons[0]));
        } else {
            m.insert("type".into(), "MultiPolygon".into());
            m.insert(
                "coordinates".into(),
                Value::Array(self.polygons.iter().map(poly_json).collect()),
            );
        }
        Value::Object(m)
    }
}

/// Regions of a planar partition with unique ids.
#[derive(Debug, Clone)]
pub struct Partition {
    regions: Vec<Region>,
}

impl Partition {
    /// Validates ids and rings: unique ids, closed rings, at least three
    /// distinct vertices per ring.
    pub fn new(regions: Vec<Region>) -> Result<Partition> {
        let mut seen = HashSet::new();
        for r in &regions {
            if !seen.insert(r.id.as_str()) {
                return Err(Error::invalid(
                    "partition",
                    format!("duplicate region id '{}'", r.id),
                ));
            }
            if r.polygons.is_empty() {
                return Err(Error::invalid(
                    "partition",
                    format!("region '{}' has no polygons", r.id),
                ));
            }
            for ring in r.polygons.iter().flat_map(|p| p.rings()) {
                validate_ring(&r.id, ring)?;
            }
            if let Some(p) = r.population {
                if !(p >= 0.0) {
                    return Err(Error::invalid(
                        "partition",
                        format!("region '{}' has negative population {p}", r.id),
                    ));
                }
            }
        }
        Ok(Partition { regions })
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.regions.iter().map(|r| r.id.as_str())
    }

    /// Parses a GeoJSON FeatureCollection of Polygon/MultiPolygon features
    /// carrying a string `id` property and optional numeric `population`.
    pub fn from_geojson<R: Read>(reader: R) -> Result<Partition> {
        let doc: Value = serde_json::from_reader(reader).map_err(|e| Error::Json {
            context: "partition geojson".into(),
            source: e,
        })?;
        let features = doc
            .get("features")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::invalid("partition", "expected a FeatureCollection"))?;
        let mut regions = Vec::with_capacity(features.len());
        for (k, f) in features.iter().enumerate() {
            regions.push(parse_feature(k, f)?);
        }
        Partition::new(regions)
    }
}

fn validate_ring(id: &str, ring: &[Point]) -> Result<()> {
    if ring.len() < 2 || ring.first() != ring.last() {
        return Err(Error::invalid(
            "partition",
            format!("region '{id}' has an unclosed ring"),
        ));
    }
    let mut distinct: Vec<(u64, u64)> = ring[..ring.len() - 1]
        .iter()
        .map(|p| (p.x.to_bits(), p.y.to_bits()))
        .collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::invalid(
            "partition",
            format!("region '{id}' has a ring with fewer than 3 distinct vertices"),
        ));
    }
    Ok(())
}

fn parse_feature(k: usize, f: &Value) -> Result<Region> {
    let bad = |reason: String| Error::invalid("partition", format!("feature {k}: {reason}"));
    let props = f.get("properties").and_then(Value::as_object);
    let id = match props.and_then(|p| p.get("id")) {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        _ => return Err(bad("missing string property 'id'".into())),
    };
    let population = match props.and_then(|p| p.get("population")) {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            v.as_f64()
                .ok_or_else(|| bad("property 'population' is not a number".into()))?,
        ),
    };
    let geometry = f
        .get("geometry")
        .filter(|g| !g.is_null())
        .ok_or_else(|| bad("missing geometry".into()))?;
    let coords = geometry
        .get("coordinates")
        .ok_or_else(|| bad("geometry has no coordinates".into()))?;
    let polygons = match geometry.get("type").and_then(Value::as_str) {
        Some("Polygon") => vec![parse_polygon(coords).map_err(bad)?],
        Some("MultiPolygon") => coords
            .as_array()
            .ok_or_else(|| bad("MultiPolygon coordinates must be an array".into()))?
            .iter()
            .map(parse_polygon)
            .collect::<std::result::Result<_, _>>()
            .map_err(bad)?,
        other => return Err(bad(format!("unsupported geometry type {other:?}"))),
    };
    Ok(Region {
        id,
        polygons,
        population,
        geometry: Some(geometry.clone()),
    })
}

fn parse_polygon(v: &Value) -> std::result::Result<PolygonShape, String> {
    let rings = v.as_array().ok_or("polygon must be an array of rings")?;
    let mut parsed = rings.iter().map(|r| {
        r.as_array()
            .ok_or("ring must be an array of positions")?
            .iter()
            .map(|pos| match pos.as_array().map(Vec::as_slice) {
                Some([x, y, ..]) => match (x.as_f64(), y.as_f64()) {
                    (Some(x), Some(y)) => Ok(Point::new(x, y)),
                    _ => Err("non-numeric coordinate"),
                },
                _ => Err("position must have at least two coordinates"),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
    });
    let exterior = parsed.next().ok_or("polygon has no rings")??;
    let holes = parsed.collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(PolygonShape { exterior, holes })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = r#"{"type":"FeatureCollection","features":[
      {"type":"Feature","properties":{"id":"a","population":10},
       "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,1],[0,0]]]}},
      {"type":"Feature","properties":{"id":"b"},
       "geometry":{"type":"MultiPolygon","coordinates":[[[[1,0],[2,0],[2,1],[1,1],[1,0]]],[[[5,5],[6,5],[6,6],[5,5]]]]}}
    ]}"#;

    #[test]
    fn parses_polygon_and_multipolygon() {
        let p = Partition::from_geojson(TWO.as_bytes()).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.regions()[0].population, Some(10.0));
        assert_eq!(p.regions()[1].population, None);
        assert_eq!(p.regions()[1].polygons.len(), 2);
        assert_eq!(p.regions()[0].centroid().unwrap(), Point::new(0.5, 0.5));
    }

    #[test]
    fn rejects_duplicate_ids() {
        let doc = TWO.replace(r#""id":"b""#, r#""id":"a""#);
        assert!(Partition::from_geojson(doc.as_bytes()).is_err());
    }

    #[test]
    fn rejects_open_ring() {
        let doc = TWO.replace("[0,1],[0,0]]]", "[0,1]]]");
        let err = Partition::from_geojson(doc.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("unclosed"));
    }

    #[test]
    fn rejects_missing_id() {
        let doc = TWO.replace(r#""id":"a","#, "");
        assert!(Partition::from_geojson(doc.as_bytes()).is_err());
    }
}
