//! Choropleth-ready GeoJSON: partition geometry joined with a metric table.

use std::collections::HashMap;
use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::construct::Partition;
use crate::error::{Error, Result};
use crate::metrics::MetricTable;

/// A joined FeatureCollection plus the partition ids that had no table row.
#[derive(Debug, Clone)]
pub struct MetricGeoJson {
    pub document: Value,
    pub missing: Vec<String>,
}

/// Joins `table` onto `p` by id. Every region becomes a feature with its
/// original geometry, an `id` property and one property per metric column.
/// Regions absent from the table (pruned nodes, say) get null metrics.
pub fn metric_geojson(p: &Partition, table: &MetricTable) -> Result<MetricGeoJson> {
    let row: HashMap<&str, usize> = table
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let region_ids: std::collections::HashSet<&str> = p.ids().collect();
    let unknown: Vec<&str> = table
        .nodes()
        .iter()
        .map(String::as_str)
        .filter(|n| !region_ids.contains(n))
        .collect();
    if !unknown.is_empty() {
        return Err(Error::invalid(
            "export_metric_geojson",
            format!("table labels not in partition: {}", unknown.join(", ")),
        ));
    }

    let mut missing = Vec::new();
    let features = p
        .regions()
        .iter()
        .map(|region| {
            let i = row.get(region.id.as_str()).copied();
            if i.is_none() {
                missing.push(region.id.clone());
            }
            let mut props = Map::new();
            props.insert("id".into(), Value::String(region.id.clone()));
            for (name, values) in table.columns() {
                let v = i
                    .and_then(|i| Number::from_f64(values[i]))
                    .map_or(Value::Null, Value::Number);
                props.insert(name.clone(), v);
            }
            let mut f = Map::new();
            f.insert("type".into(), "Feature".into());
            f.insert("properties".into(), Value::Object(props));
            f.insert("geometry".into(), region.geometry_json());
            Value::Object(f)
        })
        .collect();

    let mut doc = Map::new();
    doc.insert("type".into(), "FeatureCollection".into());
    doc.insert("features".into(), Value::Array(features));
    Ok(MetricGeoJson {
        document: Value::Object(doc),
        missing,
    })
}

/// Writes the joined collection and returns the ids that had no metrics.
pub fn export_metric_geojson<W: Write>(
    p: &Partition,
    table: &MetricTable,
    out: W,
) -> Result<Vec<String>> {
    let joined = metric_geojson(p, table)?;
    serde_json::to_writer(out, &joined.document).map_err(|e| Error::Json {
        context: "metric geojson".into(),
        source: e,
    })?;
    Ok(joined.missing)
}
