//! Edge-list text and MatrixMarket coordinate files.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use nalgebra::DMatrix;

use super::{Graph, GraphBuilder, Point};
use crate::error::{Error, Result};

/// Parses `source,target,weight` lines. Blank lines and `#` comments are
/// skipped, as is an optional `source,target,weight` header.
pub fn read_edge_list<R: BufRead>(reader: R, directed: bool) -> Result<Graph> {
    let mut builder = GraphBuilder::new(directed);
    read_edges_into(reader, &mut builder)?;
    builder.build()
}

pub fn read_edges_into<R: BufRead>(reader: R, builder: &mut GraphBuilder) -> Result<()> {
    for (k, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io("edge list", e))?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split(',').map(str::trim).collect();
        if k == 0 && fields == ["source", "target", "weight"] {
            continue;
        }
        let parse_err = |reason: String| Error::Parse {
            context: "edge list".into(),
            line: k + 1,
            reason,
        };
        if fields.len() != 3 {
            return Err(parse_err(format!(
                "expected 3 fields, found {}",
                fields.len()
            )));
        }
        let weight: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(format!("invalid weight '{}'", fields[2])))?;
        builder.add_edge(fields[0], fields[1], weight)?;
    }
    Ok(())
}

/// Reads `id,x,y` node positions (header required) into the builder.
pub fn read_node_coords_into<R: std::io::Read>(
    reader: R,
    builder: &mut GraphBuilder,
) -> Result<()> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Csv {
            context: "node coordinates".into(),
            source: e,
        })?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::invalid("node coordinates", format!("bad record {rec:?}")))
        };
        let id = rec.get(0).unwrap_or_default();
        builder.add_node_at(id, Point::new(num(1)?, num(2)?));
    }
    Ok(())
}

/// Writes each edge once as `source,target,weight`, with a header line.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    let mut buf = String::from("source,target,weight\n");
    for (i, j, w) in g.edges() {
        writeln!(buf, "{},{},{}", g.label(i), g.label(j), w).unwrap();
    }
    out.write_all(buf.as_bytes())
        .map_err(|e| Error::io("edge list", e))
}

/// Writes `id,x,y` for every node; nodes without an embedding are skipped.
pub fn write_node_coords<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    let mut buf = String::from("id,x,y\n");
    if let Some(coords) = g.coords() {
        for (label, p) in g.labels().iter().zip(coords) {
            writeln!(buf, "{},{},{}", label, p.x, p.y).unwrap();
        }
    }
    out.write_all(buf.as_bytes())
        .map_err(|e| Error::io("node coordinates", e))
}

/// MatrixMarket coordinate file of the adjacency pattern (1-based indices,
/// edge weights as values).
pub fn write_matrix_market_pattern<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    let n = g.node_count();
    let mut buf = String::from("%%MatrixMarket matrix coordinate real general\n");
    writeln!(buf, "{} {} {}", n, n, g.nnz()).unwrap();
    for (i, j, w) in g.arcs() {
        writeln!(buf, "{} {} {}", i + 1, j + 1, w).unwrap();
    }
    out.write_all(buf.as_bytes())
        .map_err(|e| Error::io("matrix market", e))
}

/// Writes the nonzero entries of a dense matrix in MatrixMarket coordinate form.
pub fn write_matrix_market_dense<W: Write>(m: &DMatrix<f64>, mut out: W) -> Result<()> {
    let entries: Vec<(usize, usize, f64)> = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, m[(i, j)]))
        .filter(|&(_, _, v)| v != 0.0)
        .collect();
    let mut buf = String::from("%%MatrixMarket matrix coordinate real general\n");
    writeln!(buf, "{} {} {}", m.nrows(), m.ncols(), entries.len()).unwrap();
    for (i, j, v) in entries {
        writeln!(buf, "{} {} {}", i + 1, j + 1, v).unwrap();
    }
    out.write_all(buf.as_bytes())
        .map_err(|e| Error::io("matrix market", e))
}

/// `(row, col, value)` entries with 0-based indices.
pub type Triplets = Vec<(usize, usize, f64)>;

/// Reads `(rows, cols, entries)` back from a MatrixMarket coordinate file,
/// converted to 0-based indices.
pub fn read_matrix_market_pattern<R: BufRead>(reader: R) -> Result<(usize, usize, Triplets)> {
    let mut lines = reader.lines().enumerate().filter(|(_, l)| {
        l.as_ref()
            .map_or(true, |s| !s.starts_with('%') && !s.trim().is_empty())
    });
    let bad = |line: usize, reason: &str| Error::Parse {
        context: "matrix market".into(),
        line: line + 1,
        reason: reason.into(),
    };
    let (k, header) = lines.next().ok_or_else(|| bad(0, "missing size line"))?;
    let header = header.map_err(|e| Error::io("matrix market", e))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| bad(k, "bad size line")))
        .collect::<Result<_>>()?;
    if dims.len() != 3 {
        return Err(bad(k, "bad size line"));
    }
    let mut entries = Vec::with_capacity(dims[2]);
    for (k, line) in lines {
        let line = line.map_err(|e| Error::io("matrix market", e))?;
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() < 2 {
            return Err(bad(k, "bad entry"));
        }
        let i: usize = t[0].parse().map_err(|_| bad(k, "bad row"))?;
        let j: usize = t[1].parse().map_err(|_| bad(k, "bad col"))?;
        let v: f64 = t
            .get(2)
            .map_or(Ok(1.0), |s| s.parse().map_err(|_| bad(k, "bad value")))?;
        entries.push((i - 1, j - 1, v));
    }
    Ok((dims[0], dims[1], entries))
}
