use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Sparse square matrix of non-negative flows keyed by region ids.
///
/// Only strictly positive flows are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ODMatrix {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    flows: BTreeMap<(usize, usize), f64>,
}

impl ODMatrix {
    pub fn new(ids: Vec<String>) -> Result<ODMatrix> {
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::invalid("od_matrix", format!("duplicate id '{id}'")));
            }
        }
        Ok(ODMatrix {
            ids,
            index,
            flows: BTreeMap::new(),
        })
    }

    /// Builds from a dense row-major matrix.
    pub fn from_dense(ids: Vec<String>, rows: &[Vec<f64>]) -> Result<ODMatrix> {
        let mut m = ODMatrix::new(ids)?;
        if rows.len() != m.len() || rows.iter().any(|r| r.len() != m.len()) {
            return Err(Error::DimensionMismatch {
                op: "od_matrix",
                expected: m.len(),
                actual: rows.len(),
            });
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v)?;
            }
        }
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Sets `M_ij`. Zero clears the entry; negative or non-finite values are rejected.
    pub fn set(&mut self, i: usize, j: usize, flow: f64) -> Result<()> {
        if !(flow >= 0.0) || !flow.is_finite() {
            return Err(Error::invalid(
                "od_matrix",
                format!(
                    "flow {} -> {} is {flow}; flows must be non-negative",
                    self.ids[i], self.ids[j]
                ),
            ));
        }
        if flow == 0.0 {
            self.flows.remove(&(i, j));
        } else {
            self.flows.insert((i, j), flow);
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.flows.get(&(i, j)).copied().unwrap_or(0.0)
    }

    /// Stored `(i, j, flow)` entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.flows.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn nnz(&self) -> usize {
        self.flows.len()
    }

    pub fn total(&self) -> f64 {
        self.flows.values().sum()
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.flows.range((i, 0)..(i + 1, 0)).map(|(_, &v)| v).sum()
    }

    /// Reads `origin,destination,flow` triples (header required). Ids listed in
    /// `extra_ids` come first, in order, so isolated regions are retained.
    /// Repeated pairs are rejected.
    pub fn from_csv<R: Read>(reader: R, extra_ids: &[String]) -> Result<ODMatrix> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let csv_err = |e| Error::Csv {
            context: "od csv".into(),
            source: e,
        };
        let headers = rdr.headers().map_err(csv_err)?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::invalid("od csv", format!("missing column '{name}'")))
        };
        let (co, cd, cf) = (col("origin")?, col("destination")?, col("flow")?);
        let mut triples = Vec::new();
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let flow: f64 = rec[cf].parse().map_err(|_| Error::Parse {
                context: "od csv".into(),
                line: k + 2,
                reason: format!("invalid flow '{}'", &rec[cf]),
            })?;
            triples.push((rec[co].to_owned(), rec[cd].to_owned(), flow));
        }
        let mut ids: Vec<String> = extra_ids.to_vec();
        let mut seen: HashMap<String, usize> = HashMap::new();
        for (i, id) in ids.iter().enumerate() {
            seen.entry(id.clone()).or_insert(i);
        }
        for (o, d, _) in &triples {
            for id in [o, d] {
                if !seen.contains_key(id) {
                    seen.insert(id.clone(), ids.len());
                    ids.push(id.clone());
                }
            }
        }
        let mut m = ODMatrix::new(ids)?;
        let mut pairs = std::collections::HashSet::new();
        for (o, d, f) in triples {
            let (i, j) = (seen[&o], seen[&d]);
            if !pairs.insert((i, j)) {
                return Err(Error::invalid(
                    "od csv",
                    format!("repeated pair ({o}, {d})"),
                ));
            }
            m.set(i, j, f)?;
        }
        Ok(m)
    }

    /// Writes `origin,destination,flow` for every stored entry.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut buf = String::from("origin,destination,flow\n");
        for (i, j, v) in self.entries() {
            writeln!(buf, "{},{},{}", self.ids[i], self.ids[j], v).unwrap();
        }
        out.write_all(buf.as_bytes())
            .map_err(|e| Error::io("od csv", e))
    }

    /// Re-indexes onto `ids`, which must be a permutation of this matrix's ids.
    pub fn aligned_to(&self, ids: &[String]) -> Result<ODMatrix> {
        if ids.len() != self.len() {
            return Err(Error::DimensionMismatch {
                op: "od_matrix",
                expected: ids.len(),
                actual: self.len(),
            });
        }
        let mut m = ODMatrix::new(ids.to_vec())?;
        let mut perm = vec![0; self.len()];
        for (i, id) in self.ids.iter().enumerate() {
            perm[i] = m.index_of(id).ok_or_else(|| {
                Error::invalid("od_matrix", format!("id '{id}' missing from target id set"))
            })?;
        }
        for (i, j, v) in self.entries() {
            m.flows.insert((perm[i], perm[j]), v);
        }
        Ok(m)
    }
}

/// Reads one id per line (blank lines and `#` comments skipped).
pub fn read_id_list<R: BufRead>(reader: R) -> Result<Vec<String>> {
    let mut ids = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(|e| Error::io("id list", e))?;
        let id = line.split('#').next().unwrap_or("").trim();
        if !id.is_empty() {
            ids.push(id.to_owned());
        }
    }
    Ok(ids)
}

/// Directed graph with an arc `i -> j` of weight `M_ij` for every positive
/// entry. Every id becomes a node, including regions with no flows. The
/// diagonal is dropped unless `include_self_loops`.
pub fn od_graph(m: &ODMatrix, include_self_loops: bool) -> Graph {
    Graph::from_triplets(
        true,
        m.ids.clone(),
        None,
        m.entries()
            .filter(|&(i, j, _)| include_self_loops || i != j),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    #[test]
    fn diagonal_handling() {
        let m = ODMatrix::from_dense(ids(2), &[vec![5.0, 2.0], vec![0.0, 7.0]]).unwrap();
        let g = od_graph(&m, false);
        assert_eq!((g.node_count(), g.nnz()), (2, 1));
        assert_eq!(g.weight(0, 1), 2.0);
        assert_eq!(od_graph(&m, true).nnz(), 3);
    }

    #[test]
    fn negative_flow_rejected() {
        assert!(ODMatrix::from_dense(ids(2), &[vec![0.0, -1.0], vec![0.0, 0.0]]).is_err());
    }

    #[test]
    fn isolated_ids_retained() {
        let csv = "origin,destination,flow\na,b,3\n";
        let m = ODMatrix::from_csv(csv.as_bytes(), &["z".to_string()]).unwrap();
        assert_eq!(m.ids(), &["z", "a", "b"]);
        let g = od_graph(&m, false);
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.out_degree_count(0), 0);
    }

    #[test]
    fn csv_round_trip() {
        let csv = "origin,destination,flow\na,b,3.5\nb,a,1\n";
        let m = ODMatrix::from_csv(csv.as_bytes(), &[]).unwrap();
        let mut out = Vec::new();
        m.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), csv);
    }

    #[test]
    fn repeated_pair_rejected() {
        let csv = "origin,destination,flow\na,b,3\na,b,1\n";
        assert!(ODMatrix::from_csv(csv.as_bytes(), &[]).is_err());
    }

    #[test]
    fn realign() {
        let m = ODMatrix::from_dense(ids(2), &[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let r = m.aligned_to(&["1".into(), "0".into()]).unwrap();
        assert_eq!(r.get(1, 0), 2.0);
    }
}
