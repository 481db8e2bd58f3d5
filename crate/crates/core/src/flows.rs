//! Gravity-model flow generation, CPC scoring and diffusion-based population
//! estimates.

use std::collections::HashMap;
use std::io::Read;

use rayon::prelude::*;

use crate::construct::ODMatrix;
use crate::error::{Error, Result};
use crate::graph::{components, ComponentMode, Graph, Point};
use crate::laplacian::{laplacian, laplacian_pseudoinverse, LaplacianKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Deterrence {
    /// `f(r) = r^{−β2}`
    Power(f64),
    /// `f(r) = e^{−β2 r}`
    Exponential(f64),
}

impl Default for Deterrence {
    fn default() -> Self {
        Deterrence::Power(2.0)
    }
}

impl Deterrence {
    pub fn exponent(self) -> f64 {
        match self {
            Deterrence::Power(b) | Deterrence::Exponential(b) => b,
        }
    }

    pub fn eval(self, r: f64) -> f64 {
        match self {
            Deterrence::Power(b) => r.powf(-b),
            Deterrence::Exponential(b) => (-b * r).exp(),
        }
    }
}

/// Pairwise distances between the nodes of a [`GravitySpec`].
#[derive(Debug, Clone)]
pub enum Distances {
    /// Euclidean distances between planar positions.
    Euclidean(Vec<Point>),
    /// Explicit `(origin, destination) -> distance` table.
    Table(HashMap<(usize, usize), f64>),
}

impl Distances {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        match self {
            Distances::Euclidean(p) => Some(p[i].distance(p[j])),
            Distances::Table(t) => t.get(&(i, j)).copied(),
        }
    }
}

/// Inputs of the singly-constrained gravity model.
#[derive(Debug, Clone)]
pub struct GravitySpec {
    pub ids: Vec<String>,
    /// Trips leaving each origin, `O_i ≥ 0`.
    pub outflows: Vec<f64>,
    /// Destination masses, `m_j > 0`.
    pub masses: Vec<f64>,
    pub distances: Distances,
    pub beta1: f64,
    pub deterrence: Deterrence,
}

/// Destinations considered for each origin.
#[derive(Debug, Clone, Default)]
pub enum CandidateSets {
    /// Every node except the origin itself.
    #[default]
    AllOthers,
    /// `sets[i]` lists the destinations of origin `i`.
    Explicit(Vec<Vec<usize>>),
}

impl GravitySpec {
    fn validate(&self) -> Result<()> {
        let n = self.ids.len();
        for (name, len) in [
            ("outflows", self.outflows.len()),
            ("masses", self.masses.len()),
        ] {
            if len != n {
                return Err(Error::invalid(
                    "gravity_flows",
                    format!("{name} has {len} entries for {n} nodes"),
                ));
            }
        }
        if let Distances::Euclidean(p) = &self.distances {
            if p.len() != n {
                return Err(Error::DimensionMismatch {
                    op: "gravity_flows",
                    expected: n,
                    actual: p.len(),
                });
            }
        }
        if let Some(i) = self
            .outflows
            .iter()
            .position(|&o| !(o >= 0.0) || !o.is_finite())
        {
            return Err(Error::invalid(
                "gravity_flows",
                format!("origin '{}' has invalid outflow", self.ids[i]),
            ));
        }
        if let Some(i) = self
            .masses
            .iter()
            .position(|&m| !(m > 0.0) || !m.is_finite())
        {
            return Err(Error::invalid(
                "gravity_flows",
                format!("node '{}' has non-positive mass", self.ids[i]),
            ));
        }
        if !(self.deterrence.exponent() >= 0.0) {
            return Err(Error::invalid(
                "gravity_flows",
                "deterrence exponent must be non-negative",
            ));
        }
        if !self.beta1.is_finite() {
            return Err(Error::invalid(
                "gravity_flows",
                "mass exponent must be finite",
            ));
        }
        Ok(())
    }
}

fn gravity_row(spec: &GravitySpec, i: usize, dest: &[usize]) -> Result<Vec<(usize, f64)>> {
    let origin = &spec.ids[i];
    if dest.is_empty() {
        return Err(Error::invalid(
            "gravity_flows",
            format!("origin '{origin}' has no candidate destinations"),
        ));
    }
    let mut weights = Vec::with_capacity(dest.len());
    for &j in dest {
        if j == i {
            return Err(Error::invalid(
                "gravity_flows",
                format!("origin '{origin}' lists itself as a destination"),
            ));
        }
        let r = spec.distances.get(i, j).ok_or_else(|| {
            Error::invalid(
                "gravity_flows",
                format!("no distance for ({origin}, {})", spec.ids[j]),
            )
        })?;
        if !(r > 0.0) {
            return Err(Error::invalid(
                "gravity_flows",
                format!(
                    "distance ({origin}, {}) is {r}; must be positive",
                    spec.ids[j]
                ),
            ));
        }
        weights.push(spec.masses[j].powf(spec.beta1) * spec.deterrence.eval(r));
    }
    let denom: f64 = weights.iter().sum();
    if !(denom > 0.0) || !denom.is_finite() {
        return Err(Error::invalid(
            "gravity_flows",
            format!("origin '{origin}' has zero attraction denominator"),
        ));
    }
    let o = spec.outflows[i];
    Ok(dest
        .iter()
        .zip(weights)
        .map(|(&j, w)| (j, o * w / denom))
        .collect())
}

/// `y_ij = O_i m_j^{β1} f(r_ij) / Σ_k m_k^{β1} f(r_ik)` over each origin's
/// candidates, so every row sums to `O_i`.
pub fn gravity_flows(spec: &GravitySpec, candidates: &CandidateSets) -> Result<ODMatrix> {
    spec.validate()?;
    let n = spec.ids.len();
    if let CandidateSets::Explicit(sets) = candidates {
        if sets.len() != n {
            return Err(Error::DimensionMismatch {
                op: "gravity_flows",
                expected: n,
                actual: sets.len(),
            });
        }
    }
    let rows: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| match candidates {
            CandidateSets::AllOthers => {
                let dest: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                gravity_row(spec, i, &dest)
            }
            CandidateSets::Explicit(sets) => gravity_row(spec, i, &sets[i]),
        })
        .collect::<Result<_>>()?;
    let mut m = ODMatrix::new(spec.ids.clone())?;
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row {
            m.set(i, j, v)?;
        }
    }
    Ok(m)
}

/// Common part of commuters, `2 Σ min(y_ij, z_ij) / (Σ y + Σ z)`. Entries
/// are matched by id label; an id missing from one matrix has zero flow there.
pub fn cpc(y: &ODMatrix, z: &ODMatrix) -> Result<f64> {
    let denom = y.total() + z.total();
    if !(denom > 0.0) {
        return Err(Error::invalid("cpc", "both matrices are all-zero"));
    }
    let to_z: Vec<Option<usize>> = y.ids().iter().map(|id| z.index_of(id)).collect();
    let common: f64 = y
        .entries()
        .map(|(i, j, v)| match (to_z[i], to_z[j]) {
            (Some(a), Some(b)) => v.min(z.get(a, b)),
            _ => 0.0,
        })
        .sum();
    Ok(2.0 * common / denom)
}

/// Net flux per node (`q_i > 0` is net outflow) with diffusivity `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxVector {
    pub q: Vec<f64>,
    pub k: f64,
}

/// `φ̂ = −(1/k) L⁺ q`: the population field implied by `q = −kLφ`, known up to
/// an additive constant and returned with zero mean.
pub fn estimate_population(g: &Graph, flux: &FluxVector) -> Result<Vec<f64>> {
    if g.is_directed() {
        return Err(Error::DirectedGraph {
            op: "estimate_population",
        });
    }
    if flux.q.len() != g.node_count() {
        return Err(Error::DimensionMismatch {
            op: "estimate_population",
            expected: g.node_count(),
            actual: flux.q.len(),
        });
    }
    if !(flux.k > 0.0) {
        return Err(Error::invalid(
            "estimate_population",
            "diffusivity k must be positive",
        ));
    }
    let count = components(g, ComponentMode::Weak).count();
    if count != 1 {
        return Err(Error::NotConnected {
            op: "estimate_population",
            components: count,
        });
    }
    let l = laplacian(g, LaplacianKind::Combinatorial)?;
    let pinv = laplacian_pseudoinverse(&l)?;
    let q = nalgebra::DVector::from_column_slice(&flux.q);
    Ok((pinv * q).iter().map(|v| -v / flux.k).collect())
}

/// The flux `q = −kLφ` produced by a population field on `g`.
pub fn flux_from_population(g: &Graph, phi: &[f64], k: f64) -> Result<FluxVector> {
    if phi.len() != g.node_count() {
        return Err(Error::DimensionMismatch {
            op: "flux_from_population",
            expected: g.node_count(),
            actual: phi.len(),
        });
    }
    let l = laplacian(g, LaplacianKind::Combinatorial)?;
    let q = l * nalgebra::DVector::from_column_slice(phi) * (-k);
    Ok(FluxVector {
        q: q.iter().copied().collect(),
        k,
    })
}

/// Node records read from an `id,x,y,mass,outflow` CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct GravityNodes {
    pub ids: Vec<String>,
    pub coords: Vec<Point>,
    pub masses: Vec<f64>,
    pub outflows: Vec<f64>,
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader)
}

fn csv_columns<R: Read>(
    rdr: &mut csv::Reader<R>,
    context: &'static str,
    names: &[&str],
) -> Result<Vec<usize>> {
    let headers = rdr
        .headers()
        .map_err(|e| Error::Csv {
            context: context.into(),
            source: e,
        })?
        .clone();
    names
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h == *name)
                .ok_or_else(|| Error::invalid(context, format!("missing column '{name}'")))
        })
        .collect()
}

fn read_records<R: Read>(
    reader: R,
    context: &'static str,
    names: &[&str],
) -> Result<Vec<(String, Vec<String>)>> {
    let mut rdr = csv_reader(reader);
    let cols = csv_columns(&mut rdr, context, names)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Csv {
            context: context.into(),
            source: e,
        })?;
        let fields: Vec<String> = cols
            .iter()
            .map(|&c| rec.get(c).unwrap_or("").to_owned())
            .collect();
        out.push((fields[0].clone(), fields[1..].to_vec()));
    }
    Ok(out)
}

fn parse_num(context: &'static str, line: usize, s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse {
        context: context.into(),
        line,
        reason: format!("invalid number '{s}'"),
    })
}

pub fn read_gravity_nodes<R: Read>(reader: R) -> Result<GravityNodes> {
    const CTX: &str = "gravity nodes csv";
    let mut nodes = GravityNodes {
        ids: Vec::new(),
        coords: Vec::new(),
        masses: Vec::new(),
        outflows: Vec::new(),
    };
    for (k, (id, f)) in read_records(reader, CTX, &["id", "x", "y", "mass", "outflow"])?
        .into_iter()
        .enumerate()
    {
        let line = k + 2;
        nodes.ids.push(id);
        nodes.coords.push(Point::new(
            parse_num(CTX, line, &f[0])?,
            parse_num(CTX, line, &f[1])?,
        ));
        nodes.masses.push(parse_num(CTX, line, &f[2])?);
        nodes.outflows.push(parse_num(CTX, line, &f[3])?);
    }
    Ok(nodes)
}

fn lookup(index: &HashMap<&str, usize>, context: &'static str, id: &str) -> Result<usize> {
    index
        .get(id)
        .copied()
        .ok_or_else(|| Error::invalid(context, format!("unknown id '{id}'")))
}

/// Reads `origin,destination,distance` into a distance table over `ids`.
pub fn read_distance_table<R: Read>(reader: R, ids: &[String]) -> Result<Distances> {
    const CTX: &str = "distance csv";
    let index: HashMap<&str, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut table = HashMap::new();
    for (k, (o, f)) in read_records(reader, CTX, &["origin", "destination", "distance"])?
        .into_iter()
        .enumerate()
    {
        let (i, j) = (lookup(&index, CTX, &o)?, lookup(&index, CTX, &f[0])?);
        table.insert((i, j), parse_num(CTX, k + 2, &f[1])?);
    }
    Ok(Distances::Table(table))
}

/// Reads `origin,destination` candidate pairs over `ids`.
pub fn read_candidate_sets<R: Read>(reader: R, ids: &[String]) -> Result<CandidateSets> {
    const CTX: &str = "candidate csv";
    let index: HashMap<&str, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut sets = vec![Vec::new(); ids.len()];
    for (o, f) in read_records(reader, CTX, &["origin", "destination"])? {
        sets[lookup(&index, CTX, &o)?].push(lookup(&index, CTX, &f[0])?);
    }
    Ok(CandidateSets::Explicit(sets))
}

/// Reads `id,flux` rows and orders them by the labels of `g`.
pub fn read_flux<R: Read>(reader: R, g: &Graph) -> Result<Vec<f64>> {
    const CTX: &str = "flux csv";
    let mut q = vec![f64::NAN; g.node_count()];
    for (k, (id, f)) in read_records(reader, CTX, &["id", "flux"])?
        .into_iter()
        .enumerate()
    {
        let i = g
            .index_of(&id)
            .ok_or_else(|| Error::invalid(CTX, format!("unknown node '{id}'")))?;
        q[i] = parse_num(CTX, k + 2, &f[0])?;
    }
    if let Some(i) = q.iter().position(|v| v.is_nan()) {
        return Err(Error::invalid(
            CTX,
            format!("no flux given for node '{}'", g.label(i)),
        ));
    }
    Ok(q)
}
