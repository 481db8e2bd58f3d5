//! Loading graphs from the supported input formats and applying the shared
//! preprocessing flags.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use mobgraph::construct::{
    od_graph, read_id_list, region_adjacency_graph, Contiguity, ODMatrix, Partition,
};
use mobgraph::graph::io::read_edge_list;
use mobgraph::{largest_component_subgraph, prune_low_degree, ComponentMode, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum ContiguityArg {
    #[default]
    Queen,
    Rook,
}

impl From<ContiguityArg> for Contiguity {
    fn from(c: ContiguityArg) -> Self {
        match c {
            ContiguityArg::Queen => Contiguity::Queen,
            ContiguityArg::Rook => Contiguity::Rook,
        }
    }
}

/// Where the graph comes from. Exactly one source must be given.
#[derive(Debug, Args)]
pub struct GraphSource {
    /// Edge list CSV (`source,target,weight`)
    #[arg(long, group = "source")]
    pub edges: Option<PathBuf>,
    /// Treat the edge list as directed
    #[arg(long, requires = "edges")]
    pub directed: bool,
    /// GeoJSON partition; builds the Region Adjacency graph
    #[arg(long, group = "source")]
    pub partition: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub contiguity: ContiguityArg,
    /// Boundary snapping tolerance in map units
    #[arg(long, default_value_t = mobgraph::construct::DEFAULT_SNAP_TOLERANCE)]
    pub snap_tol: f64,
    /// OD flow CSV (`origin,destination,flow`); builds the OD digraph
    #[arg(long, group = "source")]
    pub od: Option<PathBuf>,
    /// Extra node ids (one per line) kept even without flows
    #[arg(long, requires = "od")]
    pub ids: Option<PathBuf>,
    #[arg(long, requires = "od")]
    pub include_self_loops: bool,
}

/// Preprocessing applied after loading.
#[derive(Debug, Args)]
pub struct Preprocess {
    /// Restrict to the largest strongly connected component
    #[arg(long)]
    pub largest_scc: bool,
    /// Drop nodes with at most K distinct neighbours
    #[arg(long, value_name = "K")]
    pub prune_degree: Option<usize>,
    /// Repeat pruning until no node qualifies
    #[arg(long, requires = "prune_degree")]
    pub iterate: bool,
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

pub fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush()
        .with_context(|| format!("cannot write {}", path.display()))
}

pub fn read_partition(path: &Path) -> Result<Partition> {
    Partition::from_geojson(open(path)?)
        .with_context(|| format!("construct: reading partition {}", path.display()))
}

pub fn read_od(path: &Path, ids: Option<&Path>) -> Result<ODMatrix> {
    let extra = match ids {
        Some(p) => read_id_list(open(p)?)
            .with_context(|| format!("construct: reading id list {}", p.display()))?,
        None => Vec::new(),
    };
    ODMatrix::from_csv(open(path)?, &extra)
        .with_context(|| format!("construct: reading OD matrix {}", path.display()))
}

pub fn load_graph(src: &GraphSource) -> Result<Graph> {
    if let Some(p) = &src.edges {
        return read_edge_list(open(p)?, src.directed)
            .with_context(|| format!("graph: reading edge list {}", p.display()));
    }
    if let Some(p) = &src.partition {
        let partition = read_partition(p)?;
        return region_adjacency_graph(&partition, src.contiguity.into(), src.snap_tol)
            .context("construct: building region adjacency graph");
    }
    if let Some(p) = &src.od {
        let m = read_od(p, src.ids.as_deref())?;
        return Ok(od_graph(&m, src.include_self_loops));
    }
    bail!("no input graph: pass one of --edges, --partition or --od")
}

pub fn preprocess(g: Graph, pre: &Preprocess) -> Result<Graph> {
    let mut g = g;
    if let Some(k) = pre.prune_degree {
        let pruned = prune_low_degree(&g, k, pre.iterate);
        if pruned.emptied {
            bail!("graph: prune_low_degree: every node has degree at most {k}");
        }
        g = pruned.graph;
    }
    if pre.largest_scc {
        g = largest_component_subgraph(&g, ComponentMode::Strong).0;
    }
    Ok(g)
}
