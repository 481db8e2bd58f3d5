//! `mobgraph`: build mobility graphs and export their analyses as CSV,
//! GeoJSON and MatrixMarket files.

mod input;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mobgraph::centrality::{betweenness, closeness, harmonic, pagerank, PageRankOptions};
use mobgraph::construct::{od_graph, region_adjacency_graph};
use mobgraph::export::export_metric_geojson;
use mobgraph::flows::{
    cpc, estimate_population, gravity_flows, read_candidate_sets, read_distance_table, read_flux,
    read_gravity_nodes, CandidateSets, Deterrence, Distances, FluxVector, GravitySpec,
};
use mobgraph::graph::io::{
    write_edge_list, write_matrix_market_dense, write_matrix_market_pattern, write_node_coords,
};
use mobgraph::laplacian::{laplacian, report_for_matrix, LaplacianKind, Spectrum};
use mobgraph::spectral::{average_node_circulation, circulation, perron_vector, PerronOptions};
use mobgraph::{Graph, MetricTable, Normalization, Orientation};

use input::{
    create, finish, load_graph, open, preprocess, read_od, read_partition, ContiguityArg,
    GraphSource, Preprocess,
};

#[derive(Debug, Parser)]
#[command(
    name = "mobgraph",
    version,
    about = "Graph analysis of mobility networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the Region Adjacency graph of a GeoJSON partition
    BuildRa(BuildRa),
    /// Build the directed graph of an OD flow matrix
    BuildOd(BuildOd),
    /// Node centralities as a metric table
    Metrics(Metrics),
    /// Perron vector and induced circulation
    Spectral(Spectral),
    /// Laplacian matrix and spectrum
    Laplacian(LaplacianCmd),
    /// Singly-constrained gravity model flows
    Gravity(Gravity),
    /// Common part of commuters between two OD matrices
    Cpc(Cpc),
    /// Population field from net node fluxes
    Fick(Fick),
    /// Join a metric table onto partition geometry as GeoJSON
    Export(Export),
}

#[derive(Debug, Args)]
struct BuildRa {
    #[arg(long)]
    partition: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    contiguity: ContiguityArg,
    #[arg(long, default_value_t = mobgraph::construct::DEFAULT_SNAP_TOLERANCE)]
    snap_tol: f64,
    /// Edge list output
    #[arg(long)]
    out: PathBuf,
    /// Centroid coordinates output (`id,x,y`)
    #[arg(long)]
    coords: Option<PathBuf>,
    /// Sparsity pattern output (MatrixMarket)
    #[arg(long)]
    mtx: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BuildOd {
    #[arg(long)]
    od: PathBuf,
    #[arg(long)]
    ids: Option<PathBuf>,
    #[arg(long)]
    include_self_loops: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    mtx: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricName {
    Degree,
    Closeness,
    Harmonic,
    Betweenness,
    Pagerank,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NormalizeArg {
    Max,
    Minmax,
}

impl From<NormalizeArg> for Normalization {
    fn from(n: NormalizeArg) -> Self {
        match n {
            NormalizeArg::Max => Normalization::Max,
            NormalizeArg::Minmax => Normalization::MinMax,
        }
    }
}

#[derive(Debug, Args)]
struct Metrics {
    #[command(flatten)]
    source: GraphSource,
    #[command(flatten)]
    pre: Preprocess,
    /// Metrics to compute (default: all)
    #[arg(long = "metric", value_enum)]
    metrics: Vec<MetricName>,
    #[arg(long, value_enum)]
    normalize: Option<NormalizeArg>,
    /// Add quartile bin columns
    #[arg(long)]
    quartiles: bool,
    #[arg(long, default_value_t = 0.85)]
    damping: f64,
    /// PageRank convergence tolerance (L1 change)
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Use reciprocal weights as path costs (flows become distances)
    #[arg(long)]
    invert_weights: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct Spectral {
    #[command(flatten)]
    source: GraphSource,
    #[command(flatten)]
    pre: Preprocess,
    /// Required stationarity residual
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Node table output (`node,phi,avg_circulation`)
    #[arg(long)]
    out: PathBuf,
    /// Circulation output (`source,target,flow`)
    #[arg(long)]
    circulation: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LaplacianCmd {
    #[command(flatten)]
    source: GraphSource,
    #[command(flatten)]
    pre: Preprocess,
    #[arg(long, default_value = "combinatorial", value_parser = parse_kind)]
    kind: LaplacianKind,
    /// Spectrum output (`index,eigenvalue`)
    #[arg(long)]
    out: PathBuf,
    /// Dense matrix output (MatrixMarket)
    #[arg(long)]
    matrix: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<LaplacianKind, String> {
    s.parse().map_err(|e: mobgraph::Error| e.to_string())
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DeterrenceArg {
    Power,
    Exp,
}

#[derive(Debug, Args)]
struct Gravity {
    /// Node CSV (`id,x,y,mass,outflow`)
    #[arg(long)]
    nodes: PathBuf,
    /// Distance CSV (`origin,destination,distance`); Euclidean when absent
    #[arg(long)]
    distances: Option<PathBuf>,
    /// Candidate destinations (`origin,destination`); all others when absent
    #[arg(long)]
    candidates: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "power")]
    deterrence: DeterrenceArg,
    #[arg(long, default_value_t = 1.0)]
    beta1: f64,
    #[arg(long, default_value_t = 2.0)]
    beta2: f64,
    /// Predicted OD output
    #[arg(long)]
    out: PathBuf,
    /// Observed OD matrix; prints the CPC against it
    #[arg(long)]
    observed: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Cpc {
    #[arg(long)]
    predicted: PathBuf,
    #[arg(long)]
    observed: PathBuf,
}

#[derive(Debug, Args)]
struct Fick {
    #[command(flatten)]
    source: GraphSource,
    #[command(flatten)]
    pre: Preprocess,
    /// Flux CSV (`id,flux`)
    #[arg(long)]
    flux: PathBuf,
    /// Diffusivity
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    /// Output (`node,population`), zero mean
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct Export {
    #[arg(long)]
    partition: PathBuf,
    /// Metric table CSV
    #[arg(long)]
    table: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("MOBGRAPH_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("MOBGRAPH_THREADS must be a non-negative integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("cannot configure thread pool")
}

fn write_with(
    path: &Path,
    f: impl FnOnce(&mut dyn std::io::Write) -> mobgraph::Result<()>,
) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w).with_context(|| format!("writing {}", path.display()))?;
    finish(w, path)
}

fn load(source: &GraphSource, pre: &Preprocess) -> Result<Graph> {
    let g = load_graph(source)?;
    preprocess(g, pre)
}

fn build_ra(a: &BuildRa) -> Result<()> {
    let p = read_partition(&a.partition)?;
    let g = region_adjacency_graph(&p, a.contiguity.into(), a.snap_tol)
        .context("construct: building region adjacency graph")?;
    write_with(&a.out, |w| write_edge_list(&g, w))?;
    if let Some(path) = &a.coords {
        write_with(path, |w| write_node_coords(&g, w))?;
    }
    if let Some(path) = &a.mtx {
        write_with(path, |w| write_matrix_market_pattern(&g, w))?;
    }
    eprintln!(
        "region adjacency graph: {} nodes, {} edges",
        g.node_count(),
        g.edge_count()
    );
    Ok(())
}

fn build_od(a: &BuildOd) -> Result<()> {
    let m = read_od(&a.od, a.ids.as_deref())?;
    let g = od_graph(&m, a.include_self_loops);
    write_with(&a.out, |w| write_edge_list(&g, w))?;
    if let Some(path) = &a.mtx {
        write_with(path, |w| write_matrix_market_pattern(&g, w))?;
    }
    eprintln!(
        "OD graph: {} nodes, {} edges",
        g.node_count(),
        g.edge_count()
    );
    Ok(())
}

fn metrics(a: &Metrics) -> Result<()> {
    let g = load(&a.source, &a.pre)?;
    let cost = if a.invert_weights {
        g.with_reciprocal_weights()
    } else {
        g.clone()
    };
    let selected = if a.metrics.is_empty() {
        vec![
            MetricName::Degree,
            MetricName::Closeness,
            MetricName::Harmonic,
            MetricName::Betweenness,
            MetricName::Pagerank,
        ]
    } else {
        a.metrics.clone()
    };
    let orientations: &[(Orientation, &str)] = if g.is_directed() {
        &[(Orientation::Out, "_out"), (Orientation::In, "_in")]
    } else {
        &[(Orientation::Out, "")]
    };
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    for m in selected {
        match m {
            MetricName::Degree => {
                for &(o, suffix) in orientations {
                    columns.push((format!("degree{suffix}"), g.degrees(o).values));
                }
            }
            MetricName::Closeness => {
                for &(o, suffix) in orientations {
                    columns.push((format!("closeness{suffix}"), closeness(&cost, o)));
                }
            }
            MetricName::Harmonic => {
                for &(o, suffix) in orientations {
                    columns.push((format!("harmonic{suffix}"), harmonic(&cost, o)));
                }
            }
            MetricName::Betweenness => columns.push(("betweenness".into(), betweenness(&cost))),
            MetricName::Pagerank => {
                let opts = PageRankOptions {
                    damping: a.damping,
                    tol: a.tol,
                    ..PageRankOptions::default()
                };
                let pr = pagerank(&g, &opts).context("centrality: pagerank")?;
                columns.push(("pagerank".into(), pr));
            }
        }
    }
    let mut table = MetricTable::new(g.labels().to_vec());
    for (name, values) in columns {
        table
            .add_metric(&name, values, a.normalize.map(Into::into), a.quartiles)
            .with_context(|| format!("metrics: column '{name}'"))?;
    }
    write_with(&a.out, |w| table.write_csv(w))
}

fn spectral(a: &Spectral) -> Result<()> {
    let g = load(&a.source, &a.pre)?;
    let opts = PerronOptions {
        tol: a.tol,
        ..PerronOptions::default()
    };
    let phi = perron_vector(&g, &opts).context("spectral: perron_vector")?;
    let f = circulation(&g, &phi).context("spectral: circulation")?;
    let avg = average_node_circulation(&g, &f).context("spectral: average_node_circulation")?;
    let mut table = MetricTable::new(g.labels().to_vec());
    table.push_column("phi", phi.phi.clone())?;
    table.push_column("avg_circulation", avg)?;
    write_with(&a.out, |w| table.write_csv(w))?;
    if let Some(path) = &a.circulation {
        write_with(path, |w| f.write_csv(&g, w))?;
    }
    eprintln!(
        "perron vector: residual {:e}, circulation imbalance {:e}",
        phi.residual,
        f.max_imbalance(g.node_count())
    );
    Ok(())
}

fn laplacian_cmd(a: &LaplacianCmd) -> Result<()> {
    let g = load(&a.source, &a.pre)?;
    let m = laplacian(&g, a.kind).with_context(|| format!("laplacian: building {}", a.kind))?;
    let report = report_for_matrix(&m, a.kind);
    let mut buf = String::new();
    match &report.eigenvalues {
        Spectrum::Real(v) => {
            buf.push_str("index,eigenvalue\n");
            for (i, x) in v.iter().enumerate() {
                writeln!(buf, "{i},{x}").unwrap();
            }
        }
        Spectrum::Complex(v) => {
            buf.push_str("index,eigenvalue,imaginary\n");
            for (i, z) in v.iter().enumerate() {
                writeln!(buf, "{i},{},{}", z.re, z.im).unwrap();
            }
        }
    }
    let mut w = create(&a.out)?;
    w.write_all(buf.as_bytes())
        .with_context(|| format!("writing {}", a.out.display()))?;
    finish(w, &a.out)?;
    if let Some(path) = &a.matrix {
        write_with(path, |w| write_matrix_market_dense(&m, w))?;
    }
    let psd = match report.is_psd {
        Some(true) => "yes",
        Some(false) => "no",
        None => "n/a",
    };
    eprintln!(
        "{}: symmetric {} (defect {:e}), psd {psd}, spectral radius {}",
        a.kind,
        if report.is_symmetric { "yes" } else { "no" },
        report.symmetry_defect,
        report.spectral_radius
    );
    Ok(())
}

fn gravity(a: &Gravity) -> Result<()> {
    let nodes = read_gravity_nodes(open(&a.nodes)?)
        .with_context(|| format!("flows: reading nodes {}", a.nodes.display()))?;
    let distances = match &a.distances {
        Some(p) => read_distance_table(open(p)?, &nodes.ids)
            .with_context(|| format!("flows: reading distances {}", p.display()))?,
        None => Distances::Euclidean(nodes.coords.clone()),
    };
    let candidates = match &a.candidates {
        Some(p) => read_candidate_sets(open(p)?, &nodes.ids)
            .with_context(|| format!("flows: reading candidates {}", p.display()))?,
        None => CandidateSets::AllOthers,
    };
    let spec = GravitySpec {
        ids: nodes.ids,
        outflows: nodes.outflows,
        masses: nodes.masses,
        distances,
        beta1: a.beta1,
        deterrence: match a.deterrence {
            DeterrenceArg::Power => Deterrence::Power(a.beta2),
            DeterrenceArg::Exp => Deterrence::Exponential(a.beta2),
        },
    };
    let y = gravity_flows(&spec, &candidates).context("flows: gravity_flows")?;
    write_with(&a.out, |w| y.write_csv(w))?;
    if let Some(p) = &a.observed {
        let z = read_od(p, None)?;
        let score = cpc(&y, &z).context("flows: cpc")?;
        println!("{score}");
    }
    Ok(())
}

fn cpc_cmd(a: &Cpc) -> Result<()> {
    let y = read_od(&a.predicted, None)?;
    let z = read_od(&a.observed, None)?;
    println!("{}", cpc(&y, &z).context("flows: cpc")?);
    Ok(())
}

fn fick(a: &Fick) -> Result<()> {
    let g = load(&a.source, &a.pre)?;
    let q = read_flux(open(&a.flux)?, &g)
        .with_context(|| format!("flows: reading flux {}", a.flux.display()))?;
    let phi =
        estimate_population(&g, &FluxVector { q, k: a.k }).context("flows: estimate_population")?;
    let mut table = MetricTable::new(g.labels().to_vec());
    table.push_column("population", phi)?;
    write_with(&a.out, |w| table.write_csv(w))
}

fn export(a: &Export) -> Result<()> {
    let p = read_partition(&a.partition)?;
    let table = MetricTable::from_csv(open(&a.table)?)
        .with_context(|| format!("metrics: reading table {}", a.table.display()))?;
    let mut w = create(&a.out)?;
    let missing =
        export_metric_geojson(&p, &table, &mut w).context("export: export_metric_geojson")?;
    finish(w, &a.out)?;
    if !missing.is_empty() {
        eprintln!(
            "warning: {} region(s) have no metrics and were exported with null values: {}",
            missing.len(),
            missing.join(", ")
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match &cli.command {
        Command::BuildRa(a) => build_ra(a),
        Command::BuildOd(a) => build_od(a),
        Command::Metrics(a) => metrics(a),
        Command::Spectral(a) => spectral(a),
        Command::Laplacian(a) => laplacian_cmd(a),
        Command::Gravity(a) => gravity(a),
        Command::Cpc(a) => cpc_cmd(a),
        Command::Fick(a) => fick(a),
        Command::Export(a) => export(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
