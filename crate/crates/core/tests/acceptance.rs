//! Acceptance suite. Prints one line per criterion and exits non-zero when a
//! gating criterion fails. Dataset-backed criteria read from the directory in
//! `MOBGRAPH_DATA` (default `<workspace>/data`) and are skipped when the files
//! are absent.

mod common;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use mobgraph::centrality::{betweenness, closeness, harmonic};
use mobgraph::construct::{
    od_graph, region_adjacency_graph, Contiguity, ODMatrix, Partition, DEFAULT_SNAP_TOLERANCE,
};
use mobgraph::flows::{
    cpc, estimate_population, gravity_flows, CandidateSets, Deterrence, Distances, FluxVector,
    GravitySpec,
};
use mobgraph::laplacian::{
    laplacian, laplacian_with_perron, symmetric_eigenvalues, symmetry_defect, LaplacianKind,
};
use mobgraph::metrics::{normalize, Normalization};
use mobgraph::spectral::{
    average_node_circulation, circulation, perron_vector, stationarity_residual, PerronOptions,
};
use mobgraph::{Graph, Orientation, Point};
use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

enum Status {
    Pass,
    Fail,
    Skip,
    Info,
}

struct Outcome {
    status: Status,
    detail: String,
}

impl Outcome {
    fn check(ok: bool, detail: String) -> Outcome {
        Outcome {
            status: if ok { Status::Pass } else { Status::Fail },
            detail,
        }
    }

    fn skip(detail: impl Into<String>) -> Outcome {
        Outcome {
            status: Status::Skip,
            detail: detail.into(),
        }
    }
}

fn weight_123(rng: &mut StdRng) -> f64 {
    rng.gen_range(1..=3) as f64
}

fn weight_real(rng: &mut StdRng) -> f64 {
    rng.gen_range(0.1..5.0)
}

fn max_rel_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |m, (x, y)| m.max((x - y).abs() / y.abs()))
}

fn betweenness_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for round in 0..100 {
        let directed = round % 2 == 0;
        let n = rng.gen_range(2..=8);
        let p = rng.gen_range(0.2..0.7);
        let edges = random_edges(&mut rng, n, p, directed, weight_123);
        let got = betweenness(&build(n, &edges, directed));
        worst = worst.max(max_abs_diff(
            &got,
            &betweenness_by_enumeration(n, &edges, directed),
        ));
    }
    Outcome::check(worst <= 1e-9, format!("100 graphs, max |Δ| = {worst:.2e}"))
}

fn harmonic_dominates_closeness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let mut violations = 0;
    let mut checked = 0;
    for round in 0..100 {
        let directed = round % 2 == 1;
        let n = rng.gen_range(2..=30);
        let p = rng.gen_range(0.05..0.5);
        let g = build(
            n,
            &random_edges(&mut rng, n, p, directed, weight_real),
            directed,
        );
        for o in [Orientation::Out, Orientation::In] {
            for (h, c) in harmonic(&g, o).into_iter().zip(closeness(&g, o)) {
                checked += 1;
                // equality cases may differ in the last bit
                if h < c * (1.0 - 4.0 * f64::EPSILON) {
                    violations += 1;
                }
            }
        }
    }
    Outcome::check(
        violations == 0,
        format!("{checked} node checks, {violations} violations"),
    )
}

fn perron_stationarity() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let (mut res, mut bal, mut avg): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..50 {
        let n = rng.gen_range(2..=100);
        let p = rng.gen_range(0.0..0.1);
        let g = build(
            n,
            &random_strongly_connected(&mut rng, n, p, weight_real),
            true,
        );
        let phi = match perron_vector(&g, &PerronOptions::default()) {
            Ok(phi) => phi,
            Err(e) => return Outcome::check(false, format!("n = {n}: {e}")),
        };
        res = res.max(stationarity_residual(
            &g.transition_matrix().unwrap(),
            &phi.phi,
        ));
        let f = circulation(&g, &phi).unwrap();
        bal = bal.max(f.max_imbalance(n));
        let d = g.degrees(Orientation::Out).values;
        for ((a, di), p) in average_node_circulation(&g, &f)
            .unwrap()
            .iter()
            .zip(&d)
            .zip(&phi.phi)
        {
            avg = avg.max((a * di - p).abs());
        }
    }
    Outcome::check(
        res <= 1e-10 && bal <= 1e-12 && avg <= 1e-12,
        format!("50 digraphs, residual {res:.2e}, balance {bal:.2e}, identity {avg:.2e}"),
    )
}

fn undirected_closed_form() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(2..=100);
        let edges = random_connected_undirected(&mut rng, n, 0.05, weight_real);
        let mut d = vec![0.0; n];
        for &(i, j, w) in &edges {
            d[i] += w;
            d[j] += w;
        }
        let total: f64 = d.iter().sum();
        let closed: Vec<f64> = d.iter().map(|x| x / total).collect();
        let phi = perron_vector(&build(n, &edges, false), &PerronOptions::default()).unwrap();
        worst = worst.max(max_rel_dev(&phi.phi, &closed));
    }
    Outcome::check(
        worst <= 1e-10,
        format!("20 graphs, max relative deviation {worst:.2e}"),
    )
}

/// Half undirected connected graphs, half strongly connected digraphs.
fn laplacian_corpus() -> Vec<(Graph, bool)> {
    let mut rng = StdRng::seed_from_u64(5);
    (0..50)
        .map(|k| {
            let n = rng.gen_range(2..=60);
            let p = rng.gen_range(0.0..0.2);
            if k % 2 == 0 {
                (
                    build(
                        n,
                        &random_connected_undirected(&mut rng, n, p, weight_real),
                        false,
                    ),
                    false,
                )
            } else {
                (
                    build(
                        n,
                        &random_strongly_connected(&mut rng, n, p, weight_real),
                        true,
                    ),
                    true,
                )
            }
        })
        .collect()
}

fn laplacian_properties(corpus: &[(Graph, bool)]) -> Outcome {
    use LaplacianKind::*;
    let (mut defect, mut min_ev, mut dip): (f64, f64, f64) = (0.0, f64::INFINITY, 0.0);
    for (g, directed) in corpus {
        // L and L̂ are symmetric only for symmetric A
        let kinds: &[LaplacianKind] = if *directed {
            &[CombinatorialDirected, Symmetrized, CombinatorialSymmetrized]
        } else {
            &[
                Combinatorial,
                Normalized,
                CombinatorialDirected,
                Symmetrized,
                CombinatorialSymmetrized,
            ]
        };
        for &kind in kinds {
            let m = laplacian(g, kind).unwrap();
            defect = defect.max(symmetry_defect(&m));
            min_ev = min_ev.min(symmetric_eigenvalues(&m).unwrap()[0]);
        }
        if !directed {
            let diff = laplacian(g, Diplacian).unwrap() - laplacian(g, Normalized).unwrap();
            dip = dip.max(diff.amax());
        }
    }
    Outcome::check(
        defect <= 1e-12 && min_ev >= -1e-10 && dip <= 1e-12,
        format!("50 graphs, symmetry defect {defect:.2e}, min eigenvalue {min_ev:.2e}, |Γ − L̂| {dip:.2e}"),
    )
}

fn spectral_identities(corpus: &[(Graph, bool)]) -> Outcome {
    use LaplacianKind::*;
    let (mut norm_id, mut sym_id): (f64, f64) = (0.0, 0.0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (g, directed) in corpus {
        let d = g.degrees(Orientation::Out).values;
        let s = DMatrix::from_diagonal(&DVector::from_iterator(
            d.len(),
            d.iter().map(|x| 1.0 / x.sqrt()),
        ));
        let l = laplacian(g, Combinatorial).unwrap();
        let lhat = laplacian(g, Normalized).unwrap();
        norm_id = norm_id.max((&s * l * &s - &lhat).amax());
        if !directed {
            let ev = symmetric_eigenvalues(&lhat).unwrap();
            lo = lo.min(ev[0]);
            hi = hi.max(ev[ev.len() - 1]);
        }
        let phi = perron_vector(g, &mobgraph::laplacian::laplacian_perron_options()).unwrap();
        let lg = laplacian_with_perron(g, CombinatorialSymmetrized, Some(&phi)).unwrap();
        let sym = laplacian_with_perron(g, Symmetrized, Some(&phi)).unwrap();
        let r = DMatrix::from_diagonal(&DVector::from_iterator(
            phi.phi.len(),
            phi.phi.iter().map(|x| 1.0 / x.sqrt()),
        ));
        sym_id = sym_id.max((&r * lg * &r - sym).amax());
    }
    let radii: Vec<f64> = [3, 5, 10]
        .iter()
        .map(|&side| {
            let g = build(side * side, &grid_edges(side), false);
            *symmetric_eigenvalues(&laplacian(&g, Combinatorial).unwrap())
                .unwrap()
                .last()
                .unwrap()
        })
        .collect();
    let increasing = radii.windows(2).all(|w| w[1] > w[0]);
    Outcome::check(
        norm_id <= 1e-12 && sym_id <= 1e-12 && lo >= -1e-10 && hi <= 2.0 + 1e-10 && increasing,
        format!(
            "L̂ identity {norm_id:.2e}, 𝓛 identity {sym_id:.2e}, normalized spectrum in [{lo:.2e}, {hi:.6}], grid radii {radii:.4?}"
        ),
    )
}

fn small_spectra() -> Outcome {
    let g = build(3, &[(0, 1, 1.0), (1, 2, 1.0)], false);
    let comb =
        symmetric_eigenvalues(&laplacian(&g, LaplacianKind::Combinatorial).unwrap()).unwrap();
    let norm = symmetric_eigenvalues(&laplacian(&g, LaplacianKind::Normalized).unwrap()).unwrap();
    let err = max_abs_diff(&comb, &[0.0, 1.0, 3.0]).max(max_abs_diff(&norm, &[0.0, 1.0, 2.0]));
    Outcome::check(
        err <= 1e-10,
        format!("P3 combinatorial {comb:.3?}, normalized {norm:.3?}"),
    )
}

fn gravity_conservation() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let (mut row, mut scale): (f64, f64) = (0.0, 0.0);
    for k in 0..50 {
        let n = rng.gen_range(2..=40);
        let coords: Vec<Point> = (0..n)
            .map(|_| Point::new(rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
            .collect();
        let mut spec = GravitySpec {
            ids: (0..n).map(label).collect(),
            outflows: (0..n).map(|_| rng.gen_range(0.0..1e4)).collect(),
            masses: (0..n).map(|_| rng.gen_range(0.5..500.0)).collect(),
            distances: Distances::Euclidean(coords),
            beta1: rng.gen_range(0.5..1.5),
            deterrence: if k % 2 == 0 {
                Deterrence::Power(rng.gen_range(0.5..3.0))
            } else {
                Deterrence::Exponential(rng.gen_range(0.01..0.1))
            },
        };
        let y = gravity_flows(&spec, &CandidateSets::AllOthers).unwrap();
        for (i, o) in spec.outflows.iter().enumerate() {
            row = row.max((y.row_sum(i) - o).abs() / o.max(f64::MIN_POSITIVE));
        }
        let factor = rng.gen_range(0.1..10.0);
        spec.masses.iter_mut().for_each(|m| *m *= factor);
        let z = gravity_flows(&spec, &CandidateSets::AllOthers).unwrap();
        for (i, j, v) in y.entries() {
            scale = scale.max((z.get(i, j) - v).abs() / spec.outflows[i]);
        }
    }
    Outcome::check(
        row <= 1e-12 && scale <= 1e-12,
        format!(
            "50 specs, row-sum error {row:.2e}, mass-scaling change {scale:.2e} (relative to O_i)"
        ),
    )
}

fn cpc_contract() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let (mut self_err, mut asym): (f64, f64) = (0.0, 0.0);
    let mut in_range = true;
    for _ in 0..100 {
        let n = rng.gen_range(1..=10);
        let ids: Vec<String> = (0..n).map(label).collect();
        let random = |rng: &mut StdRng| {
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            if rng.gen_bool(0.5) {
                                rng.gen_range(0.0..100.0)
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect();
            ODMatrix::from_dense(ids.clone(), &rows).unwrap()
        };
        let (y, z) = (random(&mut rng), random(&mut rng));
        if y.total() > 0.0 {
            self_err = self_err.max((cpc(&y, &y).unwrap() - 1.0).abs());
        }
        if y.total() + z.total() > 0.0 {
            let (a, b) = (cpc(&y, &z).unwrap(), cpc(&z, &y).unwrap());
            asym = asym.max((a - b).abs());
            in_range &= (0.0..=1.0).contains(&a);
        }
    }
    let ids = vec!["i".to_string(), "j".to_string()];
    let y = ODMatrix::from_dense(ids.clone(), &[vec![2.0, 0.0], vec![0.0, 0.0]]).unwrap();
    let z = ODMatrix::from_dense(ids, &[vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
    let half = cpc(&y, &z).unwrap();
    Outcome::check(
        self_err <= 1e-15 && asym <= 1e-15 && in_range && half == 0.5,
        format!("|cpc(y,y) − 1| {self_err:.1e}, asymmetry {asym:.1e}, in [0,1]: {in_range}, (2,0)/(1,1) = {half}"),
    )
}

fn fick_round_trip() -> Outcome {
    let mut rng = StdRng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(2..=200);
        let edges = random_connected_undirected(&mut rng, n, 0.02, weight_real);
        let phi: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1000.0)).collect();
        let k = rng.gen_range(0.1..10.0);
        // q = −kLφ assembled straight from the edge list
        let mut q = vec![0.0; n];
        for &(i, j, w) in &edges {
            let flow = k * w * (phi[i] - phi[j]);
            q[i] -= flow;
            q[j] += flow;
        }
        let est = estimate_population(&build(n, &edges, false), &FluxVector { q, k }).unwrap();
        let mean = phi.iter().sum::<f64>() / n as f64;
        let centred: Vec<f64> = phi.iter().map(|p| p - mean).collect();
        worst = worst.max(max_abs_diff(&est, &centred));
    }
    Outcome::check(
        worst <= 1e-8,
        format!("20 graphs, max |φ̂ − (φ − φ̄)| = {worst:.2e}"),
    )
}

fn data_dir() -> PathBuf {
    std::env::var_os("MOBGRAPH_DATA")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

const PARTITIONS: [(&str, &str, usize); 3] = [
    ("Genova Province", "genova.geojson", 137),
    ("UK districts", "uk_districts.geojson", 344),
    ("NY tracts", "ny_tracts.geojson", 5410),
];

fn ra_graph(file: &str) -> Option<Graph> {
    let path = data_dir().join(file);
    let f = std::fs::File::open(&path).ok()?;
    let p = Partition::from_geojson(std::io::BufReader::new(f)).expect("partition parses");
    Some(
        region_adjacency_graph(&p, Contiguity::Queen, DEFAULT_SNAP_TOLERANCE)
            .expect("graph builds"),
    )
}

fn structural_counts() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    let mut found = 0;
    for (name, file, want) in PARTITIONS {
        if let Some(g) = ra_graph(file) {
            found += 1;
            ok &= g.node_count() == want;
            parts.push(format!("{name} {} nodes (want {want})", g.node_count()));
        }
    }
    let od = data_dir().join("ny_od.csv");
    if let Ok(f) = std::fs::File::open(&od) {
        found += 1;
        let m = ODMatrix::from_csv(std::io::BufReader::new(f), &[]).expect("OD parses");
        let g = od_graph(&m, false);
        ok &= g.node_count() == 2836 && g.edge_count() == 939_888;
        parts.push(format!(
            "NY OD {} nodes / {} edges (want 2836 / 939888; {} with self-loops)",
            g.node_count(),
            g.edge_count(),
            od_graph(&m, true).edge_count()
        ));
    }
    if found == 0 {
        return Outcome::skip(format!("no datasets in {}", data_dir().display()));
    }
    Outcome::check(ok, parts.join("; "))
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

fn closeness_vs_betweenness_trend() -> Outcome {
    let mut parts = Vec::new();
    for (name, file, _) in PARTITIONS {
        let Some(g) = ra_graph(file) else { continue };
        let g = mobgraph::largest_component_subgraph(&g, mobgraph::ComponentMode::Weak).0;
        let c = normalize(&closeness(&g, Orientation::Out), Normalization::Max);
        let b = normalize(&betweenness(&g), Normalization::Max);
        match (c, b) {
            (Ok(c), Ok(b)) => {
                let (mc, mb) = (median(&c), median(&b));
                parts.push(format!(
                    "{name}: closeness median {mc:.3} {} betweenness median {mb:.3}",
                    if mc > mb { ">" } else { "<=" }
                ));
            }
            _ => parts.push(format!("{name}: metrics not normalizable")),
        }
    }
    if parts.is_empty() {
        return Outcome::skip(format!("no partitions in {}", data_dir().display()));
    }
    Outcome {
        status: Status::Info,
        detail: parts.join("; "),
    }
}

fn main() -> ExitCode {
    let corpus = laplacian_corpus();
    type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let criteria: Vec<(&str, Check)> = vec![
        (
            "betweenness matches path-enumeration oracle",
            Box::new(betweenness_oracle),
        ),
        (
            "harmonic dominates closeness",
            Box::new(harmonic_dominates_closeness),
        ),
        (
            "Perron stationarity, balance and average circulation",
            Box::new(perron_stationarity),
        ),
        (
            "undirected Perron vector is d/Σd",
            Box::new(undirected_closed_form),
        ),
        (
            "Laplacian symmetry, PSD and Diplacian = Normalized",
            Box::new(|| laplacian_properties(&corpus)),
        ),
        (
            "spectral identities, normalized bound, grid radii",
            Box::new(|| spectral_identities(&corpus)),
        ),
        ("P3 spectra", Box::new(small_spectra)),
        (
            "gravity conservation and mass-scale invariance",
            Box::new(gravity_conservation),
        ),
        ("CPC contract", Box::new(cpc_contract)),
        ("Fick round trip", Box::new(fick_round_trip)),
        (
            "structural counts of reference datasets",
            Box::new(structural_counts),
        ),
        (
            "closeness median exceeds betweenness median (informational)",
            Box::new(closeness_vs_betweenness_trend),
        ),
    ];

    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let tag = match outcome.status {
            Status::Pass => "PASS",
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
            Status::Skip => "SKIP",
            Status::Info => "INFO",
        };
        println!(
            "[{tag}] {:>2}. {name}: {} ({:.2}s)",
            k + 1,
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
