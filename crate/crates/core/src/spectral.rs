//! Stationary (Perron) vector of the random walk and the circulation it induces.
//!
//! For a strongly connected graph the transition matrix `P = D⁻¹A` has a
//! unique positive left eigenvector `φ` with `φᵀP = φᵀ` and `Σφ = 1`. The
//! arc function `F_ij = φ_i P_ij` then balances inflow and outflow at every
//! node.

use std::fmt::Write as _;
use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::{components, ComponentMode, Graph, Orientation, TransitionMatrix};

#[derive(Debug, Clone, Copy)]
pub struct PerronOptions {
    /// Required sup-norm stationarity residual `‖φᵀP − φᵀ‖∞`.
    pub tol: f64,
    /// Iteration cap; `None` picks `10·n·ln n` clamped to `[100, 100000]`.
    pub max_iter: Option<usize>,
    /// When the cap is hit on a graph of at most [`DIRECT_SOLVE_LIMIT`]
    /// nodes, solve the stationarity equations densely instead of failing.
    pub direct_fallback: bool,
}

/// Largest graph for which [`perron_vector`] falls back to a dense solve.
pub const DIRECT_SOLVE_LIMIT: usize = 2000;

impl Default for PerronOptions {
    fn default() -> Self {
        PerronOptions {
            tol: 1e-12,
            max_iter: None,
            direct_fallback: true,
        }
    }
}

impl PerronOptions {
    fn iteration_cap(&self, n: usize) -> usize {
        self.max_iter.unwrap_or_else(|| {
            let n = n.max(2) as f64;
            ((10.0 * n * n.ln()).ceil() as usize).clamp(100, 100_000)
        })
    }
}

/// Positive stationary distribution with its measured residual.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronVector {
    pub phi: Vec<f64>,
    /// `‖φᵀP − φᵀ‖∞` of `phi` as returned.
    pub residual: f64,
}

fn require_strongly_connected(g: &Graph, op: &'static str) -> Result<()> {
    if g.is_empty() {
        return Err(Error::invalid(op, "graph has no nodes"));
    }
    let dec = components(g, ComponentMode::Strong);
    if dec.count() != 1 {
        return Err(Error::NotStronglyConnected {
            op,
            components: dec.count(),
        });
    }
    Ok(())
}

/// `‖xᵀP − xᵀ‖∞`.
pub fn stationarity_residual(p: &TransitionMatrix, x: &[f64]) -> f64 {
    let mut y = vec![0.0; x.len()];
    p.left_multiply(x, &mut y);
    y.iter()
        .zip(x)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Power iteration on the lazy walk `(I + P)/2`, which shares `φ` with `P`
/// but is aperiodic, so bipartite and cyclic graphs converge too. The
/// iterate starts at `d/Σd` (exact for undirected graphs) and is renormalised
/// to sum 1 every step. Slowly mixing graphs that exhaust the iteration cap
/// fall back to a dense solve when allowed by `opts`.
pub fn perron_vector(g: &Graph, opts: &PerronOptions) -> Result<PerronVector> {
    require_strongly_connected(g, "perron_vector")?;
    let p = g.transition_matrix()?;
    let n = g.node_count();
    let cap = opts.iteration_cap(n);

    let mut x = g.degrees(Orientation::Out).values;
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    let mut y = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..cap {
        p.left_multiply(&x, &mut y);
        residual = y
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if residual <= opts.tol {
            break;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = 0.5 * (*xi + yi);
        }
        let s: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= s);
    }
    if !(residual <= opts.tol) && opts.direct_fallback && n <= DIRECT_SOLVE_LIMIT {
        if let Some(phi) = dense_stationary(g) {
            let r = stationarity_residual(&p, &phi);
            if r <= opts.tol {
                x = phi;
                residual = r;
            }
        }
    }
    if !(residual <= opts.tol) {
        return Err(Error::NotConverged {
            op: "perron_vector",
            iterations: cap,
            residual,
            last_iterate: x,
        });
    }
    if x.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::invalid(
            "perron_vector",
            "stationary vector has non-positive entries",
        ));
    }
    Ok(PerronVector { phi: x, residual })
}

/// `φ` from `Aᵀφ̃ = Dφ̃`, `φ = Dφ̃ / Σ Dφ̃`.
fn dense_stationary(g: &Graph) -> Option<Vec<f64>> {
    let d = g.degrees(Orientation::Out).values;
    let tilde = generalized_unit_eigvec(&g.adjacency_dense().transpose(), &d)?;
    let mut phi: Vec<f64> = tilde.iter().zip(&d).map(|(t, di)| t * di).collect();
    let s: f64 = phi.iter().sum();
    phi.iter_mut().for_each(|v| *v /= s);
    Some(phi)
}

/// Which change of variables between `φ̃` and `φ` a generalized-eigenproblem
/// solve used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerronTransform {
    /// `Aᵀφ̃ = Dφ̃`, `φ = Dφ̃`: follows from `φᵀP = φᵀ`.
    TransposedScaleUp,
    /// `Aφ̃ = Dφ̃`, `φ = D⁻¹φ̃`: only stationary when `A` is balanced.
    DirectScaleDown,
}

/// Solves `Mφ̃ = Dφ̃` at eigenvalue 1 with a dense LU factorisation, replacing
/// one equation by a normalisation row.
fn generalized_unit_eigvec(m: &DMatrix<f64>, d: &[f64]) -> Option<DVector<f64>> {
    let n = d.len();
    let mut sys = m.clone();
    for i in 0..n {
        sys[(i, i)] -= d[i];
    }
    for j in 0..n {
        sys[(n - 1, j)] = d[j];
    }
    let mut rhs = DVector::zeros(n);
    rhs[n - 1] = 1.0;
    sys.lu().solve(&rhs)
}

/// Dense cross-check route: solves the generalized eigenproblem for `(A, D)`
/// and maps back to `φ`. Both candidate transforms are tried in order and the
/// first whose stationarity residual is within `tol` is returned.
pub fn perron_vector_generalized(g: &Graph, tol: f64) -> Result<(PerronVector, PerronTransform)> {
    require_strongly_connected(g, "perron_vector_generalized")?;
    let p = g.transition_matrix()?;
    let d = g.degrees(Orientation::Out).values;
    let a = g.adjacency_dense();
    let mut best = f64::INFINITY;
    for transform in [
        PerronTransform::TransposedScaleUp,
        PerronTransform::DirectScaleDown,
    ] {
        let m = match transform {
            PerronTransform::TransposedScaleUp => a.transpose(),
            PerronTransform::DirectScaleDown => a.clone(),
        };
        let Some(tilde) = generalized_unit_eigvec(&m, &d) else {
            continue;
        };
        let mut phi: Vec<f64> = tilde
            .iter()
            .zip(&d)
            .map(|(&v, &di)| match transform {
                PerronTransform::TransposedScaleUp => di * v,
                PerronTransform::DirectScaleDown => v / di,
            })
            .collect();
        let s: f64 = phi.iter().sum();
        phi.iter_mut().for_each(|v| *v /= s);
        if phi.iter().all(|&v| v < 0.0) {
            phi.iter_mut().for_each(|v| *v = -*v);
        }
        let residual = stationarity_residual(&p, &phi);
        if residual <= tol && phi.iter().all(|&v| v > 0.0) {
            return Ok((PerronVector { phi, residual }, transform));
        }
        best = best.min(residual);
    }
    Err(Error::NotConverged {
        op: "perron_vector_generalized",
        iterations: 1,
        residual: best,
        last_iterate: Vec::new(),
    })
}

/// Arc values `F_ij = φ_i P_ij`, aligned with [`Graph::arcs`].
#[derive(Debug, Clone, PartialEq)]
pub struct CirculationField {
    pub arcs: Vec<(usize, usize, f64)>,
}

impl CirculationField {
    /// Per-node `Σ_in F − Σ_out F`.
    pub fn imbalance(&self, n: usize) -> Vec<f64> {
        let mut net = vec![0.0; n];
        for &(i, j, f) in &self.arcs {
            net[j] += f;
            net[i] -= f;
        }
        net
    }

    pub fn max_imbalance(&self, n: usize) -> f64 {
        self.imbalance(n).iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Whether `F_ij = F_ji` on every arc within `tol`.
    pub fn is_invertible(&self, tol: f64) -> bool {
        let lookup: std::collections::HashMap<(usize, usize), f64> =
            self.arcs.iter().map(|&(i, j, f)| ((i, j), f)).collect();
        self.arcs
            .iter()
            .all(|&(i, j, f)| (lookup.get(&(j, i)).copied().unwrap_or(0.0) - f).abs() <= tol)
    }

    /// `source,target,flow` rows with node labels.
    pub fn write_csv<W: Write>(&self, g: &Graph, mut out: W) -> Result<()> {
        let mut buf = String::from("source,target,flow\n");
        for &(i, j, f) in &self.arcs {
            writeln!(buf, "{},{},{}", g.label(i), g.label(j), f).unwrap();
        }
        out.write_all(buf.as_bytes())
            .map_err(|e| Error::io("circulation csv", e))
    }
}

pub fn circulation(g: &Graph, phi: &PerronVector) -> Result<CirculationField> {
    if phi.phi.len() != g.node_count() {
        return Err(Error::DimensionMismatch {
            op: "circulation",
            expected: g.node_count(),
            actual: phi.phi.len(),
        });
    }
    let p = g.transition_matrix()?;
    let arcs = (0..g.node_count())
        .flat_map(|i| p.row(i).map(move |(j, pij)| (i, j, pij)))
        .map(|(i, j, pij)| (i, j, phi.phi[i] * pij))
        .collect();
    Ok(CirculationField { arcs })
}

/// `F̃_i = Σ_j F_ij / D⁺(i)`.
pub fn average_node_circulation(g: &Graph, f: &CirculationField) -> Result<Vec<f64>> {
    let n = g.node_count();
    let deg = g.degrees(Orientation::Out).values;
    if let Some(i) = deg.iter().position(|&d| d <= 0.0) {
        return Err(Error::invalid(
            "average_node_circulation",
            format!("node '{}' has zero out-degree", g.label(i)),
        ));
    }
    let mut out = vec![0.0; n];
    for &(i, j, v) in &f.arcs {
        if i >= n || j >= n {
            return Err(Error::DimensionMismatch {
                op: "average_node_circulation",
                expected: n,
                actual: i.max(j) + 1,
            });
        }
        out[i] += v;
    }
    Ok(out.into_iter().zip(deg).map(|(s, d)| s / d).collect())
}
