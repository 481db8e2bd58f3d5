//! Graph Laplacians for undirected and directed graphs, their spectra and the
//! Moore–Penrose pseudoinverse.
//!
//! | kind | formula | needs |
//! |------|---------|-------|
//! | Combinatorial | `D − A` | – |
//! | Normalized | `I − D^{-1/2} A D^{-1/2}` | all degrees > 0 |
//! | CombinatorialDirected | `½(D_out + D_in − A − Aᵀ)` | – |
//! | Symmetrized | `I − (Φ^{1/2}PΦ^{-1/2} + Φ^{-1/2}PᵀΦ^{1/2})/2` | strong connectivity |
//! | CombinatorialSymmetrized | `Φ − (ΦP + PᵀΦ)/2` | strong connectivity |
//! | Diplacian | `Φ^{1/2}(I − P)Φ^{-1/2}` | strong connectivity |
//!
//! `D` is the out-degree matrix, `P = D⁻¹A` and `Φ = diag(φ)` holds the
//! Perron vector normalised to sum 1.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{Graph, Orientation};
use crate::spectral::{perron_vector, PerronOptions, PerronVector};

/// Symmetry defect accepted by the symmetric eigensolver and pseudoinverse.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;
/// Smallest eigenvalue still counted as non-negative.
pub const PSD_TOLERANCE: f64 = -1e-10;
/// Relative cut-off for eigenvalues treated as zero by the pseudoinverse.
pub const PINV_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LaplacianKind {
    Combinatorial,
    Normalized,
    CombinatorialDirected,
    Symmetrized,
    CombinatorialSymmetrized,
    Diplacian,
}

impl LaplacianKind {
    pub const ALL: [LaplacianKind; 6] = [
        LaplacianKind::Combinatorial,
        LaplacianKind::Normalized,
        LaplacianKind::CombinatorialDirected,
        LaplacianKind::Symmetrized,
        LaplacianKind::CombinatorialSymmetrized,
        LaplacianKind::Diplacian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LaplacianKind::Combinatorial => "combinatorial",
            LaplacianKind::Normalized => "normalized",
            LaplacianKind::CombinatorialDirected => "combinatorial-directed",
            LaplacianKind::Symmetrized => "symmetrized",
            LaplacianKind::CombinatorialSymmetrized => "combinatorial-symmetrized",
            LaplacianKind::Diplacian => "diplacian",
        }
    }

    pub fn needs_perron(self) -> bool {
        matches!(
            self,
            LaplacianKind::Symmetrized
                | LaplacianKind::CombinatorialSymmetrized
                | LaplacianKind::Diplacian
        )
    }
}

impl fmt::Display for LaplacianKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LaplacianKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        LaplacianKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::invalid("laplacian", format!("unknown kind '{s}'")))
    }
}

/// Perron settings used when a Laplacian needs `φ`. Tighter than the
/// standalone default so that `Φ^{±1/2}` ratios are accurate to near machine
/// precision.
pub fn laplacian_perron_options() -> PerronOptions {
    PerronOptions {
        tol: 1e-15,
        max_iter: Some(100_000),
        direct_fallback: true,
    }
}

/// Builds the Laplacian of `kind`, computing the Perron vector when needed.
pub fn laplacian(g: &Graph, kind: LaplacianKind) -> Result<DMatrix<f64>> {
    let phi = if kind.needs_perron() {
        Some(perron_for(g, kind)?)
    } else {
        None
    };
    laplacian_with_perron(g, kind, phi.as_ref())
}

fn perron_for(g: &Graph, kind: LaplacianKind) -> Result<PerronVector> {
    perron_vector(g, &laplacian_perron_options()).map_err(|e| Error::LaplacianPrecondition {
        kind: kind.name(),
        requirement: format!("needs a Perron vector: {e}"),
    })
}

/// As [`laplacian`], reusing a precomputed Perron vector for the kinds that
/// need one.
pub fn laplacian_with_perron(
    g: &Graph,
    kind: LaplacianKind,
    phi: Option<&PerronVector>,
) -> Result<DMatrix<f64>> {
    let n = g.node_count();
    let a = g.adjacency_dense();
    let d_out = g.degrees(Orientation::Out).values;
    match kind {
        LaplacianKind::Combinatorial => {
            let mut l = -a;
            for i in 0..n {
                l[(i, i)] += d_out[i];
            }
            Ok(l)
        }
        LaplacianKind::Normalized => {
            if let Some(i) = d_out.iter().position(|&d| d <= 0.0) {
                return Err(Error::LaplacianPrecondition {
                    kind: kind.name(),
                    requirement: format!("node '{}' has zero degree", g.label(i)),
                });
            }
            let s: Vec<f64> = d_out.iter().map(|d| 1.0 / d.sqrt()).collect();
            let mut l = DMatrix::from_fn(n, n, |i, j| -s[i] * a[(i, j)] * s[j]);
            for i in 0..n {
                l[(i, i)] += 1.0;
            }
            Ok(l)
        }
        LaplacianKind::CombinatorialDirected => {
            let d_in = g.degrees(Orientation::In).values;
            let mut l = DMatrix::from_fn(n, n, |i, j| -0.5 * (a[(i, j)] + a[(j, i)]));
            for i in 0..n {
                l[(i, i)] += 0.5 * (d_out[i] + d_in[i]);
            }
            Ok(l)
        }
        LaplacianKind::Symmetrized
        | LaplacianKind::CombinatorialSymmetrized
        | LaplacianKind::Diplacian => {
            let owned;
            let phi = match phi {
                Some(p) => p,
                None => {
                    owned = perron_for(g, kind)?;
                    &owned
                }
            };
            if phi.phi.len() != n {
                return Err(Error::DimensionMismatch {
                    op: "laplacian",
                    expected: n,
                    actual: phi.phi.len(),
                });
            }
            let p = g
                .transition_matrix()
                .map_err(|e| Error::LaplacianPrecondition {
                    kind: kind.name(),
                    requirement: e.to_string(),
                })?;
            let p = p.to_dense();
            let f = &phi.phi;
            let root: Vec<f64> = f.iter().map(|v| v.sqrt()).collect();
            Ok(match kind {
                LaplacianKind::Symmetrized => {
                    // M = Φ^{1/2} P Φ^{-1/2}; 𝓛 = I − (M + Mᵀ)/2
                    let m = DMatrix::from_fn(n, n, |i, j| root[i] * p[(i, j)] / root[j]);
                    DMatrix::from_fn(n, n, |i, j| {
                        let off = 0.5 * (m[(i, j)] + m[(j, i)]);
                        if i == j {
                            1.0 - off
                        } else {
                            -off
                        }
                    })
                }
                LaplacianKind::CombinatorialSymmetrized => DMatrix::from_fn(n, n, |i, j| {
                    let off = 0.5 * (f[i] * p[(i, j)] + f[j] * p[(j, i)]);
                    if i == j {
                        f[i] - off
                    } else {
                        -off
                    }
                }),
                _ => DMatrix::from_fn(n, n, |i, j| {
                    let ip = if i == j { 1.0 } else { 0.0 } - p[(i, j)];
                    root[i] * ip / root[j]
                }),
            })
        }
    }
}

/// Largest `|M_ij − M_ji|`.
pub fn symmetry_defect(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

fn require_symmetric(m: &DMatrix<f64>, op: &'static str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            op,
            expected: m.nrows(),
            actual: m.ncols(),
        });
    }
    let defect = symmetry_defect(m);
    if !(defect <= SYMMETRY_TOLERANCE) {
        return Err(Error::Asymmetric { op, defect });
    }
    Ok(())
}

/// Eigenvalues in ascending order with matching eigenvector columns.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    require_symmetric(m, "symmetric_eigenvalues")?;
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |i, c| eig.eigenvectors[(i, order[c])]);
    Ok((values, vectors))
}

/// Full real spectrum of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    symmetric_eigen(m).map(|(v, _)| v)
}

/// Eigenvalues of a general real matrix, sorted by real then imaginary part.
pub fn general_eigenvalues(m: &DMatrix<f64>) -> Vec<Complex<f64>> {
    let mut ev: Vec<Complex<f64>> = m.clone().complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}

#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    Real(Vec<f64>),
    Complex(Vec<Complex<f64>>),
}

impl Spectrum {
    pub fn len(&self) -> usize {
        match self {
            Spectrum::Real(v) => v.len(),
            Spectrum::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Real parts, ascending.
    pub fn real_parts(&self) -> Vec<f64> {
        match self {
            Spectrum::Real(v) => v.clone(),
            Spectrum::Complex(v) => v.iter().map(|c| c.re).collect(),
        }
    }
}

/// Spectrum of one Laplacian with its symmetry and definiteness verdicts.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub kind: LaplacianKind,
    pub eigenvalues: Spectrum,
    pub symmetry_defect: f64,
    pub is_symmetric: bool,
    /// Smallest eigenvalue; `None` when the spectrum is reported as complex.
    pub min_eigenvalue: Option<f64>,
    /// PSD verdict; `None` for the Diplacian and for asymmetric matrices.
    pub is_psd: Option<bool>,
    pub spectral_radius: f64,
}

pub fn spectrum_report(g: &Graph, kind: LaplacianKind) -> Result<SpectrumReport> {
    let m = laplacian(g, kind)?;
    Ok(report_for_matrix(&m, kind))
}

pub fn report_for_matrix(m: &DMatrix<f64>, kind: LaplacianKind) -> SpectrumReport {
    let defect = symmetry_defect(m);
    let is_symmetric = defect <= SYMMETRY_TOLERANCE;
    if is_symmetric && kind != LaplacianKind::Diplacian {
        let values = symmetric_eigenvalues(m).expect("symmetry checked");
        let min = values.first().copied().unwrap_or(0.0);
        let radius = values.iter().fold(0.0f64, |r, v| r.max(v.abs()));
        SpectrumReport {
            kind,
            eigenvalues: Spectrum::Real(values),
            symmetry_defect: defect,
            is_symmetric,
            min_eigenvalue: Some(min),
            is_psd: Some(min >= PSD_TOLERANCE),
            spectral_radius: radius,
        }
    } else {
        let values = general_eigenvalues(m);
        let radius = values.iter().fold(0.0f64, |r, v| r.max(v.norm()));
        SpectrumReport {
            kind,
            eigenvalues: Spectrum::Complex(values),
            symmetry_defect: defect,
            is_symmetric,
            min_eigenvalue: None,
            is_psd: None,
            spectral_radius: radius,
        }
    }
}

/// Moore–Penrose pseudoinverse of a symmetric PSD matrix via its
/// eigendecomposition; eigenvalues below `PINV_CUTOFF · λ_max` are dropped.
pub fn laplacian_pseudoinverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (values, vectors) = symmetric_eigen(m).map_err(|e| match e {
        Error::Asymmetric { defect, .. } => Error::Asymmetric {
            op: "laplacian_pseudoinverse",
            defect,
        },
        other => other,
    })?;
    let max = values.last().copied().unwrap_or(0.0);
    let cutoff = PINV_CUTOFF * max;
    // V diag(1/λ) Vᵀ over the eigenvalues kept
    let mut scaled = vectors.clone();
    for (k, &lambda) in values.iter().enumerate() {
        let factor = if max > 0.0 && lambda >= cutoff {
            1.0 / lambda
        } else {
            0.0
        };
        scaled.column_mut(k).scale_mut(factor);
    }
    Ok(scaled * vectors.transpose())
}

/// How the combinatorial symmetrized Laplacian of an undirected graph relates
/// to `L = D − A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinatorialAgreement {
    /// `max |𝓛_G − L|`.
    pub raw_defect: f64,
    /// `max |(Σd)·𝓛_G − L|`, undoing the `Σφ = 1` scaling of `φ = d/Σd`.
    pub rescaled_defect: f64,
}

pub fn combinatorial_agreement(g: &Graph) -> Result<CombinatorialAgreement> {
    if g.is_directed() {
        return Err(Error::DirectedGraph {
            op: "combinatorial_agreement",
        });
    }
    let lg = laplacian(g, LaplacianKind::CombinatorialSymmetrized)?;
    let l = laplacian(g, LaplacianKind::Combinatorial)?;
    let total: f64 = g.degrees(Orientation::Out).values.iter().sum();
    Ok(CombinatorialAgreement {
        raw_defect: (&lg - &l).amax(),
        rescaled_defect: (&lg * total - &l).amax(),
    })
}
