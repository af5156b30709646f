//! Eigensolvers for real symmetric matrices.
//!
//! Two independent routes: Sturm-sequence bisection with inverse iteration for
//! tridiagonal input, and cyclic Jacobi for dense input. Both hand their raw
//! eigenpairs to a shared finishing pass that sorts, resolves near-degenerate
//! clusters, and fixes eigenvector signs.

mod jacobi;
mod tridiagonal;

use std::cmp::Ordering;

use crate::matrix::Matrix;

pub use jacobi::eig_dense;
pub use tridiagonal::{eig_tridiagonal, sturm_count};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumSource {
    TridiagonalBisection,
    DenseJacobi,
    AnalyticSecular,
}

/// Eigenvalues in ascending order with orthonormal eigenvectors.
///
/// Each eigenvector has its first non-negligible component positive.
#[derive(Clone, Debug)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
    source: SpectrumSource,
}

impl Spectrum {
    /// Wraps externally computed eigenpairs. Pairs are sorted and sign-normalized
    /// but otherwise taken as given.
    pub fn from_pairs(pairs: Vec<(f64, Vec<f64>)>, source: SpectrumSource) -> Self {
        let mut pairs: Vec<(f64, Vec<f64>)> = pairs
            .into_iter()
            .map(|(l, mut v)| {
                normalize_sign(&mut v);
                (l, v)
            })
            .collect();
        pairs.sort_by(compare_pairs);
        let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
        Self {
            eigenvalues,
            eigenvectors,
            source,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, j: usize) -> &[f64] {
        &self.eigenvectors[j]
    }

    /// Component `k` of eigenvector `j`.
    pub fn component(&self, k: usize, j: usize) -> f64 {
        self.eigenvectors[j][k]
    }

    pub fn source(&self) -> SpectrumSource {
        self.source
    }

    /// Eigenvalue with the smallest magnitude.
    pub fn min_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues
            .iter()
            .copied()
            .min_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(f64::NAN)
    }

    pub fn span(&self) -> f64 {
        match (self.eigenvalues.first(), self.eigenvalues.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    /// `max_j ‖B u_j − λ_j u_j‖_∞ / (1 + |λ_j|)`.
    pub fn max_scaled_residual(&self, matrix: &Matrix) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(&l, v)| {
                let bv = matrix.mul_vec(v);
                let r = bv.iter().zip(v).fold(0.0f64, |acc, (b, x)| acc.max((b - l * x).abs()));
                r / (1.0 + l.abs())
            })
            .fold(0.0, f64::max)
    }

    /// `max_{i,j} |u_i · u_j − δ_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.eigenvectors.iter().enumerate() {
            for (j, b) in self.eigenvectors.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(a, b) - target).abs());
            }
        }
        worst
    }
}

/// `+1` or `-1` when `J v = ±v` holds to `tol` (max-norm), `None` otherwise.
pub fn mirror_parity(v: &[f64], tol: f64) -> Option<i8> {
    let n = v.len();
    let sym = (0..n).all(|k| (v[k] - v[n - 1 - k]).abs() <= tol);
    let anti = (0..n).all(|k| (v[k] + v[n - 1 - k]).abs() <= tol);
    match (sym, anti) {
        (true, false) => Some(1),
        (false, true) => Some(-1),
        _ => None,
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize_sign(v: &mut [f64]) {
    let scale = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-9 * scale) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn compare_pairs(a: &(f64, Vec<f64>), b: &(f64, Vec<f64>)) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| {
        a.1.iter()
            .zip(&b.1)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// Modified Gram–Schmidt (applied twice); drops vectors that become negligible.
fn orthonormalize(vectors: Vec<Vec<f64>>, drop_below: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for mut v in vectors {
        let original = norm(&v);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let nv = norm(&v);
        if nv > drop_below * original.max(f64::MIN_POSITIVE) {
            v.iter_mut().for_each(|x| *x /= nv);
            basis.push(v);
        }
    }
    basis
}

/// Rayleigh–Ritz on an orthonormal basis: returns Ritz values and vectors.
fn rayleigh_ritz(matrix: &Matrix, basis: &[Vec<f64>]) -> Vec<(f64, Vec<f64>)> {
    let k = basis.len();
    let images: Vec<Vec<f64>> = basis.iter().map(|v| matrix.mul_vec(v)).collect();
    let mut projected = Matrix::zeros(k);
    for i in 0..k {
        for j in 0..=i {
            // symmetrize explicitly so the small problem is exactly symmetric
            let h = 0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i]));
            projected[(i, j)] = h;
            projected[(j, i)] = h;
        }
    }
    let (values, rotation) = jacobi::jacobi_raw(&projected, 100).expect("Jacobi on a small symmetric matrix converges");
    let n = matrix.dim();
    values
        .into_iter()
        .zip(rotation)
        .map(|(value, coeffs)| {
            let mut v = vec![0.0; n];
            for (c, b) in coeffs.iter().zip(basis) {
                v.iter_mut().zip(b).for_each(|(x, y)| *x += c * y);
            }
            let nv = norm(&v);
            v.iter_mut().for_each(|x| *x /= nv);
            (value, v)
        })
        .collect()
}

/// Eigenvectors of a near-degenerate cluster, made parity-pure when the
/// matrix commutes with the exchange matrix.
fn resolve_cluster(matrix: &Matrix, values: &[f64], vectors: Vec<Vec<f64>>) -> Vec<(f64, Vec<f64>)> {
    let k = vectors.len();
    let basis = orthonormalize(vectors.clone(), 1e-8);
    if basis.len() < k {
        // inputs already rank-deficient; keep them as they are
        return values.iter().copied().zip(vectors).collect();
    }
    if !matrix.is_persymmetric() {
        return rayleigh_ritz(matrix, &basis);
    }
    let n = matrix.dim();
    let project = |sign: f64| -> Vec<Vec<f64>> {
        let mut projected: Vec<Vec<f64>> = basis
            .iter()
            .map(|v| (0..n).map(|i| 0.5 * (v[i] + sign * v[n - 1 - i])).collect())
            .collect();
        // the basis is orthonormal, so a projection this short is rounding noise
        projected.retain(|v| norm(v) > 1e-6);
        projected.sort_by(|a, b| norm(b).total_cmp(&norm(a)));
        orthonormalize(projected, 1e-6)
    };
    let even = project(1.0);
    let odd = project(-1.0);
    if even.len() + odd.len() != k {
        // cluster subspace is not parity-closed at this tolerance
        return rayleigh_ritz(matrix, &basis);
    }
    let mut pairs = rayleigh_ritz(matrix, &even);
    pairs.extend(rayleigh_ritz(matrix, &odd));
    pairs
}

/// Gap below which neighbouring eigenvalues are treated as one cluster.
///
/// The window is wide on purpose: eigenvectors of close pairs computed one at
/// a time are only orthogonal to about `ε‖B‖/gap`, while a cluster resolved
/// jointly is orthonormal to rounding. Persymmetric clusters are then split
/// exactly by parity.
pub(crate) fn cluster_gap(matrix: &Matrix, base: f64) -> f64 {
    (1e-3 * matrix.max_abs().max(1.0)).max(base)
}

/// Shared finishing pass: sort, resolve clusters whose consecutive gaps are at
/// most `cluster_gap`, and normalize signs.
pub(crate) fn finalize(
    matrix: &Matrix,
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    cluster_gap: f64,
    source: SpectrumSource,
) -> Spectrum {
    let mut pairs: Vec<(f64, Vec<f64>)> = values.into_iter().zip(vectors).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut resolved = Vec::with_capacity(pairs.len());
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].0 - pairs[end - 1].0 <= cluster_gap {
            end += 1;
        }
        if end - start == 1 {
            resolved.push(pairs[start].clone());
        } else {
            let values: Vec<f64> = pairs[start..end].iter().map(|p| p.0).collect();
            let cluster: Vec<Vec<f64>> = pairs[start..end].iter().map(|p| p.1.clone()).collect();
            resolved.extend(resolve_cluster(matrix, &values, cluster));
        }
        start = end;
    }
    Spectrum::from_pairs(resolved, source)
}
