use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::{cluster_gap, finalize, Spectrum, SpectrumSource};

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi rotations. Returns unsorted eigenvalues and eigenvectors
/// (one `Vec` per eigenvector).
pub(super) fn jacobi_raw(matrix: &Matrix, max_sweeps: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = matrix.dim();
    let mut a = matrix.clone();
    let mut v = Matrix::identity(n);
    let frob = (0..n)
        .flat_map(|i| a.row(i).to_vec())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    let tiny = 1e-18 * frob;

    let mut converged = n < 2 || frob == 0.0;
    for _ in 0..max_sweeps {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= tiny {
                    continue;
                }
                rotated = true;
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        let off: f64 = (0..n)
            .map(|i| (0..n).filter(|&j| j != i).map(|j| a[(i, j)].powi(2)).sum::<f64>())
            .sum::<f64>()
            .sqrt();
        return Err(Error::Convergence(format!(
            "Jacobi: off-diagonal norm {off:e} after {max_sweeps} sweeps (n = {n})"
        )));
    }
    let values = a.diagonal();
    let vectors = (0..n).map(|j| (0..n).map(|i| v[(i, j)]).collect()).collect();
    Ok((values, vectors))
}

/// Full eigendecomposition of a dense real symmetric matrix.
pub fn eig_dense(matrix: &Matrix) -> Result<Spectrum> {
    if !matrix.is_symmetric() {
        return Err(Error::Domain("eig_dense needs a symmetric matrix".into()));
    }
    let (values, vectors) = jacobi_raw(matrix, MAX_SWEEPS)?;
    let gap = cluster_gap(matrix, 1e-12 * matrix.max_abs().max(1.0));
    Ok(finalize(matrix, values, vectors, gap, SpectrumSource::DenseJacobi))
}
