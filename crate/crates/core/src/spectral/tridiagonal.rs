//! Sturm-sequence bisection and inverse iteration for symmetric tridiagonal matrices.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::{cluster_gap, dot, finalize, norm, Spectrum, SpectrumSource};

const MAX_BISECTION_STEPS: usize = 300;
const INVERSE_ITERATIONS: usize = 6;

/// Number of eigenvalues strictly below `x`.
///
/// Counts negative pivots of the `LDLᵀ` factorization of `T − xI`. Exact-zero
/// pivots are replaced by `-pivmin`.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let pivmin = pivot_floor(off);
    let mut count = 0;
    let mut q = 0.0;
    for i in 0..diag.len() {
        q = if i == 0 {
            diag[0] - x
        } else {
            diag[i] - x - off[i - 1] * off[i - 1] / q
        };
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn pivot_floor(off: &[f64]) -> f64 {
    let largest = off.iter().fold(1.0f64, |acc, e| acc.max(e * e));
    f64::MIN_POSITIVE * largest * 4.0
}

fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let pad = f64::EPSILON * (hi.abs().max(lo.abs())).max(1.0) * 4.0;
    (lo - pad, hi + pad)
}

/// `k`-th smallest eigenvalue (zero-based) by bisection on the Sturm count.
fn bisect_eigenvalue(diag: &[f64], off: &[f64], k: usize, lo: f64, hi: f64) -> Result<f64> {
    let abs_tol = 1e-3 * f64::EPSILON * lo.abs().max(hi.abs());
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + abs_tol {
            return Ok(mid);
        }
        if sturm_count(diag, off, mid) <= k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Convergence(format!(
        "bisection for eigenvalue {k} stalled in [{lo:e}, {hi:e}]"
    )))
}

/// Solves `(T − shift·I) x = b` by LU with partial pivoting. Pivots smaller
/// than `tiny` are replaced by `tiny` so the solve stays finite at an eigenvalue.
fn solve_shifted(diag: &[f64], off: &[f64], shift: f64, rhs: &[f64], tiny: f64) -> Vec<f64> {
    let n = diag.len();
    let mut d: Vec<f64> = diag.iter().map(|x| x - shift).collect();
    let mut du = off.to_vec();
    let mut dl = off.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut swapped = vec![false; n.saturating_sub(1)];

    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i].abs() < tiny {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -fact;
            }
            swapped[i] = true;
        }
    }
    if n > 0 && d[n - 1].abs() < tiny {
        d[n - 1] = tiny;
    }

    let mut b = rhs.to_vec();
    for i in 0..n.saturating_sub(1) {
        if swapped[i] {
            let temp = b[i];
            b[i] = b[i + 1];
            b[i + 1] = temp - dl[i] * b[i];
        } else {
            b[i + 1] -= dl[i] * b[i];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        if i + 1 < n {
            s -= du[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= du2[i] * x[i + 2];
        }
        x[i] = s / d[i];
    }
    x
}

fn starting_vector(n: usize, salt: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 1.0 + 0.5 * ((i * 7 + salt * 13 + 1) as f64).sin())
        .collect()
}

/// All eigenpairs of the symmetric tridiagonal matrix with diagonal `diag`
/// and off-diagonal `off`.
pub fn eig_tridiagonal(diag: &[f64], off: &[f64]) -> Result<Spectrum> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::Domain("empty matrix".into()));
    }
    if off.len() + 1 != n {
        return Err(Error::Domain(format!(
            "tridiagonal of order {n} needs {} off-diagonal entries, got {}",
            n - 1,
            off.len()
        )));
    }
    if diag.iter().chain(off).any(|x| !x.is_finite()) {
        return Err(Error::Domain("non-finite matrix entry".into()));
    }
    let matrix = Matrix::tridiagonal(diag, off);
    if n == 1 {
        return Ok(Spectrum::from_pairs(
            vec![(diag[0], vec![1.0])],
            SpectrumSource::TridiagonalBisection,
        ));
    }
    let (lo, hi) = gershgorin(diag, off);
    if sturm_count(diag, off, lo) != 0 || sturm_count(diag, off, hi) != n {
        return Err(Error::Convergence(
            "Sturm count does not certify the Gershgorin interval".into(),
        ));
    }

    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        values.push(bisect_eigenvalue(diag, off, k, lo, hi)?);
    }

    let scale = matrix.max_abs().max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * scale;
    let gap = cluster_gap(&matrix, 1e-8 * scale.max(1.0));

    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut cluster_start = 0;
    for k in 0..n {
        if k > 0 && values[k] - values[k - 1] > gap {
            cluster_start = k;
        }
        let mut v = starting_vector(n, k);
        for _ in 0..INVERSE_ITERATIONS {
            v = solve_shifted(diag, off, values[k], &v, tiny);
            for prev in &vectors[cluster_start..k] {
                let c = dot(&v, prev);
                v.iter_mut().zip(prev).for_each(|(x, y)| *x -= c * y);
            }
            let nv = norm(&v);
            if !(nv.is_finite() && nv > 0.0) {
                return Err(Error::Convergence(format!(
                    "inverse iteration broke down for eigenvalue {k}"
                )));
            }
            v.iter_mut().for_each(|x| *x /= nv);
        }
        let r = matrix
            .mul_vec(&v)
            .iter()
            .zip(&v)
            .fold(0.0f64, |acc, (bv, x)| acc.max((bv - values[k] * x).abs()));
        if r > 1e-6 * (1.0 + values[k].abs()) && k == cluster_start {
            return Err(Error::Convergence(format!(
                "inverse iteration residual {r:e} for eigenvalue {} (index {k})",
                values[k]
            )));
        }
        vectors.push(v);
    }
    Ok(finalize(
        &matrix,
        values,
        vectors,
        gap,
        SpectrumSource::TridiagonalBisection,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sturm_counts_uniform_chain() {
        let diag = [0.0; 4];
        let off = [1.0; 3];
        assert_eq!(sturm_count(&diag, &off, -2.0), 0);
        assert_eq!(sturm_count(&diag, &off, 0.0), 2);
        assert_eq!(sturm_count(&diag, &off, 1.0), 3);
        assert_eq!(sturm_count(&diag, &off, 2.0), 4);
    }

    #[test]
    fn two_by_two() {
        let s = eig_tridiagonal(&[0.0, 0.0], &[1.0]).unwrap();
        assert_eq!(s.eigenvalues().len(), 2);
        assert!((s.eigenvalues()[0] + 1.0).abs() < 1e-15);
        assert!((s.eigenvalues()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_entry() {
        let s = eig_tridiagonal(&[-4.0], &[]).unwrap();
        assert_eq!(s.eigenvalues(), &[-4.0]);
        assert_eq!(s.eigenvector(0), &[1.0]);
    }

    #[test]
    fn decoupled_blocks_with_zero_off_diagonal() {
        let s = eig_tridiagonal(&[1.0, 1.0, 5.0], &[0.0, 0.0]).unwrap();
        assert!((s.eigenvalues()[0] - 1.0).abs() < 1e-14);
        assert!((s.eigenvalues()[2] - 5.0).abs() < 1e-14);
        assert!(s.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn shifted_solve_matches_dense_product() {
        let diag = [0.3, -1.0, 2.0, 0.5];
        let off = [1.0, 0.2, -0.7];
        let rhs = [1.0, 2.0, -1.0, 0.5];
        let x = solve_shifted(&diag, &off, 0.9, &rhs, 1e-300);
        let m = Matrix::tridiagonal(&diag, &off).shifted(-0.9);
        let back = m.mul_vec(&x);
        for (a, b) in back.iter().zip(rhs) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_shapes() {
        assert!(eig_tridiagonal(&[], &[]).is_err());
        assert!(eig_tridiagonal(&[1.0, 2.0], &[]).is_err());
        assert!(eig_tridiagonal(&[1.0, f64::NAN], &[1.0]).is_err());
    }
}
