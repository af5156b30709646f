//! Exact diagonalization of the nearest-neighbour XY chain with weak end
//! bonds and end Larmor frequencies.
//!
//! The block is tridiagonal with diagonal `[2ω, 0, …, 0, 2ω]` and
//! off-diagonal `[1, δ, …, δ, 1]`. Bulk eigenvector components are
//! `C₁e^{-ikp} + C₂e^{ikp}` with `λ = 2δ cos p`; matching the four boundary
//! rows splits the spectrum into a mirror-symmetric family
//! `δ(2ω − 2δ cos p) cos((N−1)p/2) + cos((N−3)p/2) = 0` and an antisymmetric
//! family with `sin` in place of `cos`.
//!
//! Roots outside the band `|λ| ≤ 2δ` are represented by the continuation
//! `p = iq` (`λ > 2δ`) or `p = π − iq` (`λ < −2δ`); every formula below is
//! evaluated in complex arithmetic so one code path covers all branches.

pub mod four_node;

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{self, mirror_parity, Spectrum, SpectrumSource};

pub use four_node::{alpha, beta, four_node_eigenvalues, four_node_probability};

/// Relative residual below which a secular family is considered satisfied.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// `|sin p|` below which the normalization uses its `p → 0, π` limit.
const SMALL_SIN: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Symmetric => "symmetric",
            Parity::Antisymmetric => "antisymmetric",
        })
    }
}

/// Which continuation of `p` a root lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `|λ| ≤ 2δ`, real `p ∈ [0, π]`.
    InBand,
    /// `λ > 2δ`, `p = iq`.
    Above,
    /// `λ < −2δ`, `p = π − iq`.
    Below,
}

#[derive(Clone, Debug)]
pub struct SecularRoot {
    p: Complex64,
    parity: Parity,
    eigenvalue: f64,
    normalization: f64,
}

impl SecularRoot {
    pub fn p(&self) -> Complex64 {
        self.p
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// `λ = 2δ cos p`.
    pub fn eigenvalue(&self) -> f64 {
        self.eigenvalue
    }

    /// Modulus of the normalization constant `A`. On the hyperbolic branches
    /// `A` itself may be imaginary; the eigenvector is real up to that phase.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn branch(&self) -> Branch {
        if self.p.im == 0.0 {
            Branch::InBand
        } else if self.p.re < PI / 2.0 {
            Branch::Above
        } else {
            Branch::Below
        }
    }
}

/// Diagonal and off-diagonal of the combined weak-end-bond / end-field block.
pub fn nn_chain_matrix(n: usize, delta: f64, omega: f64) -> (Vec<f64>, Vec<f64>) {
    let mut diag = vec![0.0; n];
    diag[0] = 2.0 * omega;
    diag[n - 1] = 2.0 * omega;
    let mut off = vec![delta; n - 1];
    off[0] = 1.0;
    off[n - 2] = 1.0;
    (diag, off)
}

/// `p` with `2δ cos p = λ`, continued off the real axis outside the band.
pub fn parameter_from_eigenvalue(lambda: f64, delta: f64) -> Complex64 {
    let x = lambda / (2.0 * delta);
    if x > 1.0 {
        Complex64::new(0.0, x.acosh())
    } else if x < -1.0 {
        Complex64::new(PI, -(-x).acosh())
    } else {
        Complex64::new(x.acos(), 0.0)
    }
}

/// `(g_s, g_a)`: the symmetric and antisymmetric secular functions at `p`.
pub fn secular_residuals(p: Complex64, n: usize, delta: f64, omega: f64) -> (Complex64, Complex64) {
    let big = p * ((n as f64 - 1.0) / 2.0);
    let small = p * ((n as f64 - 3.0) / 2.0);
    let lead = (Complex64::new(2.0 * omega, 0.0) - p.cos() * (2.0 * delta)) * delta;
    (lead * big.cos() + small.cos(), lead * big.sin() + small.sin())
}

/// Magnitude scale of the secular terms at `p`, for relative residuals.
fn secular_scale(p: Complex64, n: usize, delta: f64, omega: f64) -> f64 {
    let big = (p.im * (n as f64 - 1.0) / 2.0).cosh();
    let small = (p.im * (n as f64 - 3.0) / 2.0).cosh();
    let lead = ((Complex64::new(2.0 * omega, 0.0) - p.cos() * (2.0 * delta)) * delta).norm();
    lead * big + small
}

/// Secular residual of `root` for its own family, relative to the term scale.
pub fn relative_residual(root: &SecularRoot, n: usize, delta: f64, omega: f64) -> f64 {
    let (gs, ga) = secular_residuals(root.p, n, delta, omega);
    let g = match root.parity {
        Parity::Symmetric => gs,
        Parity::Antisymmetric => ga,
    };
    g.norm() / secular_scale(root.p, n, delta, omega)
}

/// Number of mirror-symmetric roots, `N − ⌊N/2⌋`.
pub fn symmetric_count(n: usize) -> usize {
    n - n / 2
}

fn validate(n: usize, delta: f64, omega: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::Domain(format!("secular equations need N >= 3, got {n}")));
    }
    if !(delta > 0.0) || !delta.is_finite() || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "need finite delta > 0 and finite omega, got delta = {delta}, omega = {omega}"
        )));
    }
    Ok(())
}

/// Inverse square of the normalization constant, `A^{-2}`.
fn normalization_denominator(p: Complex64, parity: Parity, n: usize, delta: f64) -> Complex64 {
    let nf = n as f64;
    let sin_p = p.sin();
    let ratio = if sin_p.norm() < SMALL_SIN {
        // sin((N-2)p)/sin p at p = 0 and p = π
        let sign = if p.re < PI / 2.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        Complex64::new(sign * (nf - 2.0), 0.0)
    } else {
        (p * (nf - 2.0)).sin() / sin_p
    };
    let c = (p * (nf - 1.0)).cos();
    let half = Complex64::new((nf - 2.0) / 2.0, 0.0);
    match parity {
        Parity::Symmetric => half + (c + 1.0) * (delta * delta) + ratio * 0.5,
        Parity::Antisymmetric => half + (-c + 1.0) * (delta * delta) - ratio * 0.5,
    }
}

fn root_with_parity(p: Complex64, parity: Parity, lambda: f64, n: usize, delta: f64) -> SecularRoot {
    let denom = normalization_denominator(p, parity, n, delta);
    SecularRoot {
        p,
        parity,
        eigenvalue: lambda,
        normalization: denom.norm().sqrt().recip(),
    }
}

/// All `N` roots of the secular equations, ordered by ascending eigenvalue.
///
/// Eigenvalues come from Sturm bisection on the block itself, which certifies
/// that none is missing; each is mapped to `p` and assigned to the family
/// whose residual vanishes. When both residuals vanish (a numerically
/// degenerate pair) the mirror parity of the numeric eigenvector decides.
pub fn find_secular_roots(n: usize, delta: f64, omega: f64) -> Result<Vec<SecularRoot>> {
    validate(n, delta, omega)?;
    let (diag, off) = nn_chain_matrix(n, delta, omega);
    let spectrum = spectral::eig_tridiagonal(&diag, &off)?;

    let mut roots = Vec::with_capacity(n);
    for (j, &lambda) in spectrum.eigenvalues().iter().enumerate() {
        let p = parameter_from_eigenvalue(lambda, delta);
        let (gs, ga) = secular_residuals(p, n, delta, omega);
        let scale = secular_scale(p, n, delta, omega);
        let (rs, ra) = (gs.norm() / scale, ga.norm() / scale);
        let parity = if rs < RESIDUAL_TOL && ra < RESIDUAL_TOL {
            match mirror_parity(spectrum.eigenvector(j), 1e-6) {
                Some(1) => Parity::Symmetric,
                Some(_) => Parity::Antisymmetric,
                None => {
                    return Err(Error::RootSearch(format!(
                        "eigenvalue {lambda} satisfies both families and its eigenvector has no definite parity"
                    )))
                }
            }
        } else if rs <= ra {
            Parity::Symmetric
        } else {
            Parity::Antisymmetric
        };
        roots.push(root_with_parity(p, parity, lambda, n, delta));
    }

    let found_sym = roots.iter().filter(|r| r.parity == Parity::Symmetric).count();
    if found_sym != symmetric_count(n) {
        let listing: Vec<String> = roots
            .iter()
            .map(|r| format!("λ={:.12} p={} {}", r.eigenvalue, r.p, r.parity))
            .collect();
        return Err(Error::RootSearch(format!(
            "expected {} symmetric roots, found {found_sym}: [{}]",
            symmetric_count(n),
            listing.join("; ")
        )));
    }
    Ok(roots)
}

fn family(parity: Parity, z: Complex64) -> Complex64 {
    match parity {
        Parity::Symmetric => z.cos(),
        Parity::Antisymmetric => z.sin(),
    }
}

/// Unnormalized closed-form components `c(mp/2)`, ends scaled by `δ` and the
/// receiving end flipped for antisymmetric roots.
fn raw_components(root: &SecularRoot, n: usize, delta: f64) -> Vec<Complex64> {
    let nf = n as f64;
    let end = family(root.parity, root.p * ((nf - 1.0) / 2.0)) * delta;
    let mut u = Vec::with_capacity(n);
    u.push(end);
    for k in 2..n {
        let m = nf + 1.0 - 2.0 * k as f64;
        u.push(family(root.parity, root.p * (m / 2.0)));
    }
    u.push(match root.parity {
        Parity::Symmetric => end,
        Parity::Antisymmetric => -end,
    });
    u
}

/// Normalized closed-form components, real after removing the common phase.
fn components(root: &SecularRoot, n: usize, delta: f64) -> Result<Vec<f64>> {
    if n < 3 {
        return Err(Error::Domain(format!("closed form needs N >= 3, got {n}")));
    }
    let nf = n as f64;
    let denom = normalization_denominator(root.p, root.parity, n, delta);
    let mut u = raw_components(root, n, delta);
    let well_conditioned = denom.norm() > 1e-6 * (nf + delta * delta);
    if well_conditioned {
        let a = denom.sqrt().inv();
        u.iter_mut().for_each(|z| *z *= a);
    }

    let Some(pivot) = u.iter().copied().max_by(|x, y| x.norm().total_cmp(&y.norm())) else {
        unreachable!("n >= 3")
    };
    let mut v: Vec<f64> = if pivot.norm() > 0.0 {
        let phase = pivot / pivot.norm();
        u.iter().map(|z| (z / phase).re).collect()
    } else {
        // every c(mp/2) vanishes exactly: antisymmetric root at p = 0, where
        // the family tends to components proportional to m
        let mut w: Vec<f64> = (1..=n).map(|k| (nf + 1.0 - 2.0 * k as f64) / 2.0).collect();
        w[0] *= delta;
        w[n - 1] *= delta;
        w
    };
    if !well_conditioned {
        // near a removable zero of the denominator the sum of squares is the
        // accurate normalization
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::DegenerateRoot(format!(
            "normalization denominator {denom} at p = {} ({})",
            root.p, root.parity
        )));
    }
    Ok(v)
}

/// Closed-form eigenvector for `root`: end components `δA·c((N−1)p/2)` (with a
/// sign flip at the receiving end for antisymmetric roots) and bulk components
/// `A·c((N+1−2k)p/2)`, where `c` is `cos` or `sin` by parity.
///
/// The common phase is removed, so the result is real with its first
/// component positive. Where the normalization denominator has a removable
/// zero (`p` at 0 or π for the family that vanishes there) the vector is
/// normalized directly.
pub fn eigvec_closed_form(root: &SecularRoot, n: usize, delta: f64) -> Result<Vec<f64>> {
    let mut v = components(root, n, delta)?;
    if v[0] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(v)
}

/// End-to-end weights `u_{1j} u_{Nj}` from the closed forms, one per root.
pub fn end_to_end_weights(roots: &[SecularRoot], n: usize, delta: f64) -> Result<Vec<f64>> {
    roots
        .iter()
        .map(|r| components(r, n, delta).map(|v| v[0] * v[n - 1]))
        .collect()
}

/// End-to-end transfer probability from the closed-form root sums:
/// `δ⁴ |Σ_sym A²cos²((N−1)p/2) e^{−iδτ cos p} − Σ_anti A²sin²((N−1)p/2) e^{−iδτ cos p}|²`.
pub fn probability_closed_form(roots: &[SecularRoot], n: usize, delta: f64, tau: f64) -> Result<f64> {
    let weights = end_to_end_weights(roots, n, delta)?;
    let f: Complex64 = roots
        .iter()
        .zip(weights)
        .map(|(r, w)| Complex64::from_polar(w, -0.5 * r.eigenvalue * tau))
        .sum();
    Ok(f.norm_sqr())
}

/// Full spectrum assembled from the closed forms.
pub fn analytic_spectrum(roots: &[SecularRoot], n: usize, delta: f64) -> Result<Spectrum> {
    let pairs = roots
        .iter()
        .map(|r| Ok((r.eigenvalue, eigvec_closed_form(r, n, delta)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum::from_pairs(pairs, SpectrumSource::AnalyticSecular))
}
