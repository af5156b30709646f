//! The single-excitation block of the XY and XXZ Hamiltonians.
//!
//! In the basis `|n⟩` (node `n` flipped) both Hamiltonians conserve the
//! excitation number, so the dynamics lives in an `N×N` real symmetric matrix
//! `B = 2H`. Off-diagonal entries are the couplings `d_{n,m}`. The diagonal is
//! `2ω_n` for XY and `2ω_n + 2A_n` for XXZ, where `A_n = Σ_{i≠n} d_{i,n}` runs
//! over the interacting partners of `n`. Terms proportional to the identity are
//! dropped: they shift every eigenvalue equally and leave `|f_{nm}|` unchanged.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::spectral::{self, Spectrum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Xy,
    Xxz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Interaction {
    #[serde(rename = "nn")]
    NearestNeighbor,
    #[serde(rename = "all")]
    AllNode,
}

impl Interaction {
    fn couples(self, n: usize, m: usize) -> bool {
        n != m && (self == Interaction::AllNode || n.abs_diff(m) == 1)
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xy" => Ok(Model::Xy),
            "xxz" => Ok(Model::Xxz),
            other => Err(Error::Config(format!("unknown model `{other}` (expected xy or xxz)"))),
        }
    }
}

impl FromStr for Interaction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nn" => Ok(Interaction::NearestNeighbor),
            "all" => Ok(Interaction::AllNode),
            other => Err(Error::Config(format!(
                "unknown interaction range `{other}` (expected nn or all)"
            ))),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Xy => "xy",
            Model::Xxz => "xxz",
        })
    }
}

impl fmt::Display for Interaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Interaction::NearestNeighbor => "nn",
            Interaction::AllNode => "all",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ExcitationBlock {
    matrix: Matrix,
    model: Model,
    range: Interaction,
    chain: ChainSpec,
}

/// Sum of couplings `A_n` for every node, accumulated nearest partners first.
///
/// Left and right partners at equal index distance are added together before
/// joining the running sum, which makes `A_n` and `A_{N-1-n}` bitwise equal on
/// mirror-symmetric chains.
fn coupling_sums(couplings: &Matrix, range: Interaction) -> Vec<f64> {
    let n = couplings.dim();
    (0..n)
        .map(|node| {
            let mut total = 0.0;
            for k in 1..n {
                let left = if node >= k && range.couples(node, node - k) {
                    couplings[(node - k, node)]
                } else {
                    0.0
                };
                let right = if node + k < n && range.couples(node, node + k) {
                    couplings[(node + k, node)]
                } else {
                    0.0
                };
                total += left + right;
            }
            total
        })
        .collect()
}

fn coupling_matrix(chain: &ChainSpec, range: Interaction) -> Matrix {
    let n = chain.n_nodes();
    let mut c = Matrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if range.couples(i, j) {
                // distances of a validated chain are positive
                let d = chain.coupling(i, j).expect("validated chain");
                c[(i, j)] = d;
                c[(j, i)] = d;
            }
        }
    }
    c
}

impl ExcitationBlock {
    pub fn build(chain: &ChainSpec, model: Model, range: Interaction) -> Self {
        let mut matrix = coupling_matrix(chain, range);
        let sums = match model {
            Model::Xy => None,
            Model::Xxz => Some(coupling_sums(&matrix, range)),
        };
        for (n, &omega) in chain.larmor().iter().enumerate() {
            let mut diag = 2.0 * omega;
            if let Some(sums) = &sums {
                diag += 2.0 * sums[n];
            }
            matrix[(n, n)] = diag;
        }
        Self {
            matrix,
            model,
            range,
            chain: chain.clone(),
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn range(&self) -> Interaction {
        self.range
    }

    pub fn chain(&self) -> &ChainSpec {
        &self.chain
    }

    pub fn n_nodes(&self) -> usize {
        self.matrix.dim()
    }

    /// Diagonalizes with the tridiagonal solver for nearest-neighbour blocks and
    /// with cyclic Jacobi otherwise.
    pub fn spectrum(&self) -> Result<Spectrum> {
        match self.range {
            Interaction::NearestNeighbor => {
                spectral::eig_tridiagonal(&self.matrix.diagonal(), &self.matrix.super_diagonal())
            }
            Interaction::AllNode => spectral::eig_dense(&self.matrix),
        }
    }

    pub fn describe(&self) -> String {
        format!("{} {} N={}", self.model, self.range, self.n_nodes())
    }
}

/// XY Larmor frequencies that reproduce the XXZ block for the given profile.
///
/// `ω_xy_n = ω_xxz_n + A_n`; with identity terms dropped the two blocks are
/// the same matrix.
pub fn equivalent_xy_frequencies(chain: &ChainSpec, range: Interaction, omega_xxz: &[f64]) -> Result<Vec<f64>> {
    if omega_xxz.len() != chain.n_nodes() {
        return Err(Error::Config(format!(
            "expected {} frequencies, got {}",
            chain.n_nodes(),
            omega_xxz.len()
        )));
    }
    let sums = coupling_sums(&coupling_matrix(chain, range), range);
    Ok(omega_xxz.iter().zip(sums).map(|(w, a)| w + a).collect())
}
