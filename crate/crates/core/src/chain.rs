//! Chain geometry and dimensionless parameters.
//!
//! Distances are measured in units of the first spacing `r₁,₂`, couplings in
//! units of `D₁,₂`, and Larmor frequencies in units of `D₁,₂` as well. Time is
//! `τ = D₁,₂ t`. Nothing here carries physical units; [`ChainSpec::scale_note`]
//! is a free-form annotation only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dipolar coupling `d = 1/ξ³` for a dimensionless distance `ξ`.
pub fn coupling_from_distance(xi: f64) -> Result<f64> {
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(Error::Domain(format!("distance must be finite and positive, got {xi}")));
    }
    Ok(1.0 / (xi * xi * xi))
}

/// A linear chain of `n_nodes` spins.
///
/// Node indices are zero-based throughout the crate: node `0` is the sender,
/// node `n_nodes - 1` the receiver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChain", into = "RawChain")]
pub struct ChainSpec {
    spacings: Vec<f64>,
    larmor: Vec<f64>,
    scale_note: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChain {
    n_nodes: usize,
    spacings: Vec<f64>,
    larmor: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale_note: Option<String>,
}

impl TryFrom<RawChain> for ChainSpec {
    type Error = Error;

    fn try_from(raw: RawChain) -> Result<Self> {
        if raw.larmor.len() != raw.n_nodes {
            return Err(Error::Config(format!(
                "n_nodes = {} but {} Larmor frequencies given",
                raw.n_nodes,
                raw.larmor.len()
            )));
        }
        let mut chain = ChainSpec::new(raw.spacings, raw.larmor)?;
        chain.scale_note = raw.scale_note;
        Ok(chain)
    }
}

impl From<ChainSpec> for RawChain {
    fn from(chain: ChainSpec) -> Self {
        RawChain {
            n_nodes: chain.n_nodes(),
            spacings: chain.spacings,
            larmor: chain.larmor,
            scale_note: chain.scale_note,
        }
    }
}

impl ChainSpec {
    /// Custom chain from raw spacings (`N-1` values) and Larmor frequencies (`N` values).
    pub fn new(spacings: Vec<f64>, larmor: Vec<f64>) -> Result<Self> {
        let n = larmor.len();
        if n < 2 {
            return Err(Error::Config(format!("a chain needs at least 2 nodes, got {n}")));
        }
        if spacings.len() + 1 != n {
            return Err(Error::Config(format!(
                "{n} nodes need {} spacings, got {}",
                n - 1,
                spacings.len()
            )));
        }
        if let Some(bad) = spacings.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
            return Err(Error::Config(format!(
                "spacings must be positive and finite, got {bad}"
            )));
        }
        if let Some(bad) = larmor.iter().find(|w| !w.is_finite()) {
            return Err(Error::Config(format!("Larmor frequencies must be finite, got {bad}")));
        }
        Ok(Self {
            spacings,
            larmor,
            scale_note: None,
        })
    }

    /// Weak-end-bond chain: end spacings 1, inner spacings `δ^{-1/3}`, zero field.
    ///
    /// The inner nearest-neighbour coupling is therefore `δ` and the end bonds are 1.
    pub fn webm(n_nodes: usize, delta: f64) -> Result<Self> {
        if n_nodes < 3 {
            return Err(Error::Config(format!(
                "weak-end-bond chain needs at least 3 nodes, got {n_nodes}"
            )));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::Config(format!("delta must be positive, got {delta}")));
        }
        let inner = 1.0 / delta.cbrt();
        let mut spacings = vec![inner; n_nodes - 1];
        spacings[0] = 1.0;
        spacings[n_nodes - 2] = 1.0;
        Self::new(spacings, vec![0.0; n_nodes])
    }

    /// Uniform chain (all spacings 1) with Larmor frequency `ω` on both end nodes only.
    pub fn elfm(n_nodes: usize, omega: f64) -> Result<Self> {
        if n_nodes < 2 {
            return Err(Error::Config(format!("a chain needs at least 2 nodes, got {n_nodes}")));
        }
        let mut larmor = vec![0.0; n_nodes];
        larmor[0] = omega;
        larmor[n_nodes - 1] = omega;
        Self::new(vec![1.0; n_nodes - 1], larmor)
    }

    /// Same geometry with a different Larmor profile.
    pub fn with_larmor(&self, larmor: Vec<f64>) -> Result<Self> {
        let mut chain = Self::new(self.spacings.clone(), larmor)?;
        chain.scale_note = self.scale_note.clone();
        Ok(chain)
    }

    pub fn with_scale_note(mut self, note: impl Into<String>) -> Self {
        self.scale_note = Some(note.into());
        self
    }

    pub fn n_nodes(&self) -> usize {
        self.larmor.len()
    }

    pub fn spacings(&self) -> &[f64] {
        &self.spacings
    }

    pub fn larmor(&self) -> &[f64] {
        &self.larmor
    }

    pub fn scale_note(&self) -> Option<&str> {
        self.scale_note.as_deref()
    }

    /// Distance between nodes `n` and `m` (zero-based, `n != m`).
    ///
    /// The spacings between the two nodes are summed in ascending order of
    /// magnitude, so the result depends only on the multiset of spacings and
    /// mirror-image pairs get bitwise-identical distances.
    pub fn pair_distance(&self, n: usize, m: usize) -> Result<f64> {
        let len = self.n_nodes();
        for index in [n, m] {
            if index >= len {
                return Err(Error::Index { index, len });
            }
        }
        if n == m {
            return Err(Error::Domain(format!(
                "pair distance needs distinct nodes, got {n} twice"
            )));
        }
        let (lo, hi) = if n < m { (n, m) } else { (m, n) };
        let mut segment = self.spacings[lo..hi].to_vec();
        segment.sort_by(f64::total_cmp);
        Ok(segment.iter().sum())
    }

    /// Coupling `d_{n,m} = 1/ξ_{n,m}³`.
    pub fn coupling(&self, n: usize, m: usize) -> Result<f64> {
        coupling_from_distance(self.pair_distance(n, m)?)
    }

    /// End-to-end length `L = ξ_{1,N}`.
    pub fn total_length(&self) -> f64 {
        let mut all = self.spacings.clone();
        all.sort_by(f64::total_cmp);
        all.iter().sum()
    }

    /// True when spacings and Larmor frequencies read the same from either end.
    pub fn is_mirror_symmetric(&self) -> bool {
        self.spacings.iter().eq(self.spacings.iter().rev()) && self.larmor.iter().eq(self.larmor.iter().rev())
    }
}
