//! Parameter tuning for fast high-probability transfer, and the exact
//! perfect-transfer points of the four-node chain.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::four_node::{alpha, beta, four_node_probability};
use crate::block::{ExcitationBlock, Interaction, Model};
use crate::chain::ChainSpec;
use crate::dynamics::{Peak, TimeStep, TransferProbe};
use crate::error::{Error, Result};
use crate::output::fmt_sig;

/// Which chain parameter the grid runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Inner coupling `δ` of a weak-end-bond chain.
    #[serde(rename = "webm")]
    WebmDelta,
    /// End Larmor frequency `ω` of a uniform chain.
    #[serde(rename = "elfm")]
    ElfmOmega,
}

impl Scheme {
    /// The chain of `n` nodes at parameter value `param`.
    pub fn chain(self, n: usize, param: f64) -> Result<ChainSpec> {
        match self {
            Scheme::WebmDelta => ChainSpec::webm(n, param),
            Scheme::ElfmOmega => ChainSpec::elfm(n, param),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "webm" | "delta" => Ok(Scheme::WebmDelta),
            "elfm" | "omega" => Ok(Scheme::ElfmOmega),
            other => Err(Error::Config(format!(
                "unknown scheme '{other}' (expected webm or elfm)"
            ))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::WebmDelta => "webm",
            Scheme::ElfmOmega => "elfm",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Earliest qualifying peak.
    #[default]
    MinTime,
    /// Highest probability among the first qualifying peaks.
    MaxProbability,
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "min_time" | "time" => Ok(Objective::MinTime),
            "max_probability" | "probability" => Ok(Objective::MaxProbability),
            other => Err(Error::Config(format!(
                "unknown objective '{other}' (expected min_time or max_probability)"
            ))),
        }
    }
}

/// Inclusive grid `lo, lo + step, …, ≤ hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl ParamGrid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
            return Err(Error::Config("grid bounds and step must be finite".into()));
        }
        if !(lo <= hi) {
            return Err(Error::Config(format!("grid needs lo <= hi, got [{lo}, {hi}]")));
        }
        if !(step > 0.0) {
            return Err(Error::Config(format!("grid step must be positive, got {step}")));
        }
        Ok(Self { lo, hi, step })
    }

    pub fn values(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step * (1.0 + 1e-12)).floor() as usize + 1;
        (0..count).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

/// One grid point and its first qualifying peak, if any.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridEntry {
    pub param: f64,
    pub peak: Option<Peak>,
}

impl GridEntry {
    fn time_or_inf(&self) -> f64 {
        self.peak.map_or(f64::INFINITY, |p| p.time)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizationResult {
    /// `None` when no grid value reaches the threshold.
    pub best: Option<GridEntry>,
    pub table: Vec<GridEntry>,
    pub threshold: f64,
}

impl OptimizationResult {
    /// Grid table as CSV `param,T,P`; non-qualifying rows leave `T,P` empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,T,P\n");
        for e in &self.table {
            match e.peak {
                Some(p) => out.push_str(&format!(
                    "{},{},{}\n",
                    fmt_sig(e.param),
                    fmt_sig(p.time),
                    fmt_sig(p.probability)
                )),
                None => out.push_str(&format!("{},,\n", fmt_sig(e.param))),
            }
        }
        out
    }

    /// Index of the grid value closest to `param`.
    pub fn nearest_index(&self, param: f64) -> Option<usize> {
        (0..self.table.len()).min_by(|&a, &b| {
            (self.table[a].param - param)
                .abs()
                .total_cmp(&(self.table[b].param - param).abs())
        })
    }

    /// True when entry `i` qualifies and its `T` is no larger than either
    /// neighbour's (a neighbour without a qualifying peak counts as `T = ∞`).
    pub fn is_local_optimum(&self, i: usize) -> bool {
        let Some(entry) = self.table.get(i) else { return false };
        if entry.peak.is_none() {
            return false;
        }
        let t = entry.time_or_inf();
        let left = i.checked_sub(1).map_or(f64::INFINITY, |j| self.table[j].time_or_inf());
        let right = self.table.get(i + 1).map_or(f64::INFINITY, GridEntry::time_or_inf);
        t <= left && t <= right
    }
}

/// Settings shared by every grid point.
#[derive(Clone, Copy, Debug)]
pub struct SearchSettings {
    pub model: Model,
    pub range: Interaction,
    pub n_nodes: usize,
    pub tau_max: f64,
    pub step: TimeStep,
    pub threshold: f64,
    pub objective: Objective,
}

/// First qualifying peak of the end-to-end probability for one chain.
pub fn first_qualifying_peak(
    chain: &ChainSpec,
    model: Model,
    range: Interaction,
    tau_max: f64,
    step: TimeStep,
    threshold: f64,
) -> Result<Option<Peak>> {
    let block = ExcitationBlock::build(chain, model, range);
    let probe = TransferProbe::end_to_end(&block.spectrum()?);
    let dt = step.resolve(&probe)?;
    probe.first_peak(tau_max, dt, threshold)
}

/// Exhaustive grid search; grid points run in parallel and the table is
/// assembled in grid order. Ties are broken towards the smaller parameter.
pub fn optimize_parameter(scheme: Scheme, grid: ParamGrid, settings: &SearchSettings) -> Result<OptimizationResult> {
    if !(0.0..=1.0).contains(&settings.threshold) {
        return Err(Error::Config(format!(
            "threshold must lie in [0, 1], got {}",
            settings.threshold
        )));
    }
    let table = grid
        .values()
        .into_par_iter()
        .map(|param| {
            let chain = scheme.chain(settings.n_nodes, param)?;
            let peak = first_qualifying_peak(
                &chain,
                settings.model,
                settings.range,
                settings.tau_max,
                settings.step,
                settings.threshold,
            )?;
            Ok(GridEntry { param, peak })
        })
        .collect::<Result<Vec<_>>>()?;

    let best = table.iter().filter(|e| e.peak.is_some()).copied().reduce(|a, b| {
        let (pa, pb) = (a.peak.unwrap(), b.peak.unwrap());
        let b_wins = match settings.objective {
            Objective::MinTime => pb.time < pa.time,
            Objective::MaxProbability => {
                pb.probability > pa.probability || (pb.probability == pa.probability && pb.time < pa.time)
            }
        };
        if b_wins {
            b
        } else {
            a
        }
    });
    Ok(OptimizationResult {
        best,
        table,
        threshold: settings.threshold,
    })
}

/// Which integer system a four-node solution comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PerfectBranch {
    /// `τ₀δ = 4πn₁`, `τ₀α = 4πn₂`, `τ₀β = 4πn₃`, `n₂ − n₃` odd.
    Commensurate,
    /// `τ₀δ = π(4n₁ + 2)`, `τ₀α = 4πn₂`, `τ₀β = 4πn₃`, `n₂ − n₃` even and nonzero.
    HalfShifted,
    /// `ω = 0`: `τ₀δ = π(4n₁ + 2)`, `τ₀√(δ² + 4) = 4πn₂`.
    ZeroField,
}

impl fmt::Display for PerfectBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PerfectBranch::Commensurate => "commensurate",
            PerfectBranch::HalfShifted => "half_shifted",
            PerfectBranch::ZeroField => "zero_field",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerfectTransferSolution {
    pub branch: PerfectBranch,
    pub n1: u32,
    pub n2: u32,
    /// Absent on the `ω = 0` branch, where `β = α`.
    pub n3: Option<u32>,
    pub omega: f64,
    pub delta: f64,
    pub tau0: f64,
    /// `P(τ₀)` from the explicit four-node formula.
    pub probability: f64,
    /// `P(τ₀)` from diagonalizing the chain's block.
    pub probability_numeric: f64,
}

/// An integer tuple that produced no solution, with the reason.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkippedTuple {
    pub branch: PerfectBranch,
    pub n1: u32,
    pub n2: u32,
    pub n3: Option<u32>,
    pub reason: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PerfectTransferReport {
    pub solutions: Vec<PerfectTransferSolution>,
    pub skipped: Vec<SkippedTuple>,
}

impl PerfectTransferReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("branch,n1,n2,n3,omega,delta,tau0,P,P_numeric\n");
        for s in &self.solutions {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                s.branch,
                s.n1,
                s.n2,
                s.n3.map(|v| v.to_string()).unwrap_or_default(),
                fmt_sig(s.omega),
                fmt_sig(s.delta),
                fmt_sig(s.tau0),
                fmt_sig(s.probability),
                fmt_sig(s.probability_numeric)
            ));
        }
        out
    }
}

const PERFECT_TOL: f64 = 1e-9;

/// Solves `τ₀δ = k₁`, `τ₀α = k₂`, `τ₀β = k₃` for `(ω, δ, τ₀)`.
///
/// `α² − β² = 8ωδ` gives `ω = (k₂² − k₃²)/(8k₁τ₀)`; substituting into
/// `α² = (2ω + δ)² + 4` leaves `4τ₀² = k₂² − ((k₂² − k₃²)/(4k₁) + k₁)²`.
fn solve_tuple(k1: f64, k2: f64, k3: f64) -> std::result::Result<(f64, f64, f64), String> {
    let shifted = (k2 * k2 - k3 * k3) / (4.0 * k1) + k1;
    let tau_sq = (k2 * k2 - shifted * shifted) / 4.0;
    if !(tau_sq > 0.0) {
        return Err(format!("no real τ₀ (τ₀² = {tau_sq:e})"));
    }
    let tau0 = tau_sq.sqrt();
    let delta = k1 / tau0;
    let omega = (k2 * k2 - k3 * k3) / (8.0 * k1 * tau0);
    Ok((omega, delta, tau0))
}

fn near_integer(x: f64, target: f64) -> bool {
    (x - target).abs() <= PERFECT_TOL * target.abs().max(1.0)
}

fn numeric_probability(omega: f64, delta: f64, tau0: f64) -> Result<f64> {
    let chain = ChainSpec::webm(4, delta)?.with_larmor(vec![omega, 0.0, 0.0, omega])?;
    let block = ExcitationBlock::build(&chain, Model::Xy, Interaction::NearestNeighbor);
    Ok(TransferProbe::end_to_end(&block.spectrum()?).probability(tau0))
}

fn admit(
    branch: PerfectBranch,
    (n1, n2, n3): (u32, u32, Option<u32>),
    report: &mut PerfectTransferReport,
) -> Result<()> {
    let k1 = match branch {
        PerfectBranch::Commensurate => 4.0 * PI * n1 as f64,
        PerfectBranch::HalfShifted | PerfectBranch::ZeroField => PI * (4.0 * n1 as f64 + 2.0),
    };
    let k2 = 4.0 * PI * n2 as f64;
    let k3 = 4.0 * PI * n3.unwrap_or(n2) as f64;
    let skip = |reason: String| SkippedTuple {
        branch,
        n1,
        n2,
        n3,
        reason,
    };

    let (omega, delta, tau0) = if branch == PerfectBranch::ZeroField {
        // δ² = 4/((2n₂/(2n₁ + 1))² − 1)
        let ratio = 2.0 * n2 as f64 / (2.0 * n1 as f64 + 1.0);
        let denom = ratio * ratio - 1.0;
        if !(denom > 0.0) {
            report.skipped.push(skip("needs n2 - n1 >= 1".into()));
            return Ok(());
        }
        let delta = 2.0 / denom.sqrt();
        (0.0, delta, k1 / delta)
    } else {
        match solve_tuple(k1, k2, k3) {
            Ok(v) => v,
            Err(reason) => {
                report.skipped.push(skip(reason));
                return Ok(());
            }
        }
    };

    let a = alpha(omega, delta);
    let b = beta(omega, delta);
    let relations_hold = near_integer(tau0 * delta, k1) && near_integer(tau0 * a, k2) && near_integer(tau0 * b, k3);
    let probability = four_node_probability(omega, delta, tau0);
    let probability_numeric = numeric_probability(omega, delta, tau0)?;
    if !relations_hold {
        report.skipped.push(skip("integer relations not reproduced".into()));
    } else if probability < 1.0 - PERFECT_TOL || probability_numeric < 1.0 - PERFECT_TOL {
        report.skipped.push(skip(format!(
            "P(τ₀) = {probability} (explicit), {probability_numeric} (numeric)"
        )));
    } else {
        report.solutions.push(PerfectTransferSolution {
            branch,
            n1,
            n2,
            n3,
            omega,
            delta,
            tau0,
            probability,
            probability_numeric,
        });
    }
    Ok(())
}

/// Perfect-transfer points of the four-node chain with all integers `≤ max_n`.
///
/// Every solution is checked against both the explicit probability formula
/// and a numeric diagonalization; tuples that fail are listed in
/// [`PerfectTransferReport::skipped`]. Tuples with `n₂ = n₃` of the second
/// system have `ω = 0` and are reported on the [`PerfectBranch::ZeroField`]
/// branch.
pub fn perfect_transfer_solutions_n4(max_n: u32) -> Result<PerfectTransferReport> {
    if max_n < 1 {
        return Err(Error::Domain("max_n must be at least 1".into()));
    }
    let mut report = PerfectTransferReport::default();
    for n1 in 1..=max_n {
        for n2 in 1..=max_n {
            for n3 in 1..=max_n {
                if n2.abs_diff(n3) % 2 == 1 {
                    admit(PerfectBranch::Commensurate, (n1, n2, Some(n3)), &mut report)?;
                }
            }
        }
    }
    for n1 in 0..=max_n {
        for n2 in 1..=max_n {
            for n3 in 1..=max_n {
                if n2 != n3 && n2.abs_diff(n3) % 2 == 0 {
                    admit(PerfectBranch::HalfShifted, (n1, n2, Some(n3)), &mut report)?;
                }
            }
        }
    }
    for n1 in 0..=max_n {
        for n2 in 1..=max_n {
            admit(PerfectBranch::ZeroField, (n1, n2, None), &mut report)?;
        }
    }
    Ok(report)
}
