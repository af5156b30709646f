//! The ten-node reference experiments and the transfer-time comparison tables
//! built from them.

use rayon::prelude::*;
use serde::Serialize;

use crate::block::{ExcitationBlock, Interaction, Model};
use crate::chain::ChainSpec;
use crate::dynamics::{two_spin_time, Peak, TransferProbe};
use crate::error::Result;
use crate::output::fmt_sig;
use crate::search::Scheme;

pub const NODES: usize = 10;
/// Inner coupling of the weak-end-bond chains.
pub const WEBM_DELTA: f64 = 8.0;
/// End fields tuned for the uniform chains.
pub const ELFM_OMEGA_XY: f64 = 2.203;
pub const ELFM_OMEGA_XXZ: f64 = 2.651;
/// Geometric factor in the scheme comparison: the cube of the ratio of the
/// end-to-end lengths, `(9 / (11/2))³`.
pub const LENGTH_FACTOR: f64 = (18.0 / 11.0) * (18.0 / 11.0) * (18.0 / 11.0);

/// One reference experiment: a chain, a Hamiltonian, and the reported peak.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub id: &'static str,
    pub model: Model,
    pub scheme: Scheme,
    pub range: Interaction,
    /// `δ` for weak-end-bond chains, `ω` for end-field chains.
    pub param: f64,
    pub reference_time: f64,
    pub reference_probability: f64,
}

impl ExperimentSpec {
    pub fn chain(&self) -> Result<ChainSpec> {
        self.scheme.chain(NODES, self.param)
    }

    pub fn probe(&self) -> Result<TransferProbe> {
        let block = ExcitationBlock::build(&self.chain()?, self.model, self.range);
        Ok(TransferProbe::end_to_end(&block.spectrum()?))
    }
}

const fn spec(
    id: &'static str,
    model: Model,
    scheme: Scheme,
    range: Interaction,
    param: f64,
    reference_time: f64,
    reference_probability: f64,
) -> ExperimentSpec {
    ExperimentSpec {
        id,
        model,
        scheme,
        range,
        param,
        reference_time,
        reference_probability,
    }
}

use Interaction::{AllNode, NearestNeighbor};
use Model::{Xxz, Xy};
use Scheme::{ElfmOmega, WebmDelta};

pub const EXPERIMENTS: [ExperimentSpec; 8] = [
    spec("xy-webm-all", Xy, WebmDelta, AllNode, WEBM_DELTA, 21.518, 0.976),
    spec("xy-webm-nn", Xy, WebmDelta, NearestNeighbor, WEBM_DELTA, 28.698, 0.972),
    spec("xxz-webm-all", Xxz, WebmDelta, AllNode, WEBM_DELTA, 659.630, 0.995),
    spec(
        "xxz-webm-nn",
        Xxz,
        WebmDelta,
        NearestNeighbor,
        WEBM_DELTA,
        142288.896,
        1.000,
    ),
    spec("xy-elfm-all", Xy, ElfmOmega, AllNode, ELFM_OMEGA_XY, 730.786, 0.985),
    spec(
        "xy-elfm-nn",
        Xy,
        ElfmOmega,
        NearestNeighbor,
        ELFM_OMEGA_XY,
        485566.049,
        0.994,
    ),
    spec("xxz-elfm-all", Xxz, ElfmOmega, AllNode, ELFM_OMEGA_XXZ, 330.352, 0.971),
    spec(
        "xxz-elfm-nn",
        Xxz,
        ElfmOmega,
        NearestNeighbor,
        ELFM_OMEGA_XXZ,
        48538.313,
        0.973,
    ),
];

pub fn find(model: Model, scheme: Scheme, range: Interaction) -> &'static ExperimentSpec {
    EXPERIMENTS
        .iter()
        .find(|e| e.model == model && e.scheme == scheme && e.range == range)
        .expect("every combination is registered")
}

/// Our numbers for one experiment.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Reproduction {
    pub spec: ExperimentSpec,
    /// `P` evaluated at the reported time.
    pub probability_at_reference: f64,
    /// Refined local maximum nearest the reported time.
    pub nearest_peak: Peak,
}

impl Reproduction {
    /// `|T_peak − T_ref| / T_ref`.
    pub fn time_offset(&self) -> f64 {
        (self.nearest_peak.time - self.spec.reference_time).abs() / self.spec.reference_time
    }
}

pub fn reproduce(spec: &ExperimentSpec) -> Result<Reproduction> {
    let probe = spec.probe()?;
    let dt = probe.auto_step();
    Ok(Reproduction {
        spec: *spec,
        probability_at_reference: probe.probability(spec.reference_time),
        nearest_peak: probe.nearest_peak(spec.reference_time, dt)?,
    })
}

pub fn reproduce_all() -> Result<Vec<Reproduction>> {
    EXPERIMENTS.par_iter().map(reproduce).collect()
}

/// End-to-end length of the ten-node chain under `scheme`.
pub fn chain_length(scheme: Scheme) -> Result<f64> {
    let param = match scheme {
        WebmDelta => WEBM_DELTA,
        ElfmOmega => ELFM_OMEGA_XY,
    };
    Ok(scheme.chain(NODES, param)?.total_length())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableEntry {
    pub table: &'static str,
    pub row: String,
    pub column: String,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tables {
    pub entries: Vec<TableEntry>,
    pub reproductions: Vec<Reproduction>,
    pub two_spin_times: Vec<(String, f64)>,
}

impl Tables {
    pub fn get(&self, table: &str, row: &str, column: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.table == table && e.row == row && e.column == column)
            .map(|e| e.value)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("table,row,column,value\n");
        for e in &self.entries {
            out.push_str(&format!("{},{},{},{}\n", e.table, e.row, e.column, fmt_sig(e.value)));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialize") + "\n"
    }
}

fn label(model: Model, scheme: Scheme, range: Interaction) -> (String, String) {
    (format!("{model}-{range}"), scheme.to_string())
}

/// Ratios of the refined transfer times:
/// - `T/τ₂(L)` against the two-spin time over the same length,
/// - `T^(nn)/T^(all)`,
/// - `T^(XY)/T^(XXZ)`,
/// - `(T^(webm)/T^(elfm))·b` with `b` = [`LENGTH_FACTOR`].
pub fn compute_tables() -> Result<Tables> {
    let reproductions = reproduce_all()?;
    let time = |m: Model, s: Scheme, r: Interaction| -> f64 {
        let spec = find(m, s, r);
        reproductions
            .iter()
            .find(|x| x.spec.id == spec.id)
            .expect("reproduced")
            .nearest_peak
            .time
    };
    let mut entries = Vec::new();
    let mut two_spin_times = Vec::new();

    for scheme in [WebmDelta, ElfmOmega] {
        let tau2 = two_spin_time(chain_length(scheme)?)?;
        two_spin_times.push((scheme.to_string(), tau2));
        for model in [Xy, Xxz] {
            for range in [AllNode, NearestNeighbor] {
                let (row, column) = label(model, scheme, range);
                entries.push(TableEntry {
                    table: "I",
                    row,
                    column,
                    value: time(model, scheme, range) / tau2,
                });
            }
        }
    }
    for model in [Xy, Xxz] {
        for scheme in [WebmDelta, ElfmOmega] {
            entries.push(TableEntry {
                table: "II",
                row: model.to_string(),
                column: scheme.to_string(),
                value: time(model, scheme, NearestNeighbor) / time(model, scheme, AllNode),
            });
        }
    }
    for scheme in [WebmDelta, ElfmOmega] {
        for range in [AllNode, NearestNeighbor] {
            entries.push(TableEntry {
                table: "III",
                row: scheme.to_string(),
                column: range.to_string(),
                value: time(Xy, scheme, range) / time(Xxz, scheme, range),
            });
        }
    }
    for model in [Xy, Xxz] {
        for range in [AllNode, NearestNeighbor] {
            entries.push(TableEntry {
                table: "IV",
                row: model.to_string(),
                column: range.to_string(),
                value: time(model, WebmDelta, range) / time(model, ElfmOmega, range) * LENGTH_FACTOR,
            });
        }
    }
    Ok(Tables {
        entries,
        reproductions,
        two_spin_times,
    })
}
