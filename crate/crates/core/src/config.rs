//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::block::{Interaction, Model};
use crate::chain::ChainSpec;
use crate::dynamics::TimeStep;
use crate::error::{Error, Result};
use crate::search::{Objective, ParamGrid, Scheme};

pub const DEFAULT_THRESHOLD: f64 = 0.97;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainScheme {
    Webm,
    Elfm,
    Custom,
}

impl std::str::FromStr for ChainScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "webm" => Ok(ChainScheme::Webm),
            "elfm" => Ok(ChainScheme::Elfm),
            "custom" => Ok(ChainScheme::Custom),
            other => Err(Error::Config(format!(
                "unknown scheme '{other}' (expected webm, elfm or custom)"
            ))),
        }
    }
}

/// Raw configuration: every field optional so a file and command-line
/// flags can be layered with [`ExperimentConfig::overridden_by`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: Option<Model>,
    pub scheme: Option<ChainScheme>,
    pub range: Option<Interaction>,
    pub n: Option<usize>,
    pub delta: Option<f64>,
    pub omega: Option<f64>,
    pub tau_max: Option<f64>,
    pub dtau: Option<TimeStep>,
    pub threshold: Option<f64>,
    pub out: Option<PathBuf>,
    /// Explicit geometry for `scheme = "custom"`.
    pub chain: Option<ChainSpec>,
    pub grid: Option<ParamGrid>,
    pub objective: Option<Objective>,
}

/// Validated settings ready to run.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub model: Model,
    pub scheme: ChainScheme,
    pub range: Interaction,
    pub chain: ChainSpec,
    pub tau_max: f64,
    pub step: TimeStep,
    pub threshold: f64,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overridden_by(self, other: ExperimentConfig) -> Self {
        Self {
            model: other.model.or(self.model),
            scheme: other.scheme.or(self.scheme),
            range: other.range.or(self.range),
            n: other.n.or(self.n),
            delta: other.delta.or(self.delta),
            omega: other.omega.or(self.omega),
            tau_max: other.tau_max.or(self.tau_max),
            dtau: other.dtau.or(self.dtau),
            threshold: other.threshold.or(self.threshold),
            out: other.out.or(self.out),
            chain: other.chain.or(self.chain),
            grid: other.grid.or(self.grid),
            objective: other.objective.or(self.objective),
        }
    }

    pub fn threshold(&self) -> Result<f64> {
        let t = self.threshold.unwrap_or(DEFAULT_THRESHOLD);
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Config(format!("threshold must lie in [0, 1], got {t}")));
        }
        Ok(t)
    }

    pub fn tau_max(&self) -> Result<f64> {
        let t = self
            .tau_max
            .ok_or_else(|| Error::Config("tau_max is required".into()))?;
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Config(format!("tau_max must be positive, got {t}")));
        }
        Ok(t)
    }

    pub fn step(&self) -> Result<TimeStep> {
        match self.dtau.unwrap_or(TimeStep::Auto) {
            TimeStep::Fixed(dt) if !(dt > 0.0) || !dt.is_finite() => {
                Err(Error::Config(format!("dtau must be positive, got {dt}")))
            }
            step => Ok(step),
        }
    }

    /// The chain described by `scheme` and its parameters.
    ///
    /// `webm` takes `δ` (required) and an optional end field `ω`; `elfm` takes
    /// `ω` (required) on a unit-spaced chain; `custom` reads `chain`.
    pub fn build_chain(&self) -> Result<ChainSpec> {
        let scheme = self
            .scheme
            .ok_or_else(|| Error::Config("scheme is required (webm, elfm or custom)".into()))?;
        let need_n = || self.n.ok_or_else(|| Error::Config("n is required".into()));
        match scheme {
            ChainScheme::Webm => {
                if self.chain.is_some() {
                    return Err(Error::Config("chain is only accepted with scheme custom".into()));
                }
                let n = need_n()?;
                let delta = self
                    .delta
                    .ok_or_else(|| Error::Config("delta is required for scheme webm".into()))?;
                let chain = ChainSpec::webm(n, delta)?;
                match self.omega {
                    Some(omega) if omega != 0.0 => {
                        check_finite("omega", omega)?;
                        let mut larmor = vec![0.0; n];
                        larmor[0] = omega;
                        larmor[n - 1] = omega;
                        chain.with_larmor(larmor)
                    }
                    _ => Ok(chain),
                }
            }
            ChainScheme::Elfm => {
                if self.chain.is_some() {
                    return Err(Error::Config("chain is only accepted with scheme custom".into()));
                }
                if let Some(delta) = self.delta {
                    if delta != 1.0 {
                        return Err(Error::Config(format!(
                            "scheme elfm has unit spacings; delta = {delta} needs scheme webm"
                        )));
                    }
                }
                let omega = self
                    .omega
                    .ok_or_else(|| Error::Config("omega is required for scheme elfm".into()))?;
                check_finite("omega", omega)?;
                ChainSpec::elfm(need_n()?, omega)
            }
            ChainScheme::Custom => {
                let chain = self
                    .chain
                    .clone()
                    .ok_or_else(|| Error::Config("scheme custom needs a chain object".into()))?;
                if self.delta.is_some() || self.omega.is_some() {
                    return Err(Error::Config("delta and omega do not apply to a custom chain".into()));
                }
                if let Some(n) = self.n {
                    if n != chain.n_nodes() {
                        return Err(Error::Config(format!(
                            "n = {n} disagrees with the custom chain's {} nodes",
                            chain.n_nodes()
                        )));
                    }
                }
                Ok(chain)
            }
        }
    }

    /// Full validation for a simulation run.
    pub fn experiment(&self) -> Result<Experiment> {
        Ok(Experiment {
            model: self.model.unwrap_or(Model::Xy),
            scheme: self.scheme.unwrap_or(ChainScheme::Webm),
            range: self.range.unwrap_or(Interaction::AllNode),
            chain: self.build_chain()?,
            tau_max: self.tau_max()?,
            step: self.step()?,
            threshold: self.threshold()?,
            out: self.out.clone(),
        })
    }

    /// Scheme whose parameter an optimization sweeps.
    pub fn search_scheme(&self) -> Result<Scheme> {
        match self.scheme {
            Some(ChainScheme::Webm) => Ok(Scheme::WebmDelta),
            Some(ChainScheme::Elfm) => Ok(Scheme::ElfmOmega),
            Some(ChainScheme::Custom) => Err(Error::Config("optimization needs scheme webm or elfm".into())),
            None => Err(Error::Config("scheme is required (webm or elfm)".into())),
        }
    }
}

fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be finite, got {x}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"model":"xy","colour":"red"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"model":"xyz"}"#).is_err());
    }

    #[test]
    fn parses_a_full_document() {
        let c = ExperimentConfig::from_json(
            r#"{"model":"xxz","scheme":"webm","range":"nn","n":10,"delta":8,
                "tau_max":50,"dtau":"auto","threshold":0.9,"out":"res"}"#,
        )
        .unwrap();
        let e = c.experiment().unwrap();
        assert_eq!(e.model, Model::Xxz);
        assert_eq!(e.range, Interaction::NearestNeighbor);
        assert_eq!(e.chain.n_nodes(), 10);
        assert_eq!(e.step, TimeStep::Auto);
        assert_eq!(e.threshold, 0.9);
        let fixed = ExperimentConfig::from_json(r#"{"dtau":0.01}"#).unwrap();
        assert_eq!(fixed.dtau, Some(TimeStep::Fixed(0.01)));
    }

    #[test]
    fn flags_override_file_values() {
        let file = ExperimentConfig {
            n: Some(10),
            omega: Some(1.0),
            ..Default::default()
        };
        let flags = ExperimentConfig {
            omega: Some(2.5),
            ..Default::default()
        };
        let merged = file.overridden_by(flags);
        assert_eq!(merged.n, Some(10));
        assert_eq!(merged.omega, Some(2.5));
    }

    #[test]
    fn validation_errors() {
        let base = ExperimentConfig {
            scheme: Some(ChainScheme::Elfm),
            n: Some(10),
            omega: Some(2.0),
            tau_max: Some(10.0),
            ..Default::default()
        };
        assert!(base.experiment().is_ok());
        let bad = |c: ExperimentConfig| assert!(c.experiment().is_err(), "{c:?}");
        bad(ExperimentConfig {
            tau_max: None,
            ..base.clone()
        });
        bad(ExperimentConfig {
            tau_max: Some(-1.0),
            ..base.clone()
        });
        bad(ExperimentConfig {
            threshold: Some(1.5),
            ..base.clone()
        });
        bad(ExperimentConfig {
            dtau: Some(TimeStep::Fixed(0.0)),
            ..base.clone()
        });
        bad(ExperimentConfig {
            delta: Some(8.0),
            ..base.clone()
        });
        bad(ExperimentConfig {
            omega: None,
            ..base.clone()
        });
        bad(ExperimentConfig {
            scheme: Some(ChainScheme::Custom),
            ..base.clone()
        });
    }

    #[test]
    fn custom_chain_round_trip() {
        let c = ExperimentConfig::from_json(
            r#"{"scheme":"custom","tau_max":5,
                "chain":{"n_nodes":3,"spacings":[1,2],"larmor":[0,0,0]}}"#,
        )
        .unwrap();
        assert_eq!(c.build_chain().unwrap().spacings(), &[1.0, 2.0]);
    }
}
