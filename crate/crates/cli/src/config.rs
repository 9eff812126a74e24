//! Strict JSON scenario configuration.
//!
//! One document per run. Unknown keys are rejected everywhere; every
//! physical parameter is validated with a message naming the offending
//! field.

use crate::CliError;
use contact_dynamics::{
    ContactPotential, PowerLawPotential, ReferenceConstants, TabulatedPotential,
    VolumetricEllipsoidPotential,
};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer};
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub potential: PotentialConfig,
    pub m: f64,
    pub v0: SpeedList,
    pub refs: RefsConfig,
    #[serde(default)]
    pub damping: Option<DampingConfig>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Compact echo of the source document, for output-file headers.
    #[serde(skip)]
    pub echo: String,
}

#[derive(Debug, Clone)]
pub enum PotentialConfig {
    PowerLaw {
        k: f64,
        p: f64,
    },
    Ellipsoid {
        a: f64,
        b: f64,
        c: f64,
        k_n: f64,
        alpha: f64,
    },
    Tabulated {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefsConfig {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "M")]
    pub m: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DampingConfig {
    #[serde(rename = "C0")]
    pub c0: f64,
    #[serde(default)]
    pub law: DampingLawConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DampingLawConfig {
    #[default]
    Universal,
    ConstantPhysical,
}

#[derive(Debug, Clone)]
pub struct SpeedList(pub Vec<f64>);

impl<'de> Deserialize<'de> for SpeedList {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum OneOrMany {
            One(f64),
            Many(Vec<f64>),
        }
        match OneOrMany::deserialize(deserializer)? {
            OneOrMany::One(v) => Ok(SpeedList(vec![v])),
            OneOrMany::Many(v) => Ok(SpeedList(v)),
        }
    }
}

// The potential union is tagged by a "type" key; parsing it manually keeps
// unknown-key rejection working per variant.
impl<'de> Deserialize<'de> for PotentialConfig {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let mut map = serde_json::Map::deserialize(deserializer)?;
        let tag = map
            .remove("type")
            .ok_or_else(|| D::Error::custom("potential needs a \"type\" field"))?;
        let tag = tag
            .as_str()
            .ok_or_else(|| D::Error::custom("potential \"type\" must be a string"))?
            .to_owned();
        let rest = serde_json::Value::Object(map);
        match tag.as_str() {
            "power_law" => {
                #[derive(Deserialize)]
                #[serde(deny_unknown_fields)]
                struct Fields {
                    k: f64,
                    p: f64,
                }
                let f: Fields = serde_json::from_value(rest).map_err(D::Error::custom)?;
                Ok(PotentialConfig::PowerLaw { k: f.k, p: f.p })
            }
            "ellipsoid" => {
                #[derive(Deserialize)]
                #[serde(deny_unknown_fields)]
                struct Fields {
                    a: f64,
                    b: f64,
                    c: f64,
                    #[serde(rename = "K_n")]
                    k_n: f64,
                    alpha: f64,
                }
                let f: Fields = serde_json::from_value(rest).map_err(D::Error::custom)?;
                Ok(PotentialConfig::Ellipsoid {
                    a: f.a,
                    b: f.b,
                    c: f.c,
                    k_n: f.k_n,
                    alpha: f.alpha,
                })
            }
            "tabulated" => {
                #[derive(Deserialize)]
                #[serde(deny_unknown_fields)]
                struct Fields {
                    path: PathBuf,
                }
                let f: Fields = serde_json::from_value(rest).map_err(D::Error::custom)?;
                Ok(PotentialConfig::Tabulated { path: f.path })
            }
            other => Err(D::Error::custom(format!(
                "unknown potential type '{other}' (expected power_law, ellipsoid or tabulated)"
            ))),
        }
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let mut config: ScenarioConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("invalid config {}: {e}", path.display())))?;
        // compact, key-sorted round trip: deterministic header echo
        config.echo = serde_json::from_str::<serde_json::Value>(&text)
            .map(|v| v.to_string())
            .unwrap_or_default();
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: f64| -> Result<(), CliError> {
            if !(v > 0.0) || !v.is_finite() {
                Err(CliError::config(format!(
                    "config field '{name}' must be positive and finite, got {v}"
                )))
            } else {
                Ok(())
            }
        };
        positive("m", self.m)?;
        if self.v0.0.is_empty() {
            return Err(CliError::config(
                "config field 'v0' must not be empty".into(),
            ));
        }
        for (i, v) in self.v0.0.iter().enumerate() {
            positive(&format!("v0[{i}]"), *v)?;
        }
        positive("refs.K", self.refs.k)?;
        positive("refs.M", self.refs.m)?;
        if let Some(d) = &self.damping {
            if !(d.c0 >= 0.0) || !d.c0.is_finite() {
                return Err(CliError::config(format!(
                    "config field 'damping.C0' must be non-negative and finite, got {}",
                    d.c0
                )));
            }
        }
        match &self.potential {
            PotentialConfig::PowerLaw { k, p } => {
                positive("potential.k", *k)?;
                positive("potential.p", *p)?;
            }
            PotentialConfig::Ellipsoid {
                a,
                b,
                c,
                k_n,
                alpha,
            } => {
                positive("potential.a", *a)?;
                positive("potential.b", *b)?;
                positive("potential.c", *c)?;
                positive("potential.K_n", *k_n)?;
                positive("potential.alpha", *alpha)?;
            }
            PotentialConfig::Tabulated { .. } => {}
        }
        Ok(())
    }

    /// Builds the potential, reading the table for tabulated configs.
    /// Relative table paths resolve against the config file's directory.
    pub fn build_potential(
        &self,
        config_dir: &Path,
    ) -> Result<Arc<dyn ContactPotential>, CliError> {
        Ok(match &self.potential {
            PotentialConfig::PowerLaw { k, p } => Arc::new(PowerLawPotential::new(*k, *p)?),
            PotentialConfig::Ellipsoid {
                a,
                b,
                c,
                k_n,
                alpha,
            } => Arc::new(VolumetricEllipsoidPotential::new(*a, *b, *c, *k_n, *alpha)?),
            PotentialConfig::Tabulated { path } => {
                let resolved = if path.is_relative() {
                    config_dir.join(path)
                } else {
                    path.clone()
                };
                Arc::new(TabulatedPotential::from_csv_path(&resolved)?)
            }
        })
    }

    pub fn reference_constants(&self) -> Result<ReferenceConstants, CliError> {
        Ok(ReferenceConstants::new(self.refs.k, self.refs.m)?)
    }
}
