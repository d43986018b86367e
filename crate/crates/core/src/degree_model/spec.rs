use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::DegreePmf;
use crate::error::{Error, Result};

const POWERLAW_KMAX: u32 = 100;

/// Textual description of a degree distribution.
///
/// JSON accepts either `{"family": "geometric", "params": {"p": 0.6667}}`
/// or `{"explicit": {"1": 0.5, "3": 0.5}}`. The compact command-line form
/// is `family:arg:arg`, e.g. `uniform:1:3`, `geometric:0.6667`,
/// `poisson:10`, `powerlaw:2:1:100`, `point:4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistributionSpec {
    Explicit {
        explicit: BTreeMap<String, f64>,
    },
    Family {
        family: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
}

impl DistributionSpec {
    pub fn family(name: &str, params: &[(&str, f64)]) -> Self {
        DistributionSpec::Family {
            family: name.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn to_pmf(&self) -> Result<DegreePmf> {
        match self {
            DistributionSpec::Explicit { explicit } => {
                let mut pairs = Vec::with_capacity(explicit.len());
                for (k, p) in explicit {
                    let k: u32 = k.trim().parse().map_err(|_| {
                        Error::InvalidDistribution(format!("degree {k:?} is not an integer"))
                    })?;
                    pairs.push((k, *p));
                }
                DegreePmf::from_pairs(pairs)
            }
            DistributionSpec::Family { family, params } => {
                let get = |name: &str| {
                    params.get(name).copied().ok_or_else(|| {
                        Error::InvalidDistribution(format!("{family} needs parameter {name:?}"))
                    })
                };
                let degree = |name: &str, default: Option<u32>| -> Result<u32> {
                    match params.get(name) {
                        Some(v) if *v >= 0.0 && v.fract() == 0.0 => Ok(*v as u32),
                        Some(v) => Err(Error::InvalidDistribution(format!(
                            "{family} parameter {name} must be a non-negative integer, got {v}"
                        ))),
                        None => default.ok_or_else(|| {
                            Error::InvalidDistribution(format!(
                                "{family} needs parameter {name:?}"
                            ))
                        }),
                    }
                };
                match family.as_str() {
                    "geometric" => DegreePmf::geometric(get("p")?),
                    "poisson" => DegreePmf::poisson(get("mean")?),
                    "uniform" => DegreePmf::uniform(degree("lo", None)?, degree("hi", None)?),
                    "powerlaw" | "power_law" => DegreePmf::power_law(
                        get("exponent")?,
                        degree("kmin", Some(1))?,
                        degree("kmax", Some(POWERLAW_KMAX))?,
                    ),
                    "point" => Ok(DegreePmf::point_mass(degree("k", None)?)),
                    other => Err(Error::InvalidDistribution(format!(
                        "unknown family {other:?}"
                    ))),
                }
            }
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s)
                .map_err(|e| Error::InvalidDistribution(format!("bad JSON distribution: {e}")));
        }
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default().to_ascii_lowercase();
        let args: Vec<f64> = parts
            .map(|t| {
                t.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidDistribution(format!("cannot parse {t:?} in {s:?}"))
                })
            })
            .collect::<Result<_>>()?;
        let keys: &[&str] = match name.as_str() {
            "geometric" => &["p"],
            "poisson" => &["mean"],
            "uniform" => &["lo", "hi"],
            "powerlaw" | "power_law" => &["exponent", "kmin", "kmax"],
            "point" => &["k"],
            _ => {
                return Err(Error::InvalidDistribution(format!(
                    "unknown distribution {s:?}"
                )))
            }
        };
        let required = if name.starts_with("power") { 1 } else { keys.len() };
        if args.len() < required || args.len() > keys.len() {
            return Err(Error::InvalidDistribution(format!(
                "{name} takes {} argument(s): {}",
                keys.len(),
                keys.join(":")
            )));
        }
        Ok(DistributionSpec::Family {
            family: name,
            params: keys.iter().map(|k| k.to_string()).zip(args).collect(),
        })
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let json = serde_json::to_string(self).map_err(|_| fmt::Error)?;
        f.write_str(&json)
    }
}
