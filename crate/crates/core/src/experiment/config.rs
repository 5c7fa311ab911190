use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bddc::WeightingMode;
use crate::error::{Error, Result};
use crate::partition::Recipe;
use crate::problems::ChannelSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preconditioner {
    /// constraints on the objects of Θ itself
    #[serde(rename = "bddc")]
    Bddc,
    /// constraints on the objects of the refined partition Θ̂
    #[serde(rename = "bddc-so")]
    BddcSo,
}

impl fmt::Display for Preconditioner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preconditioner::Bddc => "bddc",
            Preconditioner::BddcSo => "bddc-so",
        })
    }
}

/// How Θ̂ is derived from Θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum SplitSpec {
    /// `s` blocks per axis inside every subdomain
    Uniform { s: usize },
    /// equal-coefficient connected components inside every subdomain
    Coefficient,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec::Uniform { s: 1 }
    }
}

impl fmt::Display for SplitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitSpec::Uniform { s } => write!(f, "s={s}"),
            SplitSpec::Coefficient => f.write_str("coefficient"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CoefficientSpec {
    Constant { value: f64 },
    Channels(ChannelSpec),
}

impl Default for CoefficientSpec {
    fn default() -> Self {
        CoefficientSpec::Constant { value: 1.0 }
    }
}

fn default_weighting() -> WeightingMode {
    WeightingMode::Cardinality
}

fn default_tol() -> f64 {
    1e-6
}

fn default_max_iters() -> usize {
    2000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// cells per axis; its length is the dimension
    pub cells: Vec<usize>,
    pub subdomains: Vec<usize>,
    #[serde(default)]
    pub split: SplitSpec,
    #[serde(default)]
    pub coefficient: CoefficientSpec,
    pub preconditioner: Preconditioner,
    pub recipe: Recipe,
    #[serde(default = "default_weighting")]
    pub weighting: WeightingMode,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// only count coarse DOFs (uniform splits); no assembly or solve
    #[serde(default)]
    pub count_only: bool,
}

impl ExperimentConfig {
    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    /// Arithmetic checks only; nothing is allocated.
    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        if dim != 2 && dim != 3 {
            return Err(Error::Config(format!("cells must list 2 or 3 counts, got {}", dim)));
        }
        if self.subdomains.len() != dim {
            return Err(Error::Config(format!(
                "subdomains must list {dim} counts, got {}",
                self.subdomains.len()
            )));
        }
        for d in 0..dim {
            let (c, n) = (self.cells[d], self.subdomains[d]);
            if c == 0 || n == 0 || c % n != 0 {
                return Err(Error::Config(format!("{n} subdomains do not divide {c} cells along axis {d}")));
            }
            if let SplitSpec::Uniform { s } = self.split {
                if s == 0 || (c / n) % s != 0 {
                    return Err(Error::Config(format!(
                        "split {s} does not divide the subdomain width {} along axis {d}",
                        c / n
                    )));
                }
            }
        }
        match (self.preconditioner, self.split) {
            (Preconditioner::Bddc, SplitSpec::Uniform { s: 1 }) => {}
            (Preconditioner::Bddc, other) => {
                return Err(Error::Config(format!("standard bddc takes no refined partition (split {other})")));
            }
            _ => {}
        }
        if self.split == SplitSpec::Coefficient && self.count_only {
            return Err(Error::Config("count_only needs a uniform split".into()));
        }
        match self.coefficient {
            CoefficientSpec::Constant { value } if !(value > 0.0) => {
                return Err(Error::Config(format!("coefficient value must be positive, got {value}")));
            }
            CoefficientSpec::Channels(ch) => {
                if ch.axis.index() >= dim {
                    return Err(Error::Config(format!("channel axis {:?} outside a {dim}D mesh", ch.axis)));
                }
                for d in (0..dim).filter(|&d| d != ch.axis.index()) {
                    let w = self.cells[d] / self.subdomains[d];
                    if ch.cross_section == 0 || ch.cross_section > w {
                        return Err(Error::Config(format!(
                            "channel cross-section {} does not fit subdomain width {w}",
                            ch.cross_section
                        )));
                    }
                }
            }
            _ => {}
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Config(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be positive".into()));
        }
        Ok(())
    }

    pub fn split_factor(&self) -> Option<usize> {
        match self.split {
            SplitSpec::Uniform { s } => Some(s),
            SplitSpec::Coefficient => None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    run: Vec<ExperimentConfig>,
}

/// Parses either a single run table or a file of `[[run]]` tables.
pub fn parse_config_file(text: &str) -> Result<Vec<ExperimentConfig>> {
    let value: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let configs = if value.contains_key("run") {
        let f: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        f.run
    } else {
        vec![toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?]
    };
    for c in &configs {
        c.validate()?;
    }
    Ok(configs)
}

pub fn load_config_file(path: &Path) -> Result<Vec<ExperimentConfig>> {
    let text = std::fs::read_to_string(path)?;
    parse_config_file(&text)
}
