use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::format::OutputFormat;
use crate::clustering::{EpsGrid, Linkage, SelectionConfig};
use crate::error::{Error, Result};
use crate::features::DEFAULT_BINS;

/// Every tunable of a pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub bins: usize,
    pub linkage: Linkage,
    pub k_min: usize,
    pub k_max: usize,
    pub eps_grid: EpsGrid,
    pub min_pts: Vec<usize>,
    /// Seeds the random baselines.
    pub seed: u64,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    /// Degree threshold of the power-law fit.
    pub kmin: usize,
    /// Abort on the first per-network failure instead of skipping it.
    pub fail_fast: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let selection = SelectionConfig::default();
        RunConfig {
            bins: DEFAULT_BINS,
            linkage: selection.linkage,
            k_min: selection.k_min,
            k_max: selection.k_max,
            eps_grid: selection.eps_grid,
            min_pts: selection.min_pts,
            seed: 0,
            out_dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
            kmin: 1,
            fail_fast: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bins < 2 {
            return Err(Error::Config(format!(
                "bins = {} must be at least 2",
                self.bins
            )));
        }
        if self.k_min < 2 || self.k_min > self.k_max {
            return Err(Error::Config(format!(
                "k range {}..={} is invalid",
                self.k_min, self.k_max
            )));
        }
        if self.min_pts.is_empty() || self.min_pts.contains(&0) {
            return Err(Error::Config(
                "min_pts must be a non-empty list of positive counts".into(),
            ));
        }
        if let EpsGrid::List(eps) = &self.eps_grid {
            if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
                return Err(Error::Config(
                    "eps list must be non-empty and positive".into(),
                ));
            }
        }
        if self.kmin == 0 {
            return Err(Error::Config("kmin must be at least 1".into()));
        }
        Ok(())
    }

    pub fn selection(&self) -> SelectionConfig {
        SelectionConfig {
            k_min: self.k_min,
            k_max: self.k_max,
            linkage: self.linkage,
            eps_grid: self.eps_grid.clone(),
            min_pts: self.min_pts.clone(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }
}

/// Parses `deciles` or a comma-separated list of radii.
pub fn parse_eps_grid(text: &str) -> Result<EpsGrid> {
    if text == "deciles" {
        return Ok(EpsGrid::Deciles);
    }
    parse_list(text).map(EpsGrid::List)
}

/// Parses a comma-separated list.
pub fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Param(format!("cannot parse {s:?} in list {text:?}")))
        })
        .collect()
}
