use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

/// Environment variable naming the default configuration file.
pub const CONFIG_ENV: &str = "OPDECAY_CONFIG";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Structured,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance for radius equalities.
    pub equality: f64,
    /// Slack on one-sided radius bounds.
    pub one_sided: f64,
    /// Relative tolerance for canonical weight comparisons.
    pub canonical: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            equality: 0.05,
            one_sided: 0.1,
            canonical: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Series order `N`.
    pub order: usize,
    /// Circle sampling grid `G`.
    pub grid: usize,
    /// Regression window for radius estimates; `[N/2, N]` when absent.
    pub window: Option<[usize; 2]>,
    pub format: OutputFormat,
    pub tolerances: Tolerances,
    pub hp_bits: u32,
    /// Gauss nodes used to discretize line measures.
    pub line_nodes: usize,
    /// Truncation size for eigenvalue-based spectral measures.
    pub oracle_size: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            order: 64,
            grid: 4096,
            window: None,
            format: OutputFormat::Csv,
            tolerances: Tolerances::default(),
            hp_bits: opdecay::hp::DEFAULT_BITS,
            line_nodes: opdecay::measure::LINE_NODES,
            oracle_size: 400,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.order < 8 {
            bail!("order {} is below the minimum of 8", self.order);
        }
        if !self.grid.is_power_of_two() || self.grid < 4 * self.order {
            bail!(
                "grid {} must be a power of two at least 4 × order = {}",
                self.grid,
                4 * self.order
            );
        }
        if let Some([lo, hi]) = self.window {
            if lo > hi || hi > self.order {
                bail!("window [{lo}, {hi}] must satisfy lo <= hi <= order");
            }
        }
        if self.line_nodes < 16
            || self.oracle_size == 0
            || self.oracle_size > opdecay::oprl::EIGEN_CAP
        {
            bail!(
                "line_nodes must be at least 16 and oracle_size in 1..={}",
                opdecay::oprl::EIGEN_CAP
            );
        }
        Ok(())
    }

    pub fn from_toml(text: &str, origin: &Path) -> Result<Self> {
        let cfg: Self =
            toml::from_str(text).with_context(|| format!("parsing config {}", origin.display()))?;
        Ok(cfg)
    }

    /// Explicit path first, then the environment variable, then defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Self> {
        let path: Option<PathBuf> = match explicit {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(CONFIG_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from),
        };
        let cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(&p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                Self::from_toml(&text, &p)?
            }
            None => Self::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn window(&self) -> Option<(usize, usize)> {
        self.window.map(|[lo, hi]| (lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg = ExperimentConfig::from_toml(
            "order = 32\n[tolerances]\nequality = 0.01\n",
            Path::new("x"),
        )
        .unwrap();
        assert_eq!(cfg.order, 32);
        assert_eq!(cfg.grid, 4096);
        assert_eq!(cfg.tolerances.equality, 0.01);
        assert_eq!(cfg.tolerances.one_sided, 0.1);
    }

    #[test]
    fn rejects_bad_grid_and_order() {
        let mut cfg = ExperimentConfig {
            order: 4,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        cfg.order = 64;
        cfg.grid = 3000;
        assert!(cfg.validate().is_err());
        cfg.grid = 128;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn unknown_keys_are_errors() {
        let err = ExperimentConfig::from_toml("ordr = 3\n", Path::new("c.toml")).unwrap_err();
        assert!(format!("{err:#}").contains("ordr"));
    }
}
