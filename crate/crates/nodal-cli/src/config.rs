use std::path::{Path, PathBuf};

use nodal::gamma_periods::{QuadConfig, DEFAULT_U_GRID};
use nodal::suite::SuiteConfig;
use nodal::SeriesConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Settings read from a TOML file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tail_tol: Option<f64>,
    pub quad_tol: Option<f64>,
    pub n_quad: Option<usize>,
    pub max_terms: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub u_grid: Option<Vec<f64>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }
}

/// Effective settings after applying flags over the file over defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: usize,
    pub series: SeriesConfig,
    pub quad: QuadConfig,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub u_grid: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            samples: 100,
            series: SeriesConfig::default(),
            quad: QuadConfig::default(),
            format: Format::Json,
            out: None,
            u_grid: DEFAULT_U_GRID.to_vec(),
        }
    }
}

impl RunConfig {
    pub fn resolve(file: FileConfig, flags: FileConfig) -> Result<Self, String> {
        let d = RunConfig::default();
        let mut series = d.series;
        let mut quad = d.quad;
        if let Some(v) = flags.tail_tol.or(file.tail_tol) {
            series.tail_tol = v;
        }
        if let Some(v) = flags.max_terms.or(file.max_terms) {
            series.max_terms = v;
        }
        if let Some(v) = flags.quad_tol.or(file.quad_tol) {
            quad.quad_tol = v;
        }
        if let Some(v) = flags.n_quad.or(file.n_quad) {
            quad.n_quad = v;
        }
        let cfg = RunConfig {
            seed: flags.seed.or(file.seed).unwrap_or(d.seed),
            samples: flags.samples.or(file.samples).unwrap_or(d.samples),
            series,
            quad,
            format: flags.format.or(file.format).unwrap_or(d.format),
            out: flags.out.or(file.out),
            u_grid: flags.u_grid.or(file.u_grid).unwrap_or(d.u_grid),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        self.series.validate().map_err(|e| e.to_string())?;
        self.quad.validate().map_err(|e| e.to_string())?;
        if self.samples == 0 {
            return Err("samples must be positive".into());
        }
        if self.u_grid.len() < 3 || self.u_grid.iter().any(|u| !(*u > 0.0)) {
            return Err("u-grid needs at least 3 positive values".into());
        }
        Ok(())
    }

    pub fn suite(&self) -> SuiteConfig {
        SuiteConfig {
            seed: self.seed,
            samples: self.samples,
            series: self.series,
            quad: self.quad,
            u_grid: self.u_grid.clone(),
        }
    }
}
