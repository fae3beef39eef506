use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncation and domain controls shared by every series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub max_terms: usize,
    /// Relative size of a term at which summation stops.
    pub tail_tol: f64,
    /// Smallest admissible Im(tau).
    pub im_min: f64,
    /// Minimal distance from the pole lattice for Weierstrass evaluations.
    pub pole_margin: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig { max_terms: 4096, tail_tol: 1e-17, im_min: 0.3, pole_margin: 0.02 }
    }
}

impl SeriesConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_terms < 8 {
            return Err(Error::InvalidInput(format!("max_terms = {} < 8", self.max_terms)));
        }
        if !(self.tail_tol > 0.0) {
            return Err(Error::InvalidInput("tail_tol must be positive".into()));
        }
        if !(self.im_min > 0.0) || !(self.pole_margin >= 0.0) {
            return Err(Error::InvalidInput("im_min must be positive and pole_margin non-negative".into()));
        }
        Ok(())
    }

    pub fn with_tail_tol(mut self, tail_tol: f64) -> Self {
        self.tail_tol = tail_tol;
        self
    }
}
