use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spectrum of chi_a^{-1} chi_a^T for the upper unitriangular chi_a with
/// every off-diagonal entry equal to a.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSpectrum {
    pub a: f64,
    /// Coefficients of t^3, t^2, t, 1 computed from the matrix.
    pub char_poly: [f64; 4],
    /// Same coefficients from (t - 1)(t^2 - (a^3 - 3a^2 + 2) t + 1).
    pub factored: [f64; 4],
    pub eigenvalues: [Complex64; 3],
    /// arg / 2 pi in [-1/2, 1/2].
    pub phases: [f64; 3],
}

pub fn chi_a_spectrum(a: f64) -> Result<ChiSpectrum> {
    if !(0.0..=2.0).contains(&a) {
        return Err(Error::InvalidInput(format!("a must lie in [0, 2], got {a}")));
    }
    // chi_a^{-1} is unitriangular with entries -a, -a, a^2 - a
    let inv = [[1.0, -a, a * a - a], [0.0, 1.0, -a], [0.0, 0.0, 1.0]];
    let chi_t = [[1.0, 0.0, 0.0], [a, 1.0, 0.0], [a, a, 1.0]];
    let mut m = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (0..3).map(|k| inv[i][k] * chi_t[k][j]).sum();
        }
    }
    let tr = m[0][0] + m[1][1] + m[2][2];
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0] + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let char_poly = [1.0, -tr, minors, -det];
    let b = a.powi(3) - 3.0 * a * a + 2.0;
    let factored = [1.0, -(b + 1.0), b + 1.0, -1.0];
    let half = (b / 2.0).clamp(-1.0, 1.0);
    let theta = half.acos();
    let eigenvalues = [Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, theta), Complex64::from_polar(1.0, -theta)];
    let phase = theta / std::f64::consts::TAU;
    Ok(ChiSpectrum { a, char_poly, factored, eigenvalues, phases: [0.0, phase, -phase] })
}

/// Sum of squared phases.
pub fn exponent_variance(phases: &[f64]) -> f64 {
    phases.iter().map(|p| p * p).sum()
}
