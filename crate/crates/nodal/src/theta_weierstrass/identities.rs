use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::theta::{theta11_product, theta11_raw_series, theta_derivatives};
use super::weierstrass::{LocalValues, WeierstrassContext};
use crate::config::SeriesConfig;
use crate::error::{Error, Result};
use crate::modular_forms::{dedekind_eta, e_of, eisenstein_tau_derivative, normalized_tau_fd, series_derivative, HalfPlanePoint};
use crate::numeric::{cr, scaled_diff, TWO_PI_I};

pub const IDENTITY_NAMES: &[&str] = &[
    "cubic_a",
    "cubic_b",
    "cubic_tilde_a",
    "cubic_tilde_b",
    "zeta_period_1",
    "zeta_period_tau",
    "ring_e2",
    "ring_e4",
    "ring_e6",
    "e2_third_derivative",
    "key_identity_1",
    "key_identity_1_tilde",
    "key_identity_2",
    "key_identity_2_tilde",
    "theta_quasi_periodicity",
    "theta_heat",
    "theta_e2",
    "triple_product",
    "theta_prime_eta",
];

/// Sample point for an identity: z (or x), tau, and a lattice shift (m, n)
/// used by the quasi-periodicity check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentitySample {
    pub z: Complex64,
    pub tau: Complex64,
    pub m: i64,
    pub n: i64,
}

impl IdentitySample {
    pub fn new(z: Complex64, tau: Complex64) -> Self {
        IdentitySample { z, tau, m: 1, n: 1 }
    }
}

const FD_STEP: f64 = 1e-5;

fn values(z: Complex64, tau: Complex64, cfg: &SeriesConfig) -> Result<(LocalValues, Complex64)> {
    let ctx = WeierstrassContext::new(HalfPlanePoint::new(tau)?, cfg)?;
    Ok((ctx.eval(z, cfg)?, ctx.e2))
}

/// Scaled residual |LHS - RHS| / max(1, |LHS|, |RHS|) of a named identity;
/// both sides come from separate evaluation routes.
pub fn identity_residual(name: &str, s: IdentitySample, cfg: &SeriesConfig) -> Result<f64> {
    let tau_pt = HalfPlanePoint::new(s.tau)?;
    tau_pt.check(cfg)?;
    let k = (TWO_PI_I * TWO_PI_I).inv();
    let e = |w: u32, o: u32| series_derivative(w, o, s.tau, cfg);
    let (z, tau) = (s.z, s.tau);
    let res = match name {
        "cubic_a" => {
            let (v, _) = values(z, tau, cfg)?;
            let lhs = v.wp_dz * v.wp_dz * k;
            let rhs = v.wp.powi(3) * 4.0 - e(4, 0)? * v.wp / 12.0 + e(6, 0)? / 216.0;
            scaled_diff(lhs, rhs)
        }
        "cubic_b" => {
            let (v, _) = values(z, tau, cfg)?;
            scaled_diff(v.wp_dzz * k, v.wp * v.wp * 6.0 - e(4, 0)? / 24.0)
        }
        "cubic_tilde_a" => {
            let (v, e2) = values(z, tau, cfg)?;
            let p = v.wp - e2 / 12.0;
            let rhs = p.powi(3) * 4.0 + e2 * p * p + e(2, 1)? * p + e(2, 2)? / 6.0;
            scaled_diff(v.wp_dz * v.wp_dz * k, rhs)
        }
        "cubic_tilde_b" => {
            let (v, e2) = values(z, tau, cfg)?;
            let p = v.wp - e2 / 12.0;
            scaled_diff(v.wp_dzz * k, p * p * 6.0 + e2 * p + e(2, 1)? / 2.0)
        }
        "zeta_period_1" | "zeta_period_tau" => {
            let shift = if name == "zeta_period_1" { cr(1.0) } else { tau };
            let (a, e2) = values(z, tau, cfg)?;
            let (b, _) = values(z + shift, tau, cfg)?;
            let want = if name == "zeta_period_1" { -e2 / 12.0 } else { -e2 * tau / 12.0 - TWO_PI_I.inv() };
            scaled_diff(b.zeta - a.zeta, want)
        }
        "ring_e2" | "ring_e4" | "ring_e6" | "e2_third_derivative" => {
            let (w, orders): (u32, &[u32]) = match name {
                "ring_e2" => (2, &[1, 2]),
                "ring_e4" => (4, &[1, 2]),
                "ring_e6" => (6, &[1, 2]),
                _ => (2, &[3]),
            };
            let mut worst: f64 = 0.0;
            for &o in orders {
                worst = worst.max(eisenstein_tau_derivative(w, o, tau_pt, cfg)?.residual());
            }
            if name == "e2_third_derivative" {
                let (e2, d1, d2, d3) = (e(2, 0)?, e(2, 1)?, e(2, 2)?, e(2, 3)?);
                worst = worst.max(scaled_diff(d3, e2 * d2 - d1 * d1 * 1.5));
            }
            worst
        }
        "key_identity_1" | "key_identity_1_tilde" | "key_identity_2" | "key_identity_2_tilde" => {
            key_identity(name, z, tau, cfg)?
        }
        "theta_quasi_periodicity" => {
            let (m, n) = (s.m as f64, s.n as f64);
            let lhs = theta11_raw_series(0, z + m + tau * n, tau, cfg)?[0];
            let base = theta11_raw_series(0, z, tau, cfg)?[0];
            let sign = if (s.m + s.n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let rhs = e_of(-tau * (n * n / 2.0) - z * n) * base * sign;
            (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE)
        }
        "theta_heat" => {
            let lhs = normalized_tau_fd(|t| Ok(theta_derivatives(0, z, HalfPlanePoint::new(t)?, cfg)?[0]), tau, FD_STEP)?;
            let d2 = theta_derivatives(2, z, tau_pt, cfg)?[2];
            scaled_diff(lhs, d2 * k / 2.0)
        }
        "theta_e2" => {
            let d = theta_derivatives(3, cr(0.0), tau_pt, cfg)?;
            scaled_diff(d[3] / d[1] * k * 4.0, e(2, 0)?)
        }
        "triple_product" => {
            let series = theta_derivatives(0, z, tau_pt, cfg)?[0];
            scaled_diff(series, theta11_product(z, tau_pt, cfg)?)
        }
        "theta_prime_eta" => {
            let d1 = theta_derivatives(1, cr(0.0), tau_pt, cfg)?[1];
            let eta = dedekind_eta(tau_pt, cfg)?;
            scaled_diff(d1, eta.powi(3) * (-2.0 * std::f64::consts::PI))
        }
        _ => return Err(Error::UnknownIdentity(name.to_string())),
    };
    Ok(res)
}

/// tau-derivatives on the left come from finite differences at fixed z;
/// right-hand sides use only p, p', zeta and Eisenstein values.
fn key_identity(name: &str, z: Complex64, tau: Complex64, cfg: &SeriesConfig) -> Result<f64> {
    let k = (TWO_PI_I * TWO_PI_I).inv();
    let (v, e2) = values(z, tau, cfg)?;
    let e4 = series_derivative(4, 0, tau, cfg)?;
    let de2 = series_derivative(2, 1, tau, cfg)?;
    let p = v.wp - e2 / 12.0;
    let zz = -v.zeta - e2 * z / 12.0;
    let fd = |f: &dyn Fn(LocalValues, Complex64) -> Complex64| {
        normalized_tau_fd(
            |t| {
                let (w, e2t) = values(z, t, cfg)?;
                Ok(f(w, e2t))
            },
            tau,
            FD_STEP,
        )
    };
    let (lhs, rhs) = match name {
        "key_identity_1" => (
            fd(&|w, _| w.zeta)?,
            -v.wp_dz * k / 2.0 + e2 * v.zeta / 12.0 + e4 * z / 144.0 + zz * v.wp,
        ),
        "key_identity_1_tilde" => (fd(&|w, e| -w.zeta - e * z / 12.0)?, -zz * p + v.wp_dz * k / 2.0),
        "key_identity_2" => (
            fd(&|w, _| w.wp)?,
            v.wp * v.wp * 2.0 + e2 * v.wp / 6.0 - e4 / 36.0 - zz * v.wp_dz,
        ),
        _ => (fd(&|w, e| w.wp - e / 12.0)?, p * p * 2.0 + e2 * p / 2.0 + de2 / 4.0 - zz * v.wp_dz),
    };
    Ok(scaled_diff(lhs, rhs))
}
