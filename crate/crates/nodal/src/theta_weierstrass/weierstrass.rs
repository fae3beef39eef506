use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::theta::{lattice_distance, theta_derivatives, ThetaJets};
use crate::config::SeriesConfig;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::modular_forms::{series_derivative, HalfPlanePoint};
use crate::numeric::{binomial, cr, TWO_PI_I};

/// A point z on the torus C/(Z + Z tau).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    pub z: Complex64,
    pub tau: HalfPlanePoint,
}

impl TorusPoint {
    pub fn new(z: Complex64, tau: HalfPlanePoint) -> Self {
        TorusPoint { z, tau }
    }

    pub fn pole_distance(&self) -> f64 {
        lattice_distance(self.z, self.tau.tau())
    }

    pub(crate) fn check_margin(&self, cfg: &SeriesConfig) -> Result<()> {
        let d = self.pole_distance();
        if d <= cfg.pole_margin {
            return Err(Error::PoleTooClose { distance: d, margin: cfg.pole_margin });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeierstrassKind {
    P,
    PDz,
    Zeta,
}

/// Logarithmic x-derivatives (log f)^(k), k = 1..=n, from f^(k)/f.
pub(crate) fn log_derivatives(d: &[Complex64]) -> Vec<Complex64> {
    let n = d.len() - 1;
    let r: Vec<Complex64> = d.iter().map(|v| v / d[0]).collect();
    let mut l = vec![cr(0.0); n + 1];
    for k in 1..=n {
        let mut s = r[k];
        for j in 1..k {
            s -= r[j] * l[k - j] * binomial(k - 1, j);
        }
        l[k] = s;
    }
    l
}

/// Values of the normalized Weierstrass functions at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LocalValues {
    pub wp: Complex64,
    pub wp_dz: Complex64,
    pub wp_dzz: Complex64,
    pub zeta: Complex64,
}

/// Fixed modulus with E2 cached, for repeated evaluation in z.
#[derive(Debug, Clone, Copy)]
pub(crate) struct WeierstrassContext {
    pub tau: HalfPlanePoint,
    pub e2: Complex64,
}

impl WeierstrassContext {
    pub fn new(tau: HalfPlanePoint, cfg: &SeriesConfig) -> Result<Self> {
        tau.check(cfg)?;
        Ok(WeierstrassContext { tau, e2: series_derivative(2, 0, tau.tau(), cfg)? })
    }

    /// Evaluates without the pole-margin policy; callers own that decision.
    pub fn eval_unchecked(&self, z: Complex64, cfg: &SeriesConfig) -> Result<LocalValues> {
        let d = theta_derivatives(4, z, self.tau, cfg)?;
        let l = log_derivatives(&d);
        let k = (TWO_PI_I * TWO_PI_I).inv();
        Ok(LocalValues {
            wp: self.e2 / 12.0 - l[2] * k,
            wp_dz: -l[3] * k,
            wp_dzz: -l[4] * k,
            zeta: l[1] * k - self.e2 * z / 12.0,
        })
    }

    pub fn eval(&self, z: Complex64, cfg: &SeriesConfig) -> Result<LocalValues> {
        TorusPoint::new(z, self.tau).check_margin(cfg)?;
        self.eval_unchecked(z, cfg)
    }
}

/// Normalized Weierstrass p, its z-derivative, or zeta.
pub fn weierstrass(kind: WeierstrassKind, pt: TorusPoint, cfg: &SeriesConfig) -> Result<Complex64> {
    let ctx = WeierstrassContext::new(pt.tau, cfg)?;
    let v = ctx.eval(pt.z, cfg)?;
    Ok(match kind {
        WeierstrassKind::P => v.wp,
        WeierstrassKind::PDz => v.wp_dz,
        WeierstrassKind::Zeta => v.zeta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPeriodValues {
    pub e1: Complex64,
    pub e2: Complex64,
    pub e3: Complex64,
}

impl HalfPeriodValues {
    pub fn as_array(&self) -> [Complex64; 3] {
        [self.e1, self.e2, self.e3]
    }
}

/// p at 1/2, (1 + tau)/2 and tau/2.
pub fn half_periods(tau: HalfPlanePoint, cfg: &SeriesConfig) -> Result<HalfPeriodValues> {
    let ctx = WeierstrassContext::new(tau, cfg)?;
    let t = tau.tau();
    let pts = half_period_points(t);
    let e1 = ctx.eval_unchecked(pts[0], cfg)?.wp;
    let e2 = ctx.eval_unchecked(pts[1], cfg)?.wp;
    let e3 = ctx.eval_unchecked(pts[2], cfg)?.wp;
    Ok(HalfPeriodValues { e1, e2, e3 })
}

pub(crate) fn half_period_points(tau: Complex64) -> [Complex64; 3] {
    [cr(0.5), (tau + 1.0) / 2.0, tau / 2.0]
}

/// Direct symmetric lattice sum of the normalized p over |m|, |n| <= bound,
/// with the omitted z^2 and z^4 Laurent tails restored from the known
/// lattice sums G4 and G6.
pub fn lattice_sum_p(z: Complex64, tau: HalfPlanePoint, bound: i64, cfg: &SeriesConfig) -> Result<Complex64> {
    let t = tau.tau();
    let mut s = z.powi(-2);
    let (mut g4, mut g6) = (cr(0.0), cr(0.0));
    for m in -bound..=bound {
        for n in -bound..=bound {
            if m == 0 && n == 0 {
                continue;
            }
            let w = t * n as f64 + m as f64;
            s += (z - w).powi(-2) - w.powi(-2);
            g4 += w.powi(-4);
            g6 += w.powi(-6);
        }
    }
    let pi = std::f64::consts::PI;
    let g4_full = series_derivative(4, 0, t, cfg)? * (pi.powi(4) / 45.0);
    let g6_full = series_derivative(6, 0, t, cfg)? * (2.0 * pi.powi(6) / 945.0);
    s += (g4_full - g4) * z * z * 3.0 + (g6_full - g6) * z.powi(4) * 5.0;
    Ok(s / (TWO_PI_I * TWO_PI_I))
}

/// Jets in (dz, dt), t = 2 pi i tau, of
/// P = p - E2/12 and Z = -zeta - E2 z / 12 at a point.
#[derive(Debug, Clone)]
pub struct WeierstrassJets {
    pub p: Jet,
    pub z: Jet,
    pub e2: Jet,
    pub z0: Complex64,
    pub theta: Complex64,
}

impl WeierstrassJets {
    /// `order` is the total order of the P jet; Z carries one more.
    pub fn at(pt: TorusPoint, order: usize, cfg: &SeriesConfig) -> Result<Self> {
        pt.check_margin(cfg)?;
        let k = order + 2;
        let th = ThetaJets::at(pt.z, pt.tau, k, cfg)?;
        let n = &th.normalized;
        let r1 = n.dx().div(&n.truncate(k - 1));
        let z = r1.scale(-(TWO_PI_I * TWO_PI_I).inv());
        let p = z.dx();
        let mut de = Vec::with_capacity(order + 2);
        for j in 0..=order + 1 {
            de.push(series_derivative(2, j as u32, pt.tau.tau(), cfg)?);
        }
        let e2 = Jet::from_partials(order + 1, |i, j| if i == 0 { de[j] } else { cr(0.0) });
        Ok(WeierstrassJets { p, z, e2, z0: pt.z, theta: th.value })
    }

    pub fn wp(&self) -> Jet {
        &self.p + &self.e2.truncate(self.p.order()).scale(cr(1.0 / 12.0))
    }

    /// Normalized zeta as a jet.
    pub fn zeta(&self) -> Jet {
        let order = self.z.order();
        let zv = Jet::var_x(order, self.z0);
        let e2z = &self.e2.truncate(order) * &zv;
        &(-&self.z) - &e2z.scale(cr(1.0 / 12.0))
    }
}
