//! Eisenstein series, their normalized tau-derivatives and the Dedekind eta
//! function as truncated q-series.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::SeriesConfig;
use crate::error::{Error, Result};
use crate::numeric::{cr, TWO_PI_I};

/// A modulus in the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlanePoint {
    tau: Complex64,
}

impl HalfPlanePoint {
    pub fn new(tau: Complex64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() {
            return Err(Error::InvalidInput(format!("Im(tau) must be positive, got {tau}")));
        }
        Ok(HalfPlanePoint { tau })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn nome(&self) -> Complex64 {
        e_of(self.tau)
    }

    pub(crate) fn check(&self, cfg: &SeriesConfig) -> Result<()> {
        if self.tau.im < cfg.im_min {
            return Err(Error::BelowImMin { im: self.tau.im, min: cfg.im_min });
        }
        Ok(())
    }
}

/// exp(2 pi i x), with the real part of x reduced mod 1 first.
pub fn e_of(x: Complex64) -> Complex64 {
    let frac = x.re - x.re.round();
    let r = (-2.0 * std::f64::consts::PI * x.im).exp();
    Complex64::from_polar(r, 2.0 * std::f64::consts::PI * frac)
}

/// Sum of k-th powers of the divisors of n, exactly.
pub fn divisor_sigma(k: u32, n: u64) -> Result<u128> {
    if !matches!(k, 1 | 3 | 5) {
        return Err(Error::InvalidInput(format!("divisor power {k} not in {{1,3,5}}")));
    }
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let pow = |d: u64| (d as u128).checked_pow(k).ok_or(Error::Overflow("divisor_sigma"));
    let mut total: u128 = 0;
    let mut d: u64 = 1;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            total = total.checked_add(pow(d)?).ok_or(Error::Overflow("divisor_sigma"))?;
            let e = n / d;
            if e != d {
                total = total.checked_add(pow(e)?).ok_or(Error::Overflow("divisor_sigma"))?;
            }
        }
        d += 1;
    }
    Ok(total)
}

fn weight_data(weight: u32) -> Result<(u32, f64)> {
    match weight {
        2 => Ok((1, -24.0)),
        4 => Ok((3, 240.0)),
        6 => Ok((5, -504.0)),
        _ => Err(Error::InvalidInput(format!("weight {weight} not in {{2,4,6}}"))),
    }
}

/// Adds terms until two consecutive ones fall below `tail_tol` times the
/// running sum.
pub(crate) fn sum_until_small<F>(cfg: &SeriesConfig, what: &'static str, start: Complex64, mut term: F) -> Result<Complex64>
where
    F: FnMut(u64) -> Result<Complex64>,
{
    let mut sum = start;
    let mut quiet = 0;
    for n in 1..=cfg.max_terms as u64 {
        let t = term(n)?;
        sum += t;
        if t.norm() < cfg.tail_tol * sum.norm() {
            quiet += 1;
            if quiet == 2 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence { what, terms: cfg.max_terms })
}

/// D^order E_w by termwise differentiation of the q-series, D = (1/2 pi i) d/dtau.
pub(crate) fn series_derivative(weight: u32, order: u32, tau: Complex64, cfg: &SeriesConfig) -> Result<Complex64> {
    let (k, coeff) = weight_data(weight)?;
    let q = e_of(tau);
    let mut qn = Complex64::new(1.0, 0.0);
    let start = if order == 0 { cr(1.0) } else { cr(0.0) };
    sum_until_small(cfg, "eisenstein", start, |n| {
        qn *= q;
        let s = divisor_sigma(k, n)? as f64;
        Ok(qn * (coeff * s * (n as f64).powi(order as i32)))
    })
}

pub fn eisenstein(weight: u32, tau: HalfPlanePoint, cfg: &SeriesConfig) -> Result<Complex64> {
    tau.check(cfg)?;
    series_derivative(weight, 0, tau.tau, cfg)
}

/// A normalized tau-derivative computed from the differentiated series and,
/// independently, from the Ramanujan derivative ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauDerivative {
    pub series: Complex64,
    pub ring: Complex64,
}

impl TauDerivative {
    pub fn value(&self) -> Complex64 {
        self.series
    }

    pub fn residual(&self) -> f64 {
        (self.series - self.ring).norm() / 1f64.max(self.series.norm())
    }
}

pub fn eisenstein_tau_derivative(weight: u32, order: u32, tau: HalfPlanePoint, cfg: &SeriesConfig) -> Result<TauDerivative> {
    tau.check(cfg)?;
    let max = match weight {
        2 => 3,
        4 | 6 => 2,
        _ => return Err(Error::InvalidInput(format!("weight {weight} not in {{2,4,6}}"))),
    };
    if order == 0 || order > max {
        return Err(Error::UnsupportedOrder { weight, order });
    }
    let series = series_derivative(weight, order, tau.tau, cfg)?;
    let base = RingBase::at(tau.tau, cfg)?;
    let ring = base.derivative(weight, order);
    Ok(TauDerivative { series, ring })
}

/// E2, E4, E6 and their derivatives obtained from the Ramanujan ring.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RingBase {
    e2: Complex64,
    e4: Complex64,
    e6: Complex64,
}

impl RingBase {
    pub(crate) fn at(tau: Complex64, cfg: &SeriesConfig) -> Result<Self> {
        Ok(RingBase {
            e2: series_derivative(2, 0, tau, cfg)?,
            e4: series_derivative(4, 0, tau, cfg)?,
            e6: series_derivative(6, 0, tau, cfg)?,
        })
    }

    pub(crate) fn derivative(&self, weight: u32, order: u32) -> Complex64 {
        let (e2, e4, e6) = (self.e2, self.e4, self.e6);
        let de2 = (e2 * e2 - e4) / 12.0;
        let de4 = (e2 * e4 - e6) / 3.0;
        let de6 = (e2 * e6 - e4 * e4) / 2.0;
        let d2e2 = (e2 * de2 * 2.0 - de4) / 12.0;
        let d2e4 = (de2 * e4 + e2 * de4 - de6) / 3.0;
        let d2e6 = (de2 * e6 + e2 * de6 - e4 * de4 * 2.0) / 2.0;
        let d3e2 = (de2 * de2 * 2.0 + e2 * d2e2 * 2.0 - d2e4) / 12.0;
        match (weight, order) {
            (2, 0) => e2,
            (2, 1) => de2,
            (2, 2) => d2e2,
            (2, 3) => d3e2,
            (4, 0) => e4,
            (4, 1) => de4,
            (4, 2) => d2e4,
            (6, 0) => e6,
            (6, 1) => de6,
            (6, 2) => d2e6,
            _ => unreachable!("order checked by caller"),
        }
    }
}

/// Quasi-modular data at one modulus: E2 with three normalized
/// derivatives, E4 and E6, all from the q-series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModularValues {
    pub e2: Complex64,
    pub de2: Complex64,
    pub d2e2: Complex64,
    pub d3e2: Complex64,
    pub e4: Complex64,
    pub e6: Complex64,
}

impl ModularValues {
    pub fn at(tau: HalfPlanePoint, cfg: &SeriesConfig) -> Result<Self> {
        tau.check(cfg)?;
        let t = tau.tau;
        Ok(ModularValues {
            e2: series_derivative(2, 0, t, cfg)?,
            de2: series_derivative(2, 1, t, cfg)?,
            d2e2: series_derivative(2, 2, t, cfg)?,
            d3e2: series_derivative(2, 3, t, cfg)?,
            e4: series_derivative(4, 0, t, cfg)?,
            e6: series_derivative(6, 0, t, cfg)?,
        })
    }

    /// D^k E2 for k = 0..=3.
    pub fn e2_derivative(&self, k: usize) -> Complex64 {
        [self.e2, self.de2, self.d2e2, self.d3e2][k]
    }
}

/// e[tau/24] * prod (1 - q^n).
pub fn dedekind_eta(tau: HalfPlanePoint, cfg: &SeriesConfig) -> Result<Complex64> {
    tau.check(cfg)?;
    let q = tau.nome();
    let mut qn = cr(1.0);
    let mut prod = cr(1.0);
    let mut quiet = 0;
    for _ in 0..cfg.max_terms {
        qn *= q;
        prod *= cr(1.0) - qn;
        if qn.norm() < cfg.tail_tol * prod.norm() {
            quiet += 1;
            if quiet == 2 {
                return Ok(e_of(tau.tau / 24.0) * prod);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence { what: "dedekind_eta", terms: cfg.max_terms })
}

/// (1/2 pi i) d/dtau applied through a five-point stencil in tau.
pub(crate) fn normalized_tau_fd<F>(f: F, tau: Complex64, h: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    Ok(crate::numeric::diff5(f, tau, cr(h))? / TWO_PI_I)
}
