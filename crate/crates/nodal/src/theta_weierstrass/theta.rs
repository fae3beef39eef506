use num_complex::Complex64;

use crate::config::SeriesConfig;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::modular_forms::{e_of, HalfPlanePoint};
use crate::numeric::{binomial, cr, TWO_PI_I};

/// x = x0 + m + n tau with x0 in the parallelogram centred at 0.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Reduced {
    pub x0: Complex64,
    pub m: i64,
    pub n: i64,
}

pub(crate) fn reduce(x: Complex64, tau: Complex64) -> Reduced {
    let n = (x.im / tau.im).round();
    let x1 = x - tau * n;
    let m = x1.re.round();
    Reduced { x0: x1 - m, m: m as i64, n: n as i64 }
}

/// Distance from x to the nearest point of Z + Z tau.
pub(crate) fn lattice_distance(x: Complex64, tau: Complex64) -> f64 {
    let x0 = reduce(x, tau).x0;
    let mut d = f64::INFINITY;
    for a in -1..=1 {
        for b in -1..=1 {
            d = d.min((x0 - tau * b as f64 - a as f64).norm());
        }
    }
    d
}

/// Termwise x-derivatives of orders 0..=max_order of the defining series,
/// summed at x as given (no argument reduction).
pub fn theta11_raw_series(max_order: usize, x: Complex64, tau: Complex64, cfg: &SeriesConfig) -> Result<Vec<Complex64>> {
    let mut sums = vec![cr(0.0); max_order + 1];
    let mut scale = vec![0.0f64; max_order + 1];
    let mut quiet = 0;
    for k in 0..cfg.max_terms as i64 {
        let mut pair = vec![cr(0.0); max_order + 1];
        for n in [k, -k - 1] {
            let a = n as f64 + 0.5;
            let base = e_of(tau * (a * a / 2.0) + (x + 0.5) * a);
            let w = TWO_PI_I * a;
            let mut p = cr(1.0);
            for slot in pair.iter_mut() {
                *slot += base * p;
                p *= w;
            }
        }
        let mut small = true;
        for o in 0..=max_order {
            sums[o] += pair[o];
            scale[o] += pair[o].norm();
            if pair[o].norm() > cfg.tail_tol * scale[o] {
                small = false;
            }
        }
        if small && k > 0 {
            quiet += 1;
            if quiet == 2 {
                return Ok(sums);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence { what: "theta11", terms: cfg.max_terms })
}

/// Derivatives of orders 0..=max_order at x, computed at the reduced argument
/// and carried back through the quasi-periodicity cocycle.
pub fn theta_derivatives(max_order: usize, x: Complex64, tau: HalfPlanePoint, cfg: &SeriesConfig) -> Result<Vec<Complex64>> {
    tau.check(cfg)?;
    let t = tau.tau();
    let r = reduce(x, t);
    let raw = theta11_raw_series(max_order, r.x0, t, cfg)?;
    let sign = if (r.m + r.n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let n = r.n as f64;
    let cocycle = e_of(-t * (n * n / 2.0) - r.x0 * n) * sign;
    let shift = -TWO_PI_I * n;
    Ok((0..=max_order)
        .map(|k| {
            let mut s = cr(0.0);
            let mut p = cr(1.0);
            for j in (0..=k).rev() {
                s += raw[j] * p * binomial(k, j);
                p *= shift;
            }
            s * cocycle
        })
        .collect())
}

/// d^order/dx^order of theta_11(x; tau), order 0..=3.
pub fn theta11_d(order: u32, x: Complex64, tau: HalfPlanePoint, cfg: &SeriesConfig) -> Result<Complex64> {
    if order > 3 {
        return Err(Error::UnsupportedOrder { weight: 0, order });
    }
    Ok(theta_derivatives(order as usize, x, tau, cfg)?[order as usize])
}

/// Jacobi triple product form of theta_11.
pub fn theta11_product(x: Complex64, tau: HalfPlanePoint, cfg: &SeriesConfig) -> Result<Complex64> {
    tau.check(cfg)?;
    let t = tau.tau();
    let q = e_of(t);
    let (w, wi) = (e_of(x), e_of(-x));
    let mut prod = Complex64::new(0.0, 1.0) * e_of(t / 8.0) * (e_of(x / 2.0) - e_of(-x / 2.0));
    let mut qn = cr(1.0);
    let mut quiet = 0;
    for _ in 0..cfg.max_terms {
        qn *= q;
        let f = (cr(1.0) - qn) * (cr(1.0) - qn * w) * (cr(1.0) - qn * wi);
        prod *= f;
        if (f - 1.0).norm() < cfg.tail_tol {
            quiet += 1;
            if quiet == 2 {
                return Ok(prod);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence { what: "theta11_product", terms: cfg.max_terms })
}

/// Log-derivative data of theta_11 at a point off the lattice, packaged as
/// jets in (dx, dt) with t = 2 pi i tau, so that d/dt is the normalized
/// tau-derivative D. The tau-direction comes from the heat equation
/// D theta = theta'' / (2 (2 pi i)^2).
#[derive(Debug, Clone)]
pub struct ThetaJets {
    /// theta(x + dx; tau + dtau) / theta(x; tau)
    pub normalized: Jet,
    /// theta(x; tau)
    pub value: Complex64,
}

impl ThetaJets {
    pub fn at(x: Complex64, tau: HalfPlanePoint, order: usize, cfg: &SeriesConfig) -> Result<Self> {
        let d = theta_derivatives(2 * order, x, tau, cfg)?;
        let value = d[0];
        let h = (TWO_PI_I * TWO_PI_I * 2.0).inv();
        let normalized = Jet::from_partials(order, |i, j| d[i + 2 * j] / value * h.powi(j as i32));
        Ok(ThetaJets { normalized, value })
    }

    /// Jet in dt only of theta'(0; tau + dtau) / theta'(0; tau), with theta'(0).
    pub fn prime_at_zero(tau: HalfPlanePoint, order: usize, cfg: &SeriesConfig) -> Result<(Jet, Complex64)> {
        let d = theta_derivatives(2 * order + 1, cr(0.0), tau, cfg)?;
        let h = (TWO_PI_I * TWO_PI_I * 2.0).inv();
        let jet = Jet::from_partials(order, |i, j| if i == 0 { d[1 + 2 * j] / d[1] * h.powi(j as i32) } else { cr(0.0) });
        Ok((jet, d[1]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular_forms::{dedekind_eta, eisenstein};
    use crate::numeric::c;
    use proptest::prelude::*;

    fn hp(re: f64, im: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(c(re, im)).unwrap()
    }

    #[test]
    fn odd_in_x() {
        let cfg = SeriesConfig::default();
        let x = c(0.17, 0.21);
        let a = theta11_d(0, x, hp(0.0, 0.95), &cfg).unwrap();
        let b = theta11_d(0, -x, hp(0.0, 0.95), &cfg).unwrap();
        assert!((a + b).norm() < 1e-12);
    }

    #[test]
    fn derivative_at_zero_is_eta_cubed() {
        let cfg = SeriesConfig::default();
        let t = hp(0.0, 1.3);
        let d = theta11_d(1, cr(0.0), t, &cfg).unwrap();
        let eta = dedekind_eta(t, &cfg).unwrap();
        let want = eta * eta * eta * (-2.0 * std::f64::consts::PI);
        assert!((d - want).norm() < 1e-10 * want.norm());
    }

    #[test]
    fn third_over_first_gives_e2() {
        let cfg = SeriesConfig::default();
        let t = hp(0.25, 0.8);
        let r = theta11_d(3, cr(0.0), t, &cfg).unwrap() / theta11_d(1, cr(0.0), t, &cfg).unwrap();
        let e2 = eisenstein(2, t, &cfg).unwrap();
        assert!((r * 4.0 / (TWO_PI_I * TWO_PI_I) - e2).norm() < 1e-9);
    }

    #[test]
    fn reduction_matches_raw_series_for_moderate_shifts() {
        let cfg = SeriesConfig::default();
        let t = c(0.1, 0.9);
        let x = c(0.2, 0.1) + t * 2.0 - 1.0;
        let reduced = theta_derivatives(3, x, HalfPlanePoint::new(t).unwrap(), &cfg).unwrap();
        let raw = theta11_raw_series(3, x, t, &cfg).unwrap();
        for k in 0..=3 {
            assert!((reduced[k] - raw[k]).norm() < 1e-10 * raw[k].norm().max(1.0), "order {k}");
        }
    }

    #[test]
    fn order_above_three_rejected() {
        let cfg = SeriesConfig::default();
        assert!(theta11_d(4, cr(0.1), hp(0.0, 1.0), &cfg).is_err());
    }

    #[test]
    fn heat_jet_matches_finite_difference() {
        let cfg = SeriesConfig::default();
        let (x, tau) = (c(0.23, 0.05), c(0.05, 0.9));
        let jets = ThetaJets::at(x, HalfPlanePoint::new(tau).unwrap(), 2, &cfg).unwrap();
        let d_tau = crate::modular_forms::normalized_tau_fd(
            |t| Ok(theta_derivatives(0, x, HalfPlanePoint::new(t)?, &cfg)?[0]),
            tau,
            1e-5,
        )
        .unwrap();
        let analytic = jets.normalized.partial(0, 1) * jets.value;
        assert!((d_tau - analytic).norm() < 1e-8 * analytic.norm().max(1.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn quasi_periodicity(re in -0.5f64..0.5, im in 0.5f64..2.0, xr in -0.5f64..0.5, xi in -0.25f64..0.25) {
            let cfg = SeriesConfig::default();
            let tau = c(re, im);
            let x = c(xr, xi * im);
            let base = theta11_raw_series(0, x, tau, &cfg).unwrap()[0];
            for m in -2i64..=2 {
                for n in -2i64..=2 {
                    let shifted = x + m as f64 + tau * n as f64;
                    let lhs = theta11_raw_series(0, shifted, tau, &cfg).unwrap()[0];
                    let sign = if (m + n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    let nf = n as f64;
                    let rhs = e_of(-tau * (nf * nf / 2.0) - x * nf) * base * sign;
                    prop_assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(rhs.norm()).max(1e-300));
                }
            }
        }
    }
}
