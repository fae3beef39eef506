use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{apply_group, GroupElement, TildeEPoint};
use crate::config::SeriesConfig;
use crate::error::{Error, Result};
use crate::frobenius_structure::{frobenius_tensors, FlatPoint, Matrix3c};
use crate::jet::Jet;
use crate::modular_forms::ModularValues;
use crate::numeric::{c, det3, I, TWO_PI_I};
use crate::theta_weierstrass::{theta_derivatives, ThetaJets, TorusPoint, WeierstrassContext, WeierstrassJets};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Invariants {
    pub y1: Complex64,
    pub y2: Complex64,
    pub y3: Complex64,
    pub j: Complex64,
}

/// Defects of invariance. For SL(2, Z) elements `dy2` measures weight -1
/// equivariance and `dy3` is |y3(g p) - 2 pi i g(tau)|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvarianceResiduals {
    pub dy1: f64,
    pub dy2: f64,
    pub dy3: f64,
    pub dj: f64,
}

fn half_exp(phi: Complex64, k: f64) -> Complex64 {
    (I * std::f64::consts::PI * phi * k).exp()
}

fn theta_ratio(p: &TildeEPoint, cfg: &SeriesConfig) -> Result<Complex64> {
    let th = theta_derivatives(0, p.x, p.tau, cfg)?[0];
    let th0 = theta_derivatives(1, Complex64::new(0.0, 0.0), p.tau, cfg)?[1];
    Ok(th / th0)
}

pub fn invariants(p: &TildeEPoint, cfg: &SeriesConfig) -> Result<Invariants> {
    let ctx = WeierstrassContext::new(p.tau, cfg)?;
    let v = ctx.eval(p.x, cfg)?;
    let r = theta_ratio(p, cfg)?;
    Ok(Invariants {
        y1: r * r * v.wp * half_exp(p.phi, 2.0),
        y2: r * half_exp(p.phi, 1.0),
        y3: TWO_PI_I * p.tau.tau(),
        j: -r.powi(3) * v.wp_dz * half_exp(p.phi, 3.0) / (TWO_PI_I * 2.0),
    })
}

/// J as theta(2x) / (2 theta(x)) e[3 phi / 2] / (2 pi i)^3.
pub fn j_theta_quotient(p: &TildeEPoint, cfg: &SeriesConfig) -> Result<Complex64> {
    TorusPoint::new(p.x, p.tau).check_margin(cfg)?;
    let a = theta_derivatives(0, p.x * 2.0, p.tau, cfg)?[0];
    let b = theta_derivatives(0, p.x, p.tau, cfg)?[0];
    Ok(a / (b * 2.0) * half_exp(p.phi, 3.0) / TWO_PI_I.powi(3))
}

/// Infinite-product form of J. `half_start` is the first index n of the
/// factors at q^(n + 1/2); the identity needs 0.
pub(crate) fn j_product_from(p: &TildeEPoint, half_start: usize, cfg: &SeriesConfig) -> Result<Complex64> {
    let tau = p.tau.tau();
    let e = |w: Complex64| (TWO_PI_I * w).exp();
    let mut prod = (e(p.x / 2.0) + e(-p.x / 2.0)) / 2.0;
    let mut small = 0;
    for n in 0..cfg.max_terms {
        let nf = n as f64;
        let mut biggest: f64 = 0.0;
        if n >= 1 {
            let (a, b) = (e(tau * nf + p.x), e(tau * nf - p.x));
            prod *= (a + 1.0) * (b + 1.0);
            biggest = biggest.max(a.norm()).max(b.norm());
        }
        if n >= half_start {
            let (a, b) = (e(tau * (nf + 0.5) + p.x), e(tau * (nf + 0.5) - p.x));
            prod *= (-a + 1.0) * (-b + 1.0) * (a + 1.0) * (b + 1.0);
            biggest = biggest.max(a.norm()).max(b.norm());
        }
        if n >= 1 && biggest < cfg.tail_tol {
            small += 1;
            if small == 2 {
                return Ok(prod * half_exp(p.phi, 3.0) / TWO_PI_I.powi(3));
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence { what: "J product", terms: cfg.max_terms })
}

pub fn j_product(p: &TildeEPoint, cfg: &SeriesConfig) -> Result<Complex64> {
    j_product_from(p, 0, cfg)
}

/// Right side of the weighted-homogeneous cubic: y1^3 - E4 y1 y2^4 / 48 + E6 y2^6 / 864.
pub fn chevalley_cubic(v: &Invariants, mv: &ModularValues) -> Complex64 {
    v.y1.powi(3) - mv.e4 * v.y1 * v.y2.powi(4) / 48.0 + mv.e6 * v.y2.powi(6) / 864.0
}

/// |J^2 - chevalley_cubic|, relative once |J^2| exceeds 1.
pub fn chevalley_residual(p: &TildeEPoint, cfg: &SeriesConfig) -> Result<f64> {
    let v = invariants(p, cfg)?;
    let mv = ModularValues::at(p.tau, cfg)?;
    let j2 = v.j * v.j;
    Ok((j2 - chevalley_cubic(&v, &mv)).norm() / j2.norm().max(1.0))
}

pub fn invariance_residuals(p: &TildeEPoint, g: &GroupElement, cfg: &SeriesConfig) -> Result<InvarianceResiduals> {
    let q = apply_group(g, *p)?;
    let a = invariants(p, cfg)?;
    let b = invariants(&q, cfg)?;
    Ok(match g {
        GroupElement::Word(_) => InvarianceResiduals {
            dy1: (b.y1 - a.y1).norm(),
            dy2: (b.y2 - a.y2).norm(),
            dy3: (b.y3 - a.y3).norm(),
            dj: (b.j - a.j * g.j_sign()).norm(),
        },
        GroupElement::Modular([_, _, cc, d]) => {
            let factor = p.tau.tau() * *cc as f64 + *d as f64;
            InvarianceResiduals {
                dy1: (b.y1 - a.y1).norm(),
                dy2: (b.y2 * factor - a.y2).norm(),
                dy3: (b.y3 - TWO_PI_I * q.tau.tau()).norm(),
                dj: (b.j - a.j).norm(),
            }
        }
    })
}

/// Jets in (dx, dt), t = 2 pi i tau, of y2 and p(x), at fixed phi.
struct LocalJets {
    y2: Jet,
    wp: Jet,
    p: Jet,
}

fn local_jets(pt: &TildeEPoint, cfg: &SeriesConfig) -> Result<LocalJets> {
    let w = WeierstrassJets::at(TorusPoint::new(pt.x, pt.tau), 1, cfg)?;
    let th = ThetaJets::at(pt.x, pt.tau, 1, cfg)?;
    let (prime, th0) = ThetaJets::prime_at_zero(pt.tau, 1, cfg)?;
    let y2 = th.normalized.div(&prime).scale(th.value / th0 * half_exp(pt.phi, 1.0));
    Ok(LocalJets { y2, wp: w.wp(), p: w.p })
}

fn row(j: &Jet, phi_weight: f64) -> [Complex64; 3] {
    [TWO_PI_I * phi_weight / 2.0 * j.value(), j.partial(1, 0), TWO_PI_I * j.partial(0, 1)]
}

/// d(y1, y2, y3)/d(phi, x, tau).
pub fn invariant_jacobian(p: &TildeEPoint, cfg: &SeriesConfig) -> Result<Matrix3c> {
    let lj = local_jets(p, cfg)?;
    let y1 = &(&lj.y2 * &lj.y2) * &lj.wp;
    let zero = c(0.0, 0.0);
    Ok([row(&y1, 2.0), row(&lj.y2, 1.0), [zero, zero, TWO_PI_I]])
}

/// d(t1, t2, t3)/d(phi, x, tau) with t1 = -y1 + E2 y2^2 / 12, t2 = y2.
pub fn coordinate_jacobian(p: &TildeEPoint, cfg: &SeriesConfig) -> Result<Matrix3c> {
    let lj = local_jets(p, cfg)?;
    let t1 = (&(&lj.y2 * &lj.y2) * &lj.p).scale(c(-1.0, 0.0));
    let zero = c(0.0, 0.0);
    Ok([row(&t1, 2.0), row(&lj.y2, 1.0), [zero, zero, TWO_PI_I]])
}

/// Flat coordinates of the invariant-theory point.
pub fn flat_point(p: &TildeEPoint, cfg: &SeriesConfig) -> Result<FlatPoint> {
    let v = invariants(p, cfg)?;
    let e2 = ModularValues::at(p.tau, cfg)?.e2;
    FlatPoint::new(-v.y1 + e2 * v.y2 * v.y2 / 12.0, v.y2, p.tau)
}

/// The constant form on d(phi, x, tau).
pub fn weyl_metric() -> Matrix3c {
    let k = (TWO_PI_I * TWO_PI_I).inv();
    let z = c(0.0, 0.0);
    [[z, z, k], [z, k * -0.5, z], [k, z, z]]
}

/// The constant form pushed to the flat frame: g(dt_a, dt_b).
pub fn pullback_metric(p: &TildeEPoint, cfg: &SeriesConfig) -> Result<Matrix3c> {
    let jac = coordinate_jacobian(p, cfg)?;
    let det = det3(&jac);
    if det.norm() < 1e-12 {
        return Err(Error::DegenerateJacobian(det.norm()));
    }
    let g0 = weyl_metric();
    let mut out = [[c(0.0, 0.0); 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let mut s = c(0.0, 0.0);
            for i in 0..3 {
                for j in 0..3 {
                    s += jac[a][i] * jac[b][j] * g0[i][j];
                }
            }
            out[a][b] = s;
        }
    }
    Ok(out)
}

/// g(dx, dx) from the closed-form intersection form, with dx obtained by
/// differentiating t1 + t2^2 P(x; tau) = 0.
pub fn x_self_pairing(p: &TildeEPoint, cfg: &SeriesConfig) -> Result<Complex64> {
    let t = flat_point(p, cfg)?;
    let g = frobenius_tensors(&t, cfg)?.g;
    let w = WeierstrassJets::at(TorusPoint::new(p.x, p.tau), 1, cfg)?;
    let pv = w.p.value();
    let fx = t.t2 * t.t2 * w.p.partial(1, 0);
    let grad = [-1.0 / fx, -(t.t2 * pv * 2.0) / fx, -(t.t2 * t.t2 * w.p.partial(0, 1)) / fx];
    let mut s = c(0.0, 0.0);
    for a in 0..3 {
        for b in 0..3 {
            s += grad[a] * grad[b] * g[a][b];
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius_structure::{unfolding, ModuliPoint};
    use crate::modular_forms::HalfPlanePoint;
    use crate::numeric::{diff5, max_abs_diff3, scaled_diff};
    use crate::weyl_invariants::Generator;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(phi: Complex64, x: Complex64, tau: Complex64) -> TildeEPoint {
        TildeEPoint::new(phi, x, HalfPlanePoint::new(tau).unwrap())
    }

    fn random_point(rng: &mut ChaCha8Rng) -> TildeEPoint {
        let tau = c(rng.random_range(-0.5..0.5), rng.random_range(0.6..2.0));
        let x = c(rng.random_range(0.1..0.9), 0.0) + tau * rng.random_range(0.1..0.9);
        pt(c(rng.random_range(-1.0..1.0), rng.random_range(-0.3..0.3)), x, tau)
    }

    #[test]
    fn degree_conditions() {
        let cfg = SeriesConfig::default();
        let p = pt(c(0.2, 0.1), c(0.3, 0.2), c(0.1, 1.0));
        let pi_i = I * std::f64::consts::PI;
        for (k, weight) in [(0usize, 2.0), (1, 1.0), (2, 0.0), (3, 3.0)] {
            let f = |phi: Complex64| -> Result<Complex64> {
                let v = invariants(&TildeEPoint { phi, ..p }, &cfg)?;
                Ok([v.y1, v.y2, v.y3, v.j][k])
            };
            let d = diff5(f, p.phi, c(1e-4, 0.0)).unwrap() / pi_i;
            let v = f(p.phi).unwrap();
            assert!((d - v * weight).norm() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn j_forms_agree() {
        let cfg = SeriesConfig::default();
        let p = pt(c(0.15, -0.05), c(0.31, 0.22), c(0.05, 0.8));
        let j = invariants(&p, &cfg).unwrap().j;
        let rel = |a: Complex64| (a - j).norm() / j.norm();
        assert!(rel(j_theta_quotient(&p, &cfg).unwrap()) < 1e-9);
        assert!(rel(j_product(&p, &cfg).unwrap()) < 1e-9);
        // starting the half-integer factors at q^(3/2) drops (1 - q e[2x])(1 - q e[-2x])
        assert!(rel(j_product_from(&p, 1, &cfg).unwrap()) > 1e-3);
    }

    #[test]
    fn chevalley_at_seeded_points_and_hyperplane() {
        let cfg = SeriesConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p = random_point(&mut rng);
            assert!(chevalley_residual(&p, &cfg).unwrap() < 1e-8);
        }
        let p = pt(c(0.3, 0.0), c(0.5, 0.0), c(0.0, 1.2));
        let v = invariants(&p, &cfg).unwrap();
        assert!(v.j.norm() < 1e-8);
        assert!(chevalley_residual(&p, &cfg).unwrap() < 1e-8);
        let shifted = TildeEPoint { phi: p.phi + 2.0, ..p };
        assert!((chevalley_residual(&shifted, &cfg).unwrap() - chevalley_residual(&p, &cfg).unwrap()).abs() < 1e-12);
        assert!((invariants(&shifted, &cfg).unwrap().y1 - v.y1).norm() < 1e-12);
    }

    #[test]
    fn unbalanced_weights_fail() {
        // y2^2 and y2^3 in place of y2^4 and y2^6 break homogeneity in phi
        let cfg = SeriesConfig::default();
        let p = pt(c(0.0, 0.0), c(0.3, 0.1), c(0.0, 1.0));
        let v = invariants(&p, &cfg).unwrap();
        let mv = ModularValues::at(p.tau, &cfg).unwrap();
        let literal = v.y1.powi(3) - mv.e4 * v.y1 * v.y2 * v.y2 / 48.0 + mv.e6 * v.y2.powi(3) / 864.0;
        assert!((v.j * v.j - literal).norm() > 1e-6);
        assert!(chevalley_residual(&p, &cfg).unwrap() < 1e-12);
    }

    #[test]
    fn generators_preserve_invariants() {
        let cfg = SeriesConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let p = random_point(&mut rng);
            for g in Generator::ALL {
                let r = invariance_residuals(&p, &GroupElement::generator(g), &cfg).unwrap();
                let m = r.dy1.max(r.dy2).max(r.dy3).max(r.dj);
                assert!(m < 1e-8, "{g:?}: {r:?}");
            }
        }
        let p = pt(c(0.1, 0.0), c(0.27, 0.13), c(0.2, 1.1));
        for (a, b, cc, d) in [(1, 0, 1, 1), (0, -1, 1, 0), (1, 1, 0, 1), (2, 1, 1, 1)] {
            let r = invariance_residuals(&p, &GroupElement::modular(a, b, cc, d).unwrap(), &cfg).unwrap();
            assert!(r.dy1 < 1e-8 && r.dy2 < 1e-8 && r.dj < 1e-8, "{r:?}");
        }
    }

    #[test]
    fn volume_form_is_j() {
        let cfg = SeriesConfig::default();
        let p = pt(c(0.2, 0.1), c(0.23, 0.31), c(-0.15, 0.95));
        let d = det3(&invariant_jacobian(&p, &cfg).unwrap());
        let j = invariants(&p, &cfg).unwrap().j;
        assert!(scaled_diff(d, TWO_PI_I.powi(3) * j) < 1e-7);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let cfg = SeriesConfig::default();
        let p = pt(c(0.1, 0.0), c(0.3, 0.15), c(0.1, 1.05));
        let jac = coordinate_jacobian(&p, &cfg).unwrap();
        let t_of = |q: TildeEPoint| flat_point(&q, &cfg).map(|t| [t.t1, t.t2]);
        for k in 0..2 {
            let dphi = diff5(|h| Ok(t_of(TildeEPoint { phi: p.phi + h, ..p })?[k]), c(0.0, 0.0), c(1e-5, 0.0)).unwrap();
            let dx = diff5(|h| Ok(t_of(TildeEPoint { x: p.x + h, ..p })?[k]), c(0.0, 0.0), c(1e-5, 0.0)).unwrap();
            let dtau = diff5(
                |h| Ok(t_of(TildeEPoint { tau: HalfPlanePoint::new(p.tau.tau() + h)?, ..p })?[k]),
                c(0.0, 0.0),
                c(1e-5, 0.0),
            )
            .unwrap();
            assert!(scaled_diff(dphi, jac[k][0]) < 1e-8);
            assert!(scaled_diff(dx, jac[k][1]) < 1e-8);
            assert!(scaled_diff(dtau, jac[k][2]) < 1e-8);
        }
    }

    #[test]
    fn flat_point_is_zero_of_unfolding() {
        let cfg = SeriesConfig::default();
        let p = pt(c(0.25, 0.05), c(0.35, 0.1), c(0.0, 1.1));
        let t = flat_point(&p, &cfg).unwrap();
        let m = ModuliPoint::from_flat(t, &cfg).unwrap();
        assert!(unfolding(p.x, &m, &cfg).unwrap().norm() < 1e-10);
        assert!((m.flat().t1 - t.t1).norm() < 1e-8);
    }

    #[test]
    fn pulled_back_metric_is_intersection_form() {
        let cfg = SeriesConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let p = random_point(&mut rng);
            let t = flat_point(&p, &cfg).unwrap();
            let g = pullback_metric(&p, &cfg).unwrap();
            let closed = frobenius_tensors(&t, &cfg).unwrap().g;
            let scale = closed.iter().flatten().map(|v| v.norm()).fold(1.0, f64::max);
            assert!(max_abs_diff3(&g, &closed) < 1e-7 * scale);
            assert!((g[0][2] - t.t1).norm() < 1e-8);
            let mv = ModularValues::at(t.tau, &cfg).unwrap();
            assert!((g[1][1] - (t.t1 / 2.0 - t.t2 * t.t2 * mv.e2 / 8.0)).norm() < 1e-8 * scale);
        }
    }

    #[test]
    fn x_pairing_is_constant() {
        let cfg = SeriesConfig::default();
        let want = -0.5 / (TWO_PI_I * TWO_PI_I);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let p = random_point(&mut rng);
            let v = x_self_pairing(&p, &cfg).unwrap();
            assert!((v - want).norm() < 1e-7 * want.norm(), "{v} vs {want}");
            // the doubled coordinate picks up a factor 4
            assert!((v * 4.0 - want).norm() > 1.0 * want.norm());
        }
    }
}
