use num_complex::Complex64;

use super::{FlatPoint, Matrix3c, ModuliPoint};
use crate::config::SeriesConfig;
use crate::error::{Error, Result};
use crate::modular_forms::ModularValues;
use crate::numeric::TWO_PI_I;
use crate::theta_weierstrass::{critical_points, WeierstrassContext};

pub const DEFAULT_NODES: usize = 256;

/// Distance from 0 to the nearest critical point or nonzero pole.
pub(crate) fn nearest_obstruction(tau: Complex64) -> f64 {
    let mut best = f64::INFINITY;
    for m in -2i32..=2 {
        for n in -2i32..=2 {
            let shift = Complex64::new(m as f64, 0.0) + tau * n as f64;
            if m != 0 || n != 0 {
                best = best.min(shift.norm());
            }
            for h in critical_points(tau) {
                best = best.min((h + shift).norm());
            }
        }
    }
    best
}

pub(crate) fn default_radius(tau: Complex64) -> f64 {
    0.25f64.min(nearest_obstruction(tau) / 2.0)
}

/// The s3-variation replaced by its elliptic representative modulo d/dz.
fn ks_third(wp: Complex64, s2: Complex64, mv: &ModularValues) -> Complex64 {
    s2 * s2 * (wp * wp * 2.0 + mv.e2 * wp / 6.0 - mv.e4 / 36.0)
}

pub fn residue_pairing(p: &ModuliPoint, cfg: &SeriesConfig) -> Result<Matrix3c> {
    residue_pairing_with(p, DEFAULT_NODES, None, cfg)
}

/// Trapezoid rule on |z| = r with `nodes` points; `radius` defaults to
/// the rule min(0.25, half the distance to the nearest critical point).
pub fn residue_pairing_with(
    p: &ModuliPoint,
    nodes: usize,
    radius: Option<f64>,
    cfg: &SeriesConfig,
) -> Result<Matrix3c> {
    if nodes < 8 {
        return Err(Error::InvalidInput("at least 8 contour nodes required".into()));
    }
    let tau = p.tau.tau();
    let limit = nearest_obstruction(tau);
    let r = radius.unwrap_or_else(|| default_radius(tau));
    if !(r > 0.0) || r >= limit {
        return Err(Error::ContourTooLarge { radius: r, limit });
    }
    let ctx = WeierstrassContext::new(p.tau, cfg)?;
    let mv = ModularValues::at(p.tau, cfg)?;
    let s2 = p.s2;
    let mut acc = [[Complex64::new(0.0, 0.0); 3]; 3];
    let step = std::f64::consts::TAU / nodes as f64;
    for k in 0..nodes {
        let z = Complex64::from_polar(r, step * k as f64);
        let v = ctx.eval_unchecked(z, cfg)?;
        let f = [Complex64::new(1.0, 0.0), s2 * v.wp * 2.0, ks_third(v.wp, s2, &mv)];
        let dz = Complex64::i() * z * step;
        let w = dz / (s2 * s2 * v.wp_dz);
        for i in 0..3 {
            for j in 0..3 {
                acc[i][j] += f[i] * f[j] * w;
            }
        }
    }
    for row in acc.iter_mut() {
        for x in row.iter_mut() {
            *x *= -TWO_PI_I;
        }
    }
    Ok(acc)
}

/// Contribution of each critical point to the residue pairing. When two
/// critical values nearly coincide the terms are large and cancel.
pub fn residue_terms_at_critical_points(p: &ModuliPoint, cfg: &SeriesConfig) -> Result<[Matrix3c; 3]> {
    let ctx = WeierstrassContext::new(p.tau, cfg)?;
    let mv = ModularValues::at(p.tau, cfg)?;
    let s2 = p.s2;
    let mut out = [[[Complex64::new(0.0, 0.0); 3]; 3]; 3];
    for (term, za) in out.iter_mut().zip(critical_points(p.tau.tau())) {
        let v = ctx.eval_unchecked(za, cfg)?;
        let f = [Complex64::new(1.0, 0.0), s2 * v.wp * 2.0, ks_third(v.wp, s2, &mv)];
        let w = TWO_PI_I * TWO_PI_I / (s2 * s2 * v.wp_dzz);
        for i in 0..3 {
            for j in 0..3 {
                term[i][j] = f[i] * f[j] * w;
            }
        }
    }
    Ok(out)
}

/// Same pairing from the residues at the three critical points.
pub fn residue_pairing_at_critical_points(p: &ModuliPoint, cfg: &SeriesConfig) -> Result<Matrix3c> {
    let t = residue_terms_at_critical_points(p, cfg)?;
    let mut acc = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            acc[i][j] = t[0][i][j] + t[1][i][j] + t[2][i][j];
        }
    }
    Ok(acc)
}

/// ds/dt: rows s, columns t.
pub(crate) fn raw_over_flat(t: &FlatPoint, mv: &ModularValues) -> Matrix3c {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    [
        [one, -t.t2 * mv.e2 / 6.0, -t.t2 * t.t2 * mv.de2 / 12.0],
        [z, one, z],
        [z, z, one],
    ]
}

/// Pairing of the flat vector fields.
pub fn residue_pairing_flat(t: &FlatPoint, cfg: &SeriesConfig) -> Result<Matrix3c> {
    let p = ModuliPoint::from_flat(*t, cfg)?;
    let raw = residue_pairing(&p, cfg)?;
    let mv = ModularValues::at(t.tau, cfg)?;
    let j = raw_over_flat(t, &mv);
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..3 {
                for k in 0..3 {
                    s += j[i][a] * raw[i][k] * j[k][b];
                }
            }
            out[a][b] = s;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius_structure::ETA_FLAT;
    use crate::modular_forms::HalfPlanePoint;
    use crate::numeric::{c, max_abs_diff3};
    use proptest::prelude::*;

    fn closed_form(p: &ModuliPoint, mv: &ModularValues) -> Matrix3c {
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let m = p.s2 * mv.e2 / 6.0;
        [[z, z, one], [z, c(2.0, 0.0), m], [one, m, p.s2 * p.s2 * mv.de2 / 6.0]]
    }

    #[test]
    fn raw_matrix_matches_closed_form() {
        let cfg = SeriesConfig::default();
        let tau = HalfPlanePoint::new(c(0.1, 1.3)).unwrap();
        let p = ModuliPoint::new(c(0.3, 0.0), c(1.2, 0.0), tau, &cfg).unwrap();
        let mv = ModularValues::at(tau, &cfg).unwrap();
        let eta = residue_pairing(&p, &cfg).unwrap();
        assert!(eta[0][0].norm() < 1e-10);
        assert!((eta[1][1] - 2.0).norm() < 1e-10);
        assert!(max_abs_diff3(&eta, &closed_form(&p, &mv)) < 1e-10);
        let oracle = residue_pairing_at_critical_points(&p, &cfg).unwrap();
        assert!(max_abs_diff3(&eta, &oracle) < 1e-9);
    }

    #[test]
    fn flat_pairing_is_constant() {
        let cfg = SeriesConfig::default();
        let t = FlatPoint::new(c(-0.2, 0.4), c(0.9, 0.5), HalfPlanePoint::new(c(-0.3, 0.8)).unwrap()).unwrap();
        let eta = residue_pairing_flat(&t, &cfg).unwrap();
        assert!(max_abs_diff3(&eta, &ETA_FLAT) < 1e-10);
    }

    #[test]
    fn oversize_contour_is_rejected() {
        let cfg = SeriesConfig::default();
        let tau = HalfPlanePoint::new(c(0.0, 1.0)).unwrap();
        let p = ModuliPoint::new(c(0.0, 0.0), c(1.0, 0.0), tau, &cfg).unwrap();
        assert!(matches!(residue_pairing_with(&p, 256, Some(0.6), &cfg), Err(Error::ContourTooLarge { .. })));
        assert!((default_radius(tau.tau()) - 0.25).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn flat_pairing_constant_everywhere(a in -2.0f64..2.0, b in -2.0f64..2.0, r in 0.3f64..2.0, th in 0.0f64..std::f64::consts::TAU,
                                            re in -0.5f64..0.5, im in 0.6f64..2.0) {
            let cfg = SeriesConfig::default();
            let t = FlatPoint::new(c(a, b), Complex64::from_polar(r, th), HalfPlanePoint::new(c(re, im)).unwrap()).unwrap();
            let eta = residue_pairing_flat(&t, &cfg).unwrap();
            let scale = 1f64.max(r * r);
            prop_assert!(max_abs_diff3(&eta, &ETA_FLAT) < 1e-10 * scale);
        }
    }
}
