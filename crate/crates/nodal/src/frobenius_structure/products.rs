use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use super::tensors::tensors_with;
use super::{half_values, FlatPoint, Matrix3c, Tensor3c, ETA_FLAT};
use crate::config::SeriesConfig;
use crate::error::{Error, Result};
use crate::modular_forms::ModularValues;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// du_a/dt_k, rows a in the order (1/2, (1+tau)/2, tau/2).
pub fn critical_jacobian(t: &FlatPoint, cfg: &SeriesConfig) -> Result<Matrix3c> {
    let mv = ModularValues::at(t.tau, cfg)?;
    let e = half_values(t.tau, cfg)?;
    Ok(jacobian_with(t, &mv, &e))
}

pub(crate) fn jacobian_with(t: &FlatPoint, mv: &ModularValues, e: &[Complex64; 3]) -> Matrix3c {
    let mut j = [[ZERO; 3]; 3];
    for a in 0..3 {
        let p = e[a] - mv.e2 / 12.0;
        // tau-flow of a critical value: 2 e^2 + E2 e / 6 - E4 / 36
        let de = e[a] * e[a] * 2.0 + mv.e2 * e[a] / 6.0 - mv.e4 / 36.0;
        j[a] = [Complex64::new(1.0, 0.0), t.t2 * p * 2.0, t.t2 * t.t2 * (de - mv.de2 / 12.0)];
    }
    j
}

fn to_na(m: &Matrix3c) -> Matrix3<Complex64> {
    Matrix3::from_fn(|i, j| m[i][j])
}

fn inverse_checked(j: &Matrix3c) -> Result<Matrix3<Complex64>> {
    let m = to_na(j);
    let det = m.determinant();
    if det.norm() < 1e-12 {
        return Err(Error::DegenerateJacobian(det.norm()));
    }
    m.try_inverse().ok_or(Error::DegenerateJacobian(det.norm()))
}

/// d/dt_i o d/dt_j in the flat frame, multiplying pointwise on the critical set.
pub fn product_via_critical_values(t: &FlatPoint, i: usize, j: usize, cfg: &SeriesConfig) -> Result<[Complex64; 3]> {
    if i > 2 || j > 2 {
        return Err(Error::InvalidInput(format!("frame index out of range: ({i}, {j})")));
    }
    let jac = critical_jacobian(t, cfg)?;
    let inv = inverse_checked(&jac)?;
    Ok(product_with(&jac, &inv, i, j))
}

fn product_with(jac: &Matrix3c, inv: &Matrix3<Complex64>, i: usize, j: usize) -> [Complex64; 3] {
    let w = Vector3::from_fn(|a, _| jac[a][i] * jac[a][j]);
    let v = inv * w;
    [v[0], v[1], v[2]]
}

/// Full structure-constant tensor [i][j][k] from critical values.
pub fn product_via_critical_values_all(t: &FlatPoint, cfg: &SeriesConfig) -> Result<Tensor3c> {
    let jac = critical_jacobian(t, cfg)?;
    let inv = inverse_checked(&jac)?;
    let mut c = [[[ZERO; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = product_with(&jac, &inv, i, j);
        }
    }
    Ok(c)
}

/// Structure constants from the contravariant Christoffel symbols.
pub fn product_via_christoffel(t: &FlatPoint, cfg: &SeriesConfig) -> Result<Tensor3c> {
    let mv = ModularValues::at(t.tau, cfg)?;
    let gamma = tensors_with(t, &mv).gamma;
    let mut c = [[[ZERO; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let raised = [
                    gamma[j][k][0],
                    gamma[j][k][1] * 2.0,
                    if k == j { Complex64::new(1.0, 0.0) } else { ZERO },
                ];
                c[i][j][k] = (0..3).map(|a| ETA_FLAT[i][a] * raised[a]).sum();
            }
        }
    }
    Ok(c)
}

/// d/du_a o d/du_b expanded in the canonical frame, from the potential.
pub fn canonical_product_table(t: &FlatPoint, cfg: &SeriesConfig) -> Result<Tensor3c> {
    let mv = ModularValues::at(t.tau, cfg)?;
    let e = half_values(t.tau, cfg)?;
    let jac = jacobian_with(t, &mv, &e);
    let inv = inverse_checked(&jac)?;
    let c = tensors_with(t, &mv).c;
    let mut out = [[[ZERO; 3]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let mut flat = [ZERO; 3];
            for k in 0..3 {
                for l in 0..3 {
                    for (m, f) in flat.iter_mut().enumerate() {
                        *f += inv[(k, a)] * inv[(l, b)] * c[k][l][m];
                    }
                }
            }
            for cc in 0..3 {
                out[a][b][cc] = (0..3).map(|m| jac[cc][m] * flat[m]).sum();
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius_structure::frobenius_tensors;
    use crate::modular_forms::HalfPlanePoint;
    use crate::numeric::c;
    use proptest::prelude::*;

    fn point(t1: Complex64, t2: Complex64, tau: Complex64) -> FlatPoint {
        FlatPoint::new(t1, t2, HalfPlanePoint::new(tau).unwrap()).unwrap()
    }

    fn max_diff(a: &Tensor3c, b: &Tensor3c) -> f64 {
        let mut w: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    w = w.max((a[i][j][k] - b[i][j][k]).norm());
                }
            }
        }
        w
    }

    #[test]
    fn unit_times_unit() {
        let cfg = SeriesConfig::default();
        let t = point(c(0.3, 0.2), c(0.8, -0.1), c(0.1, 1.1));
        let v = product_via_critical_values(&t, 0, 0, &cfg).unwrap();
        assert!((v[0] - 1.0).norm() < 1e-10 && v[1].norm() < 1e-10 && v[2].norm() < 1e-10);
    }

    #[test]
    fn canonical_frame_is_idempotent() {
        let cfg = SeriesConfig::default();
        let t = point(c(-0.3, 0.2), c(0.7, 0.4), c(0.2, 0.9));
        let tab = canonical_product_table(&t, &cfg).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                for k in 0..3 {
                    let want = if a == b && b == k { 1.0 } else { 0.0 };
                    assert!((tab[a][b][k] - want).norm() < 1e-9, "{a}{b}{k}: {}", tab[a][b][k]);
                }
            }
        }
    }

    #[test]
    fn square_of_second_field() {
        let cfg = SeriesConfig::default();
        let t = point(c(0.1, 0.0), c(1.3, 0.2), c(-0.1, 1.0));
        let mv = ModularValues::at(t.tau, &cfg).unwrap();
        let v = product_via_critical_values(&t, 1, 1, &cfg).unwrap();
        assert!((v[2] - 2.0).norm() < 1e-8);
        assert!((v[1] + t.t2 * mv.e2 / 2.0).norm() < 1e-8);
        assert!((v[0] + t.t2 * t.t2 * mv.de2 / 2.0).norm() < 1e-8);
    }

    #[test]
    fn singular_jacobian_is_reported() {
        let m = [[ZERO; 3]; 3];
        assert!(matches!(inverse_checked(&m), Err(Error::DegenerateJacobian(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn three_constructions_agree(a in -2.0f64..2.0, b in -2.0f64..2.0, r in 0.3f64..2.0, th in 0.0f64..std::f64::consts::TAU,
                                     re in -0.5f64..0.5, im in 0.6f64..2.0) {
            let cfg = SeriesConfig::default();
            let t = point(c(a, b), Complex64::from_polar(r, th), c(re, im));
            let pot = frobenius_tensors(&t, &cfg).unwrap().c;
            let crit = product_via_critical_values_all(&t, &cfg).unwrap();
            let gam = product_via_christoffel(&t, &cfg).unwrap();
            let scale = 1f64.max(r.powi(4));
            prop_assert!(max_diff(&pot, &crit) < 1e-8 * scale);
            prop_assert!(max_diff(&pot, &gam) < 1e-12 * scale);
        }
    }
}
