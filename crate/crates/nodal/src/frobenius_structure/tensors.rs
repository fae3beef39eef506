use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FlatPoint;
use crate::config::SeriesConfig;
use crate::error::Result;
use crate::modular_forms::ModularValues;
use crate::numeric::{c, cr};

pub type Matrix3c = [[Complex64; 3]; 3];
/// Index order [a][b][c].
pub type Tensor3c = [[[Complex64; 3]; 3]; 3];

const Z: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const HALF: Complex64 = Complex64::new(0.5, 0.0);

pub const ETA_FLAT: Matrix3c = [[Z, Z, ONE], [Z, Complex64::new(2.0, 0.0), Z], [ONE, Z, Z]];
pub const ETA_FLAT_INV: Matrix3c = [[Z, Z, ONE], [Z, HALF, Z], [ONE, Z, Z]];

/// Flat-frame data at one point. `c[i][j][k]` is the coefficient of d/dt_k in
/// d/dt_i o d/dt_j; `g[i][j]` is g(dt_i, dt_j); `gamma[k][i][j]` is the
/// contravariant Christoffel symbol with upper indices i, j and lower k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusTensors {
    pub eta: Matrix3c,
    pub c: Tensor3c,
    pub g: Matrix3c,
    pub gamma: Tensor3c,
    pub potential_value: Complex64,
}

/// Closed-form potential 1/2 t1^2 t3 + t1 t2^2 - t2^4 E2 / 24.
pub fn potential(t: &FlatPoint, mv: &ModularValues) -> Complex64 {
    let (t1, t2, t3) = (t.t1, t.t2, t.t3());
    t1 * t1 * t3 / 2.0 + t1 * t2 * t2 - t2.powi(4) * mv.e2 / 24.0
}

/// All third partial derivatives of the potential (symmetric).
pub fn third_partials(t: &FlatPoint, mv: &ModularValues) -> Tensor3c {
    let t2 = t.t2;
    let mut f = [[[Z; 3]; 3]; 3];
    let mut set = |a: usize, b: usize, c: usize, v: Complex64| {
        for (i, j, k) in [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
            f[i][j][k] = v;
        }
    };
    set(0, 0, 2, ONE);
    set(0, 1, 1, cr(2.0));
    set(1, 1, 1, -t2 * mv.e2);
    set(1, 1, 2, -t2 * t2 * mv.de2 / 2.0);
    set(1, 2, 2, -t2.powi(3) * mv.d2e2 / 6.0);
    set(2, 2, 2, -t2.powi(4) * mv.d3e2 / 24.0);
    f
}

fn raise_product(f: &Tensor3c) -> Tensor3c {
    let mut out = [[[Z; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[i][j][k] = (0..3).map(|l| ETA_FLAT_INV[k][l] * f[l][i][j]).sum();
            }
        }
    }
    out
}

fn closed_form_g(t: &FlatPoint, mv: &ModularValues) -> Matrix3c {
    let (t1, t2) = (t.t1, t.t2);
    let g12 = -t2.powi(3) * mv.de2 / 8.0;
    [
        [-t2.powi(4) * mv.d2e2 / 12.0, g12, t1],
        [g12, t1 / 2.0 - t2 * t2 * mv.e2 / 8.0, t2 / 2.0],
        [t1, t2 / 2.0, Z],
    ]
}

fn closed_form_gamma(t: &FlatPoint, mv: &ModularValues) -> Tensor3c {
    let t2 = t.t2;
    let g1 = [[Z, Z, Z], [Z, c(0.25, 0.0), Z], [ONE, Z, Z]];
    let g2 = [
        [-t2.powi(3) * mv.d2e2 / 6.0, -t2 * t2 * mv.de2 / 8.0, Z],
        [-t2 * t2 * mv.de2 / 4.0, -t2 * mv.e2 / 8.0, Z],
        [Z, HALF, Z],
    ];
    let g3 = [
        [-t2.powi(4) * mv.d3e2 / 24.0, -t2.powi(3) * mv.d2e2 / 24.0, Z],
        [-t2.powi(3) * mv.d2e2 / 12.0, -t2 * t2 * mv.de2 / 16.0, Z],
        [Z, Z, Z],
    ];
    [g1, g2, g3]
}

pub fn frobenius_tensors(t: &FlatPoint, cfg: &SeriesConfig) -> Result<FrobeniusTensors> {
    let mv = ModularValues::at(t.tau, cfg)?;
    Ok(tensors_with(t, &mv))
}

pub(crate) fn tensors_with(t: &FlatPoint, mv: &ModularValues) -> FrobeniusTensors {
    FrobeniusTensors {
        eta: ETA_FLAT,
        c: raise_product(&third_partials(t, mv)),
        g: closed_form_g(t, mv),
        gamma: closed_form_gamma(t, mv),
        potential_value: potential(t, mv),
    }
}

/// g^{ij} = eta^{ia} eta^{jb} E(d_a d_b F), with E = t1 d1 + t2/2 d2.
pub fn intersection_form_from_potential(t: &FlatPoint, cfg: &SeriesConfig) -> Result<Matrix3c> {
    let mv = ModularValues::at(t.tau, cfg)?;
    let f = third_partials(t, &mv);
    let mut e = [[Z; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            e[a][b] = t.t1 * f[0][a][b] + t.t2 * f[1][a][b] / 2.0;
        }
    }
    let mut g = [[Z; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut s = Z;
            for a in 0..3 {
                for b in 0..3 {
                    s += ETA_FLAT_INV[i][a] * ETA_FLAT_INV[j][b] * e[a][b];
                }
            }
            g[i][j] = s;
        }
    }
    Ok(g)
}

/// |E(F) - 2F| with the first partials of the potential written out.
pub fn euler_potential_residual(t: &FlatPoint, cfg: &SeriesConfig) -> Result<f64> {
    let mv = ModularValues::at(t.tau, cfg)?;
    let (t1, t2, t3) = (t.t1, t.t2, t.t3());
    let d1 = t1 * t3 + t2 * t2;
    let d2 = t1 * t2 * 2.0 - t2.powi(3) * mv.e2 / 6.0;
    let ef = t1 * d1 + t2 * d2 / 2.0;
    let f = potential(t, &mv);
    Ok((ef - f * 2.0).norm() / 1f64.max(f.norm()))
}

/// Matrix of multiplication by the Euler field: row k, column j.
pub fn euler_multiplication(t: &FlatPoint, tensors: &FrobeniusTensors) -> Matrix3c {
    let e = [t.t1, t.t2 / 2.0, Z];
    let mut m = [[Z; 3]; 3];
    for k in 0..3 {
        for j in 0..3 {
            m[k][j] = (0..3).map(|i| e[i] * tensors.c[i][j][k]).sum();
        }
    }
    m
}

/// Associativity defect max |(a o b) o c - a o (b o c)| over frame vectors.
pub fn wdvv_residual_of(c: &Tensor3c) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for m in 0..3 {
                    let left: Complex64 = (0..3).map(|l| c[i][j][l] * c[l][k][m]).sum();
                    let right: Complex64 = (0..3).map(|l| c[j][k][l] * c[i][l][m]).sum();
                    worst = worst.max((left - right).norm());
                }
            }
        }
    }
    worst
}

pub fn wdvv_residual(t: &FlatPoint, cfg: &SeriesConfig) -> Result<f64> {
    Ok(wdvv_residual_of(&frobenius_tensors(t, cfg)?.c))
}
