//! The Frobenius manifold on (s1, s2, tau)-space: unfolding, flat and
//! canonical coordinates, residue pairing, three constructions of the
//! product, primitive-form decompositions and the Lyashko-Looijenga map.

mod lyashko;
mod primitive;
mod products;
mod residue;
mod tensors;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::SeriesConfig;
use crate::error::{Error, Result};
use crate::modular_forms::{series_derivative, HalfPlanePoint};
use crate::numeric::TWO_PI_I;
use crate::theta_weierstrass::{half_periods, TorusPoint};

pub use lyashko::{
    canonical_coords, discriminant, ll_fiber, ll_inverse, lyashko_looijenga, reduce_to_fundamental_domain,
    triple_distance, CanonicalCoords, Ordering,
};
pub use primitive::{phi_values, primitive_form_residuals, PhiValues, PrimitiveFormResiduals};
pub use products::{
    canonical_product_table, critical_jacobian, product_via_christoffel, product_via_critical_values,
    product_via_critical_values_all,
};
pub use residue::{
    residue_pairing, residue_pairing_at_critical_points, residue_pairing_flat, residue_pairing_with,
    residue_terms_at_critical_points, DEFAULT_NODES,
};
pub use tensors::{
    euler_multiplication, euler_potential_residual, frobenius_tensors, intersection_form_from_potential,
    potential, third_partials, wdvv_residual, wdvv_residual_of, FrobeniusTensors, Matrix3c, Tensor3c, ETA_FLAT,
    ETA_FLAT_INV,
};

/// Flat coordinates (t1, t2, t3 = 2 pi i tau).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatPoint {
    pub t1: Complex64,
    pub t2: Complex64,
    pub tau: HalfPlanePoint,
}

impl FlatPoint {
    pub fn new(t1: Complex64, t2: Complex64, tau: HalfPlanePoint) -> Result<Self> {
        if t2.norm() == 0.0 {
            return Err(Error::InvalidInput("t2 must be nonzero".into()));
        }
        Ok(FlatPoint { t1, t2, tau })
    }

    pub fn t3(&self) -> Complex64 {
        TWO_PI_I * self.tau.tau()
    }

    pub fn coords(&self) -> [Complex64; 3] {
        [self.t1, self.t2, self.t3()]
    }
}

/// A point of M in raw coordinates (s1, s2, tau).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModuliPoint {
    pub s1: Complex64,
    pub s2: Complex64,
    pub tau: HalfPlanePoint,
    e2: Complex64,
}

impl ModuliPoint {
    pub fn new(s1: Complex64, s2: Complex64, tau: HalfPlanePoint, cfg: &SeriesConfig) -> Result<Self> {
        if s2.norm() == 0.0 {
            return Err(Error::InvalidInput("s2 must be nonzero".into()));
        }
        tau.check(cfg)?;
        let e2 = series_derivative(2, 0, tau.tau(), cfg)?;
        Ok(ModuliPoint { s1, s2, tau, e2 })
    }

    pub fn from_flat(t: FlatPoint, cfg: &SeriesConfig) -> Result<Self> {
        t.tau.check(cfg)?;
        let e2 = series_derivative(2, 0, t.tau.tau(), cfg)?;
        ModuliPoint::new(t.t1 - t.t2 * t.t2 * e2 / 12.0, t.t2, t.tau, cfg)
    }

    pub fn e2(&self) -> Complex64 {
        self.e2
    }

    pub fn flat(&self) -> FlatPoint {
        FlatPoint { t1: self.s1 + self.s2 * self.s2 * self.e2 / 12.0, t2: self.s2, tau: self.tau }
    }
}

/// F(z; s) = s2^2 p(z; tau) + s1.
pub fn unfolding(z: Complex64, p: &ModuliPoint, cfg: &SeriesConfig) -> Result<Complex64> {
    let wp = crate::theta_weierstrass::weierstrass(
        crate::theta_weierstrass::WeierstrassKind::P,
        TorusPoint::new(z, p.tau),
        cfg,
    )?;
    Ok(p.s2 * p.s2 * wp + p.s1)
}

/// The same function written as t2^2 (p - E2/12) + t1.
pub fn unfolding_flat(z: Complex64, t: &FlatPoint, cfg: &SeriesConfig) -> Result<Complex64> {
    let wp = crate::theta_weierstrass::weierstrass(
        crate::theta_weierstrass::WeierstrassKind::P,
        TorusPoint::new(z, t.tau),
        cfg,
    )?;
    let e2 = series_derivative(2, 0, t.tau.tau(), cfg)?;
    Ok(t.t2 * t.t2 * (wp - e2 / 12.0) + t.t1)
}

/// dF/dz.
pub fn unfolding_dz(z: Complex64, p: &ModuliPoint, cfg: &SeriesConfig) -> Result<Complex64> {
    let d = crate::theta_weierstrass::weierstrass(
        crate::theta_weierstrass::WeierstrassKind::PDz,
        TorusPoint::new(z, p.tau),
        cfg,
    )?;
    Ok(p.s2 * p.s2 * d)
}

pub(crate) fn half_values(tau: HalfPlanePoint, cfg: &SeriesConfig) -> Result<[Complex64; 3]> {
    Ok(half_periods(tau, cfg)?.as_array())
}
