use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FlatPoint;
use crate::config::SeriesConfig;
use crate::error::Result;
use crate::modular_forms::ModularValues;
use crate::numeric::{cr, diff5, scaled_diff, TWO_PI_I};
use crate::theta_weierstrass::{TorusPoint, WeierstrassContext, WeierstrassJets};

const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiValues {
    pub phi22: Complex64,
    pub phi23: Complex64,
    pub phi33: Complex64,
}

/// `identities[k]` is the scaled defect of the k-th product decomposition;
/// `conditions[k]` compares d(phi)/dz with the matching second t-derivative of F.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveFormResiduals {
    pub identities: [f64; 3],
    pub conditions: [f64; 3],
}

fn phi_with(z: Complex64, t: &FlatPoint, ctx: &WeierstrassContext, cfg: &SeriesConfig) -> Result<PhiValues> {
    let v = ctx.eval(z, cfg)?;
    let k = (TWO_PI_I * TWO_PI_I).inv();
    let e2 = ctx.e2;
    let p = v.wp - e2 / 12.0;
    let (p1, p2) = (v.wp_dz, v.wp_dzz);
    let zz = -v.zeta - e2 * z / 12.0;
    let de2 = (e2 * e2 - crate::modular_forms::series_derivative(4, 0, t.tau.tau(), cfg)?) / 12.0;
    let dz = -zz * p + k * p1 / 2.0;
    let dp = p * p * 2.0 + e2 * p / 2.0 + de2 / 4.0 - zz * p1;
    let dz_dp = p * p1 * 3.0 + e2 * p1 / 2.0 - zz * p2;
    let d2z = -dz * p - zz * dp + k * dz_dp / 2.0;
    Ok(PhiValues { phi22: zz * 2.0, phi23: t.t2 * dz * 2.0, phi33: t.t2 * t.t2 * d2z })
}

/// Coefficients of dF/dz in the three product decompositions, from the
/// tau-flow of Z = -zeta - E2 z / 12.
pub fn phi_values(z: Complex64, t: &FlatPoint, cfg: &SeriesConfig) -> Result<PhiValues> {
    let ctx = WeierstrassContext::new(t.tau, cfg)?;
    phi_with(z, t, &ctx, cfg)
}

pub fn primitive_form_residuals(z: Complex64, t: &FlatPoint, cfg: &SeriesConfig) -> Result<PrimitiveFormResiduals> {
    let ctx = WeierstrassContext::new(t.tau, cfg)?;
    let mv = ModularValues::at(t.tau, cfg)?;
    let jets = WeierstrassJets::at(TorusPoint::new(z, t.tau), 2, cfg)?;
    let phi = phi_with(z, t, &ctx, cfg)?;
    let t2 = t.t2;
    let p = jets.p.value();
    let p_t = jets.p.partial(0, 1);
    let p_tt = jets.p.partial(0, 2);
    let f2 = t2 * p * 2.0;
    let f3 = t2 * t2 * p_t;
    let fz = t2 * t2 * jets.p.partial(1, 0);

    let lhs = [f2 * f2, f2 * f3, f3 * f3];
    let rhs = [
        f3 * 2.0 - t2 * mv.e2 * f2 / 2.0 - t2 * t2 * mv.de2 / 2.0 + phi.phi22 * fz,
        -t2 * t2 * mv.de2 * f2 / 4.0 - t2.powi(3) * mv.d2e2 / 6.0 + phi.phi23 * fz,
        -t2.powi(3) * mv.d2e2 * f2 / 12.0 - t2.powi(4) * mv.d3e2 / 24.0 + phi.phi33 * fz,
    ];
    let identities = [0, 1, 2].map(|k| scaled_diff(lhs[k], rhs[k]));

    let h = cr(FD_STEP);
    let d22 = diff5(|w| Ok(phi_with(w, t, &ctx, cfg)?.phi22), z, h)?;
    let d23 = diff5(|w| Ok(phi_with(w, t, &ctx, cfg)?.phi23), z, h)?;
    let d33 = diff5(|w| Ok(phi_with(w, t, &ctx, cfg)?.phi33), z, h)?;
    let conditions = [
        scaled_diff(d22, p * 2.0),
        scaled_diff(d23, t2 * p_t * 2.0),
        scaled_diff(d33, t2 * t2 * p_tt),
    ];
    Ok(PrimitiveFormResiduals { identities, conditions })
}
