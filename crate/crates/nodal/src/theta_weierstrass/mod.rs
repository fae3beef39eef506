//! Jacobi theta function, Weierstrass functions built from it, half-period
//! values and the identity residual suite.

mod identities;
mod theta;
mod weierstrass;

pub use identities::{identity_residual, IdentitySample, IDENTITY_NAMES};
pub use theta::{theta11_d, theta11_product, theta11_raw_series, theta_derivatives, ThetaJets};
pub use weierstrass::{
    half_periods, lattice_sum_p, weierstrass, HalfPeriodValues, TorusPoint, WeierstrassJets, WeierstrassKind,
};

/// The three critical points 1/2, (1 + tau)/2, tau/2 of p.
pub fn critical_points(tau: num_complex::Complex64) -> [num_complex::Complex64; 3] {
    weierstrass::half_period_points(tau)
}

pub(crate) use weierstrass::WeierstrassContext;
