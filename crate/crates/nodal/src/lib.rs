//! Numerical and exact machinery for the Frobenius manifold attached to the
//! nodal quiver: q-series, theta and Weierstrass functions, Frobenius tensors,
//! K-lattice actions, elliptic Weyl invariants and Gamma periods.

pub mod config;
pub mod error;
pub mod frobenius_structure;
pub mod gamma_periods;
pub mod jet;
pub mod k_lattice;
pub mod modular_forms;
pub mod numeric;
pub mod suite;
pub mod theta_weierstrass;
pub mod weyl_invariants;

pub use config::SeriesConfig;
pub use error::{Error, Result};
pub use num_complex::Complex64;
