//! Python bindings: a handful of evaluators plus the verification suites.

use std::str::FromStr;

use nodal::frobenius_structure::{self as frob, FlatPoint, ModuliPoint, Ordering};
use nodal::k_lattice::{enumerate_roots, mutate, Basis, BraidWord, KClass};
use nodal::modular_forms::{self as mf, HalfPlanePoint};
use nodal::suite::{run_suite, SuiteConfig, SuiteName};
use nodal::theta_weierstrass::{self as tw, TorusPoint, WeierstrassKind};
use nodal::{Complex64, SeriesConfig};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: nodal::Error) -> PyErr {
    use nodal::Error::*;
    match e {
        InvalidInput(_) | BelowImMin { .. } | Parse(_) | PoleTooClose { .. } | NotExceptional | UnknownIdentity(_)
        | UnknownRelation(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn tau_of(tau: Complex64) -> PyResult<HalfPlanePoint> {
    HalfPlanePoint::new(tau).map_err(err)
}

/// Normalized Eisenstein series E2, E4 or E6.
#[pyfunction]
fn eisenstein(weight: u32, tau: Complex64) -> PyResult<Complex64> {
    mf::eisenstein(weight, tau_of(tau)?, &SeriesConfig::default()).map_err(err)
}

#[pyfunction]
fn dedekind_eta(tau: Complex64) -> PyResult<Complex64> {
    mf::dedekind_eta(tau_of(tau)?, &SeriesConfig::default()).map_err(err)
}

/// Normalized Weierstrass p at z.
#[pyfunction]
fn wp(z: Complex64, tau: Complex64) -> PyResult<Complex64> {
    tw::weierstrass(WeierstrassKind::P, TorusPoint::new(z, tau_of(tau)?), &SeriesConfig::default()).map_err(err)
}

/// p at 1/2, (1 + tau)/2, tau/2.
#[pyfunction]
fn half_periods(tau: Complex64) -> PyResult<(Complex64, Complex64, Complex64)> {
    let h = tw::half_periods(tau_of(tau)?, &SeriesConfig::default()).map_err(err)?;
    Ok((h.e1, h.e2, h.e3))
}

#[pyfunction]
fn potential(t1: Complex64, t2: Complex64, tau: Complex64) -> PyResult<Complex64> {
    let cfg = SeriesConfig::default();
    let t = FlatPoint::new(t1, t2, tau_of(tau)?).map_err(err)?;
    Ok(frob::potential(&t, &mf::ModularValues::at(t.tau, &cfg).map_err(err)?))
}

/// Sorted critical values at raw coordinates (s1, s2, tau).
#[pyfunction]
fn lyashko_looijenga(s1: Complex64, s2: Complex64, tau: Complex64) -> PyResult<Vec<Complex64>> {
    let cfg = SeriesConfig::default();
    let p = ModuliPoint::new(s1, s2, tau_of(tau)?, &cfg).map_err(err)?;
    Ok(frob::lyashko_looijenga(&p, &cfg).map_err(err)?.to_vec())
}

/// Raw coordinates (s1, s2, tau) with the given critical values.
#[pyfunction]
fn ll_inverse(u1: Complex64, u2: Complex64, u3: Complex64) -> PyResult<(Complex64, Complex64, Complex64)> {
    let p = frob::ll_inverse([u1, u2, u3], Ordering::Auto, &SeriesConfig::default()).map_err(err)?;
    Ok((p.s1, p.s2, p.tau.tau()))
}

/// Applies a braid word to (P3, P2, P1); returns P coordinates.
#[pyfunction]
fn braid(word: &str) -> PyResult<Vec<[i64; 3]>> {
    let w = BraidWord::from_str(word).map_err(err)?;
    let start = [KClass::projective(3), KClass::projective(2), KClass::projective(1)];
    let out = mutate(start, &w).map_err(err)?;
    out.iter().map(|x| x.in_basis(Basis::P).map(|k| k.coords).map_err(err)).collect()
}

/// Real roots with |p|, |q| <= bound as (alpha, delta1, delta2) coordinates.
#[pyfunction]
fn real_roots(bound: u32) -> PyResult<Vec<[i64; 3]>> {
    enumerate_roots(bound).iter().map(|x| x.in_basis(Basis::R).map(|k| k.coords).map_err(err)).collect()
}

/// Runs a verification suite and returns the report as a JSON string.
#[pyfunction]
#[pyo3(signature = (name, seed = 0, samples = 100))]
fn verify(name: &str, seed: u64, samples: usize) -> PyResult<String> {
    let cfg = SuiteConfig { seed, samples, ..SuiteConfig::default() };
    let report = run_suite(SuiteName::from_str(name).map_err(err)?, &cfg).map_err(err)?;
    serde_json::to_string(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn nodal_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(eisenstein, m)?)?;
    m.add_function(wrap_pyfunction!(dedekind_eta, m)?)?;
    m.add_function(wrap_pyfunction!(wp, m)?)?;
    m.add_function(wrap_pyfunction!(half_periods, m)?)?;
    m.add_function(wrap_pyfunction!(potential, m)?)?;
    m.add_function(wrap_pyfunction!(lyashko_looijenga, m)?)?;
    m.add_function(wrap_pyfunction!(ll_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(braid, m)?)?;
    m.add_function(wrap_pyfunction!(real_roots, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
