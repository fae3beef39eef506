//! Seeded verification suites. Each check reports a residual, a threshold
//! and a short description of the relation being tested.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SeriesConfig;
use crate::error::{Error, Result};
use crate::frobenius_structure::{
    canonical_coords, canonical_product_table, euler_multiplication, euler_potential_residual, frobenius_tensors,
    ll_fiber, ll_inverse, lyashko_looijenga, primitive_form_residuals, product_via_christoffel,
    product_via_critical_values_all, residue_pairing, residue_pairing_at_critical_points, residue_pairing_flat,
    residue_terms_at_critical_points,
    triple_distance, wdvv_residual, FlatPoint, ModuliPoint, Ordering, Tensor3c, ETA_FLAT,
};
use crate::gamma_periods::{
    asymptotic_fit, default_point, gamma_identities, gamma_identities_for, kclass_correspondence, GammaData,
    PeriodCombination, QuadConfig, DEFAULT_U_GRID,
};
use crate::k_lattice::{
    braid_to_sl2, chi_a_spectrum, enumerate_roots, euler_matrix, exponent_variance, group_relation_check,
    is_real_root, mutate, reflection, serre_matrix, simple_roots, twist_matrix, Basis, BraidWord, IntMatrix, KClass,
    RELATION_IDS,
};
use crate::modular_forms::HalfPlanePoint;
use crate::numeric::{c, det3, max_abs_diff3, scaled_diff, TWO_PI_I};
use crate::theta_weierstrass::{identity_residual, IdentitySample, IDENTITY_NAMES};
use crate::weyl_invariants::{
    apply_group, chevalley_residual, flat_point, invariance_residuals, invariant_jacobian, invariants,
    pullback_metric, Generator, GroupElement, TildeEPoint,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// Passes when residual <= threshold.
    Below,
    /// Passes when residual >= threshold.
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub bound: Bound,
    pub passed: bool,
    pub citation: String,
}

impl Check {
    pub fn below(name: impl Into<String>, residual: f64, threshold: f64, citation: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            residual,
            threshold,
            bound: Bound::Below,
            passed: residual <= threshold,
            citation: citation.into(),
        }
    }

    pub fn above(name: impl Into<String>, residual: f64, threshold: f64, citation: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            residual,
            threshold,
            bound: Bound::Above,
            passed: residual >= threshold,
            citation: citation.into(),
        }
    }

    /// Zero-tolerance check: residual counts mismatches.
    pub fn exact(name: impl Into<String>, ok: bool, citation: impl Into<String>) -> Self {
        Check::below(name, if ok { 0.0 } else { 1.0 }, 0.0, citation)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Identities,
    Frobenius,
    Lattice,
    Invariants,
    Gamma,
    All,
}

impl SuiteName {
    pub const PARTS: [SuiteName; 5] =
        [SuiteName::Identities, SuiteName::Frobenius, SuiteName::Lattice, SuiteName::Invariants, SuiteName::Gamma];

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::Identities => "identities",
            SuiteName::Frobenius => "frobenius",
            SuiteName::Lattice => "lattice",
            SuiteName::Invariants => "invariants",
            SuiteName::Gamma => "gamma",
            SuiteName::All => "all",
        }
    }
}

impl std::str::FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteName::PARTS
            .into_iter()
            .chain([SuiteName::All])
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    pub series: SeriesConfig,
    pub quad: QuadConfig,
    pub u_grid: Vec<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            samples: 100,
            series: SeriesConfig::default(),
            quad: QuadConfig::default(),
            u_grid: DEFAULT_U_GRID.to_vec(),
        }
    }
}

/// Per-combination summary of the period asymptotics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub combination: PeriodCombination,
    pub exponents: [f64; 2],
    pub u_grid: Vec<f64>,
    pub fitted: [Complex64; 2],
    pub richardson: Option<[Complex64; 2]>,
    pub quoted: [Complex64; 2],
    pub expanded: [Complex64; 2],
    pub rel_err_quoted: [f64; 2],
    pub rel_err_expanded: [f64; 2],
    pub fit_residual: f64,
    pub condition: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub seed: u64,
    pub samples: usize,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub fits: Vec<FitReport>,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub fn run_suite(name: SuiteName, cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.series.validate()?;
    cfg.quad.validate()?;
    if cfg.samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    let mut checks = Vec::new();
    let mut fits = Vec::new();
    let parts: Vec<SuiteName> = if name == SuiteName::All { SuiteName::PARTS.to_vec() } else { vec![name] };
    for part in parts {
        match part {
            SuiteName::Identities => checks.extend(identity_checks(cfg)),
            SuiteName::Frobenius => {
                checks.extend(primitive_checks(cfg));
                checks.extend(coherence_checks(cfg));
                checks.extend(pullback_checks(cfg));
                checks.extend(ll_checks(cfg));
            }
            SuiteName::Lattice => checks.extend(lattice_checks()?),
            SuiteName::Invariants => checks.extend(invariant_checks(cfg)),
            SuiteName::Gamma => {
                let (c, f) = gamma_checks(cfg)?;
                checks.extend(c);
                fits.extend(f);
            }
            SuiteName::All => unreachable!(),
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteReport { suite: name, seed: cfg.seed, samples: cfg.samples, passed, checks, fits })
}

/// One RNG stream per sampler, so suites draw the same points whichever run first.
fn rng_for(cfg: &SuiteConfig, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    rng
}

/// Max over samples; evaluation errors count as infinite residuals.
fn max_residual<T, F>(points: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> Result<f64> + Sync,
{
    let vals: Vec<f64> = points.par_iter().map(|p| f(p).unwrap_or(f64::INFINITY)).collect();
    vals.into_iter().fold(0.0, |a, b| if b.is_nan() { f64::INFINITY } else { a.max(b) })
}

fn random_tau(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.random_range(-0.5..0.5), rng.random_range(0.5..2.0))
}

/// Points of the torus at distance >= margin from the half-period lattice.
fn random_torus_point(rng: &mut ChaCha8Rng, tau: Complex64, margin: f64) -> Complex64 {
    loop {
        let z = c(rng.random_range(0.0..1.0), 0.0) + tau * rng.random_range(0.0..1.0);
        let near = (0..3).any(|m| (0..3).any(|n| (z - (tau * n as f64 + m as f64) * 0.5).norm() < margin));
        if !near {
            return z;
        }
    }
}

fn random_flat(rng: &mut ChaCha8Rng) -> Result<FlatPoint> {
    let tau = random_tau(rng);
    FlatPoint::new(
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        Complex64::from_polar(rng.random_range(0.3..1.5), rng.random_range(0.0..std::f64::consts::TAU)),
        HalfPlanePoint::new(tau)?,
    )
}

fn random_tilde(rng: &mut ChaCha8Rng) -> Result<TildeEPoint> {
    let tau = random_tau(rng);
    let x = random_torus_point(rng, tau, 0.05);
    let phi = c(rng.random_range(-1.0..1.0), rng.random_range(-0.3..0.3));
    Ok(TildeEPoint::new(phi, x, HalfPlanePoint::new(tau)?))
}

fn draw<T>(n: usize, rng: &mut ChaCha8Rng, mut f: impl FnMut(&mut ChaCha8Rng) -> Result<T>) -> Result<Vec<T>> {
    (0..n).map(|_| f(rng)).collect()
}

fn identity_citation(name: &str) -> &'static str {
    match name {
        "cubic_a" | "cubic_b" => "Weierstrass cubic relation for normalized p",
        "cubic_tilde_a" | "cubic_tilde_b" => "Weierstrass cubic relation in shifted form",
        "zeta_period_1" | "zeta_period_tau" => "quasi-periodicity of normalized zeta",
        "ring_e2" | "ring_e4" | "ring_e6" => "Ramanujan derivative ring of E2, E4, E6",
        "e2_third_derivative" => "third tau-derivative of E2 in the Eisenstein ring",
        "key_identity_1" | "key_identity_1_tilde" => "tau-derivative of shifted zeta",
        "key_identity_2" | "key_identity_2_tilde" => "tau-derivative of shifted p",
        "theta_quasi_periodicity" => "theta quasi-periodicity under lattice shifts",
        "theta_heat" => "heat equation for theta",
        "theta_e2" => "E2 from theta''' / theta' at the origin",
        "triple_product" => "Jacobi triple product",
        "theta_prime_eta" => "theta'(0) = -2 pi eta^3",
        _ => "special-function identity",
    }
}

pub const IDENTITY_TOL: f64 = 1e-8;

pub fn identity_checks(cfg: &SuiteConfig) -> Vec<Check> {
    let mut rng = rng_for(cfg, 1);
    let samples: Vec<IdentitySample> = (0..cfg.samples)
        .map(|_| {
            let tau = random_tau(&mut rng);
            let z = random_torus_point(&mut rng, tau, 0.05);
            let m = rng.random_range(-2..=2);
            let n = rng.random_range(-2..=2);
            IdentitySample { z, tau, m, n }
        })
        .collect();
    IDENTITY_NAMES
        .iter()
        .map(|name| {
            let r = max_residual(&samples, |s| identity_residual(name, *s, &cfg.series));
            Check::below(format!("identity/{name}"), r, IDENTITY_TOL, identity_citation(name))
        })
        .collect()
}

pub fn primitive_checks(cfg: &SuiteConfig) -> Vec<Check> {
    let mut rng = rng_for(cfg, 2);
    let pts = match draw(cfg.samples, &mut rng, |r| {
        let t = random_flat(r)?;
        let z = random_torus_point(r, t.tau.tau(), 0.05);
        Ok((t, z))
    }) {
        Ok(p) => p,
        Err(_) => return vec![Check::below("primitive/sampling", f64::INFINITY, 0.0, "sample generation")],
    };
    let mut out = Vec::new();
    for k in 0..3 {
        let r = max_residual(&pts, |(t, z)| Ok(primitive_form_residuals(*z, t, &cfg.series)?.identities[k]));
        out.push(Check::below(
            format!("primitive/identity_{}", k + 1),
            r,
            1e-8,
            "product of first derivatives of F decomposed into flat derivatives plus an exact term",
        ));
    }
    for k in 0..3 {
        let r = max_residual(&pts, |(t, z)| Ok(primitive_form_residuals(*z, t, &cfg.series)?.conditions[k]));
        out.push(Check::below(
            format!("primitive/dphi_dz_{}", k + 1),
            r,
            1e-7,
            "z-derivative of the exact-term coefficient equals a second flat derivative of F",
        ));
    }
    out
}

fn tensor_max(a: &Tensor3c, b: &Tensor3c) -> f64 {
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

fn tensor_scale(a: &Tensor3c) -> f64 {
    a.iter().flatten().flatten().map(|v| v.norm()).fold(1.0, f64::max)
}

pub fn coherence_checks(cfg: &SuiteConfig) -> Vec<Check> {
    let s = &cfg.series;
    let mut rng = rng_for(cfg, 3);
    let pts = match draw(cfg.samples, &mut rng, random_flat) {
        Ok(p) => p,
        Err(_) => return vec![Check::below("frobenius/sampling", f64::INFINITY, 0.0, "sample generation")],
    };
    let eta = max_residual(&pts, |t| Ok(max_abs_diff3(&residue_pairing_flat(t, s)?, &ETA_FLAT)));
    let eta_raw = max_residual(&pts, |t| {
        let m = ModuliPoint::from_flat(*t, s)?;
        let terms = residue_terms_at_critical_points(&m, s)?;
        let crit = residue_pairing_at_critical_points(&m, s)?;
        // relative to the size of the summands, which cancel near coincident critical values
        let mut scale: f64 = 1.0;
        for i in 0..3 {
            for j in 0..3 {
                scale = scale.max(terms.iter().map(|t| t[i][j].norm()).sum());
            }
        }
        Ok(max_abs_diff3(&residue_pairing(&m, s)?, &crit) / scale)
    });
    let products = max_residual(&pts, |t| {
        let pot = frobenius_tensors(t, s)?.c;
        let crit = product_via_critical_values_all(t, s)?;
        let gam = product_via_christoffel(t, s)?;
        Ok(tensor_max(&pot, &crit).max(tensor_max(&pot, &gam)) / tensor_scale(&pot))
    });
    let wdvv = max_residual(&pts, |t| wdvv_residual(t, s));
    let idem = max_residual(&pts, |t| {
        let tab = canonical_product_table(t, s)?;
        let mut w: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                for k in 0..3 {
                    let want = if a == b && b == k { 1.0 } else { 0.0 };
                    w = w.max((tab[a][b][k] - want).norm());
                }
            }
        }
        Ok(w)
    });
    let euler = max_residual(&pts, |t| euler_potential_residual(t, s));
    let det = max_residual(&pts, |t| {
        let tensors = frobenius_tensors(t, s)?;
        let d = det3(&euler_multiplication(t, &tensors));
        let u = canonical_coords(&ModuliPoint::from_flat(*t, s)?, s)?.as_array();
        Ok(scaled_diff(d, u[0] * u[1] * u[2]))
    });
    vec![
        Check::below("frobenius/eta_from_residues", eta, 1e-10, "residue pairing in flat coordinates is constant"),
        Check::below(
            "frobenius/residues_vs_critical_points",
            eta_raw,
            1e-10,
            "contour residue pairing equals the sum over critical points",
        ),
        Check::below(
            "frobenius/products_agree",
            products,
            1e-8,
            "product from potential, critical values and Christoffel symbols",
        ),
        Check::below("frobenius/wdvv", wdvv, 1e-9, "associativity of the potential"),
        Check::below("frobenius/idempotency", idem, 1e-9, "canonical frame is idempotent"),
        Check::below("frobenius/euler_homogeneity", euler, 1e-12, "E(F) = 2F"),
        Check::below("frobenius/det_euler_product", det, 1e-8, "det of E-multiplication equals u1 u2 u3"),
    ]
}

pub fn pullback_checks(cfg: &SuiteConfig) -> Vec<Check> {
    let s = &cfg.series;
    let mut rng = rng_for(cfg, 4);
    let pts = match draw(cfg.samples, &mut rng, random_tilde) {
        Ok(p) => p,
        Err(_) => return vec![Check::below("frobenius/sampling", f64::INFINITY, 0.0, "sample generation")],
    };
    let r = max_residual(&pts, |p| {
        let t = flat_point(p, s)?;
        let closed = frobenius_tensors(&t, s)?.g;
        let scale = closed.iter().flatten().map(|v| v.norm()).fold(1.0, f64::max);
        Ok(max_abs_diff3(&pullback_metric(p, s)?, &closed) / scale)
    });
    vec![Check::below(
        "frobenius/weyl_pullback_metric",
        r,
        1e-7,
        "invariant-theory metric pulled to flat coordinates equals the intersection form",
    )]
}

pub const LL_POINTS: usize = 20;

pub fn ll_checks(cfg: &SuiteConfig) -> Vec<Check> {
    let s = &cfg.series;
    let mut rng = rng_for(cfg, 5);
    let n = cfg.samples.min(LL_POINTS);
    let pts = match draw(n, &mut rng, |r| {
        let tau = c(r.random_range(-0.5..0.5), r.random_range(0.9..1.6));
        let s2 = Complex64::from_polar(r.random_range(0.5..1.5), r.random_range(0.0..std::f64::consts::TAU));
        ModuliPoint::new(c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)), s2, HalfPlanePoint::new(tau)?, s)
    }) {
        Ok(p) => p,
        Err(_) => return vec![Check::below("ll/sampling", f64::INFINITY, 0.0, "sample generation")],
    };
    let round = max_residual(&pts, |p| {
        let u = lyashko_looijenga(p, s)?;
        let back = ll_inverse(u, Ordering::Auto, s)?;
        let u2 = lyashko_looijenga(&back, s)?;
        let scale = u.iter().map(|v| v.norm()).fold(1.0, f64::max);
        Ok(triple_distance(&u, &u2) / scale)
    });
    let fiber = max_residual(&pts, |p| Ok((ll_fiber(lyashko_looijenga(p, s)?, s)?.len() as f64 - 1.0).abs()));
    vec![
        Check::below("ll/round_trip", round, 1e-6, "forward, inverse, forward of the critical-value map"),
        Check::below("ll/fiber_size", fiber, 0.0, "one modular orbit per generic fiber"),
    ]
}

pub fn lattice_checks() -> Result<Vec<Check>> {
    let m = IntMatrix::from_rows;
    let mut out = Vec::new();
    out.push(Check::exact(
        "lattice/euler_s",
        euler_matrix(Basis::S)? == m([[1, -2, 2], [0, 1, -2], [0, 0, 1]]),
        "Euler form on simple modules",
    ));
    out.push(Check::exact(
        "lattice/euler_p",
        euler_matrix(Basis::P)? == m([[1, 2, 2], [0, 1, 2], [0, 0, 1]]),
        "Euler form on projectives",
    ));
    out.push(Check::exact(
        "lattice/euler_r",
        euler_matrix(Basis::R)? == m([[1, 0, 0], [0, 0, 1], [0, -1, 0]]),
        "Euler form on (alpha, delta1, delta2)",
    ));
    let serre_r = serre_matrix(Basis::R)?.matrix;
    let serre_p = serre_matrix(Basis::P)?.matrix;
    out.push(Check::exact(
        "lattice/serre_involution",
        serre_p.mul(&serre_p)? == IntMatrix::identity(3) && serre_r.mul(&serre_r)? == IntMatrix::identity(3),
        "Serre functor squares to the identity on K-classes",
    ));
    out.push(Check::exact(
        "lattice/serre_r_basis",
        serre_r == m([[1, 0, 0], [0, -1, 0], [0, 0, -1]]),
        "Serre matrix diag(1, -1, -1) on (alpha, delta1, delta2)",
    ));
    let t1 = twist_matrix(&[KClass::delta1()], Basis::R)?.matrix;
    let t2 = twist_matrix(&[KClass::delta2()], Basis::R)?.matrix;
    out.push(Check::exact(
        "lattice/twist_inverses",
        t1.inverse()? == m([[1, 0, 0], [0, 1, 1], [0, 0, 1]]) && t2.inverse()? == m([[1, 0, 0], [0, 1, 0], [0, -1, 1]]),
        "inverse spherical twists act by elementary SL(2, Z) matrices on (delta1, delta2)",
    ));
    out.push(Check::exact(
        "lattice/twist_braid_relation",
        t1.mul(&t2)?.mul(&t1)? == t2.mul(&t1)?.mul(&t2)?,
        "spherical twists satisfy the braid relation",
    ));
    out.push(Check::exact(
        "lattice/twist_product_cubed",
        t1.mul(&t2)?.pow(-3)? == serre_r,
        "(T1 T2)^-3 is the Serre matrix",
    ));
    let pair = twist_matrix(&[KClass::alpha(), KClass::alpha()], Basis::R)?.matrix;
    out.push(Check::exact(
        "lattice/pair_twist",
        pair == serre_r.inverse()?.neg()?,
        "twist by the exceptional pair equals minus the inverse Serre matrix",
    ));
    let six: BraidWord = "s1 s2 ".repeat(6).parse()?;
    out.push(Check::exact(
        "lattice/braid_sl2_center",
        braid_to_sl2(&six)? == IntMatrix::identity(2),
        "(s1 s2)^6 maps to the identity of SL(2, Z)",
    ));
    let proj = [KClass::projective(3), KClass::projective(2), KClass::projective(1)];
    out.push(Check::exact(
        "lattice/braid_relation_on_triples",
        mutate(proj, &"s1 s2 s1".parse()?)? == mutate(proj, &"s2 s1 s2".parse()?)?,
        "mutations of exceptional triples satisfy the braid relation",
    ));
    let roots = enumerate_roots(6);
    let simple = simple_roots().map(|r| reflection(&r).map(|m| m.matrix)).into_iter().collect::<Result<Vec<_>>>()?;
    let mut closed = true;
    for r in &roots {
        for s in &simple {
            let v = s.apply(&r.coords)?;
            if !is_real_root(&KClass::new([v[0], v[1], v[2]], Basis::R))? {
                closed = false;
            }
        }
    }
    out.push(Check::exact(
        "lattice/root_closure_height_6",
        closed,
        "simple reflections preserve the real roots up to height 6",
    ));
    for id in RELATION_IDS {
        out.push(Check::exact(format!("lattice/relation/{id}"), group_relation_check(id)?, "Weyl group relation"));
    }
    for a in [0.0, 0.5, 1.0, 1.5, 2.0] {
        let sp = chi_a_spectrum(a)?;
        let r = (0..4).map(|k| (sp.char_poly[k] - sp.factored[k]).abs()).fold(0.0, f64::max);
        out.push(Check::below(
            format!("lattice/chi_a_polynomial/{a}"),
            r,
            0.0,
            "characteristic polynomial (t - 1)(t^2 - (a^3 - 3a^2 + 2) t + 1)",
        ));
    }
    let sp = chi_a_spectrum(2.0)?;
    out.push(Check::below(
        "lattice/exponent_variance",
        (exponent_variance(&sp.phases) - 0.5).abs(),
        0.0,
        "exponents 0, 1/2, -1/2 have variance 1/2",
    ));
    Ok(out)
}

fn scale_of(vals: &[Complex64]) -> f64 {
    vals.iter().map(|v| v.norm()).fold(1.0, f64::max)
}

pub fn invariant_checks(cfg: &SuiteConfig) -> Vec<Check> {
    let s = &cfg.series;
    let mut rng = rng_for(cfg, 6);
    let pts = match draw(cfg.samples, &mut rng, random_tilde) {
        Ok(p) => p,
        Err(_) => return vec![Check::below("invariants/sampling", f64::INFINITY, 0.0, "sample generation")],
    };
    let mut out = Vec::new();
    let chev = max_residual(&pts, |p| chevalley_residual(p, s));
    out.push(Check::below("invariants/chevalley", chev, 1e-8, "J^2 is a cubic in y1 with coefficients in y2, E4, E6"));
    for g in Generator::ALL {
        let el = GroupElement::generator(g);
        let r = max_residual(&pts, |p| {
            let v = invariants(p, s)?;
            let d = invariance_residuals(p, &el, s)?;
            Ok(d.dy1.max(d.dy2).max(d.dy3).max(d.dj) / scale_of(&[v.y1, v.y2, v.y3, v.j]))
        });
        out.push(Check::below(
            format!("invariants/generator/{}", el),
            r,
            1e-8,
            "y1, y2, y3 invariant and J anti-invariant under the generator",
        ));
    }
    let modular = [(1, 1, 0, 1), (0, -1, 1, 0), (1, 0, 1, 1), (2, 1, 1, 1)]
        .map(|(a, b, cc, d)| GroupElement::modular(a, b, cc, d).expect("determinant one"));
    let sl2 = max_residual(&pts, |p| {
        let v = invariants(p, s)?;
        let mut w: f64 = 0.0;
        for g in &modular {
            if apply_group(g, *p)?.tau.tau().im < 0.35 {
                continue;
            }
            w = w.max(invariance_residuals(p, g, s)?.dy2 / scale_of(&[v.y2]));
        }
        Ok(w)
    });
    out.push(Check::below("invariants/sl2_y2", sl2, 1e-8, "y2 is a Jacobi form of weight -1"));
    let jac = max_residual(&pts, |p| {
        let d = det3(&invariant_jacobian(p, s)?);
        Ok(scaled_diff(d, TWO_PI_I.powi(3) * invariants(p, s)?.j))
    });
    out.push(Check::below("invariants/jacobian", jac, 1e-7, "dy1 ^ dy2 ^ dy3 = (2 pi i)^3 J"));
    out
}

pub const GAMMA_IDENTITY_TOL: f64 = 1e-12;
pub const FIT_TOL: f64 = 1e-2;
pub const RICHARDSON_TOL: f64 = 1e-3;

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

pub fn gamma_checks(cfg: &SuiteConfig) -> Result<(Vec<Check>, Vec<FitReport>)> {
    let s = &cfg.series;
    let mut out = Vec::new();
    let r = gamma_identities()?;
    out.push(Check::below(
        "gamma/serre_conjugation",
        r.serre,
        GAMMA_IDENTITY_TOL,
        "normalized ch_gamma conjugates e[Q] to chi^-1 chi^T",
    ));
    out.push(Check::below(
        "gamma/euler_pairing",
        r.euler,
        GAMMA_IDENTITY_TOL,
        "ch_gamma^T e[Q/2] eta ch_gamma / 2 pi equals chi",
    ));
    let mut flat_q = GammaData::new()?;
    flat_q.q = [0.0; 3];
    out.push(Check::above(
        "gamma/degree_operator_sensitivity",
        gamma_identities_for(&flat_q)?.serre,
        0.5,
        "dropping the degree operator breaks the conjugation identity",
    ));
    for row in kclass_correspondence()? {
        out.push(Check::below(
            format!("gamma/kclass/{}", row.label),
            row.residual,
            GAMMA_IDENTITY_TOL,
            "ch_gamma image of the cycle class",
        ));
    }
    let t = default_point()?;
    let mut fits = Vec::new();
    for comb in PeriodCombination::ALL {
        let f = asymptotic_fit(comb, &t, &cfg.u_grid, &cfg.quad, s)?;
        let quoted = comb.quoted_coefficients(&t);
        let expanded = comb.expanded_coefficients(&t, s)?;
        let (est, tol, how) = match f.richardson {
            Some(r) => (r, RICHARDSON_TOL, "richardson"),
            None => ([f.leading, f.subleading], FIT_TOL, "fit"),
        };
        let id = comb.id();
        out.push(Check::below(
            format!("gamma/{id}/leading/{how}"),
            rel(est[0], quoted[0]),
            tol,
            "leading large-u coefficient of the exponential period",
        ));
        out.push(Check::below(
            format!("gamma/{id}/subleading_quoted/{how}"),
            rel(est[1], quoted[1]),
            tol,
            "subleading coefficient against the quoted expansion",
        ));
        out.push(Check::below(
            format!("gamma/{id}/subleading_expanded/{how}"),
            rel(est[1], expanded[1]),
            tol,
            "subleading coefficient against the first-order expansion of exp(-F/u)",
        ));
        out.push(Check::below(
            format!("gamma/{id}/fit_residual"),
            f.residual / expanded[0].norm(),
            1e-3,
            "two-term model with the stated exponents",
        ));
        fits.push(FitReport {
            combination: comb,
            exponents: f.exponents,
            u_grid: f.u_grid.clone(),
            fitted: [f.leading, f.subleading],
            richardson: f.richardson,
            quoted,
            expanded,
            rel_err_quoted: [rel(est[0], quoted[0]), rel(est[1], quoted[1])],
            rel_err_expanded: [rel(est[0], expanded[0]), rel(est[1], expanded[1])],
            fit_residual: f.residual,
            condition: f.condition,
        });
    }
    Ok((out, fits))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig { samples: 4, seed: 3, ..SuiteConfig::default() }
    }

    #[test]
    fn suite_names_round_trip() {
        for n in SuiteName::PARTS.into_iter().chain([SuiteName::All]) {
            assert_eq!(n.as_str().parse::<SuiteName>().unwrap(), n);
        }
        assert!("bogus".parse::<SuiteName>().is_err());
    }

    #[test]
    fn lattice_suite_is_exact_and_green() {
        let r = run_suite(SuiteName::Lattice, &small()).unwrap();
        assert!(r.passed, "{:?}", r.failures().collect::<Vec<_>>());
        assert!(r.checks.iter().all(|c| c.threshold == 0.0));
    }

    #[test]
    fn identity_suite_small() {
        let r = run_suite(SuiteName::Identities, &small()).unwrap();
        assert!(r.passed, "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.checks.len(), IDENTITY_NAMES.len());
    }

    #[test]
    fn same_seed_same_report() {
        let a = serde_json::to_string(&run_suite(SuiteName::Invariants, &small()).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite(SuiteName::Invariants, &small()).unwrap()).unwrap();
        assert_eq!(a, b);
        let other = SuiteConfig { seed: 4, ..small() };
        let c = serde_json::to_string(&run_suite(SuiteName::Invariants, &other).unwrap()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_samples_is_a_config_error() {
        let cfg = SuiteConfig { samples: 0, ..SuiteConfig::default() };
        assert!(matches!(run_suite(SuiteName::Identities, &cfg), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn above_bound_semantics() {
        assert!(Check::above("x", 0.7, 0.5, "").passed);
        assert!(!Check::above("x", 0.3, 0.5, "").passed);
        assert!(!Check::below("x", f64::INFINITY, 1.0, "").passed);
    }
}
