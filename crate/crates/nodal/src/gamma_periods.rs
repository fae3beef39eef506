//! Gamma-integral-structure matrices, exponential periods of the unfolding
//! along three cycles, and extraction of their large-u asymptotics.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SeriesConfig;
use crate::error::{Error, Result};
use crate::frobenius_structure::{FlatPoint, Matrix3c, ModuliPoint};
use crate::k_lattice::{euler_matrix, Basis, KClass};
use crate::modular_forms::e_of;
use crate::numeric::{c, cr, TWO_PI_I};
use crate::theta_weierstrass::WeierstrassContext;

type M3 = Matrix3<Complex64>;

/// Constant data of the Gamma-integral structure in the basis (P3, P2, P1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaData {
    pub ch_gamma: Matrix3c,
    /// Diagonal of the degree operator.
    pub q: [f64; 3],
    pub chi_p: [[i64; 3]; 3],
    pub eta_flat: [[f64; 3]; 3],
}

impl GammaData {
    pub fn new() -> Result<Self> {
        let sp = cr(PI.sqrt());
        let z = cr(0.0);
        let o = cr(1.0);
        let chi = euler_matrix(Basis::P)?;
        let mut chi_p = [[0; 3]; 3];
        for (i, row) in chi_p.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = chi.get(i, j);
            }
        }
        Ok(GammaData {
            ch_gamma: [[o, o, z], [sp, sp, sp], [z, TWO_PI_I, TWO_PI_I]],
            q: [-0.5, 0.0, 0.5],
            chi_p,
            eta_flat: [[0.0, 0.0, 1.0], [0.0, 2.0, 0.0], [1.0, 0.0, 0.0]],
        })
    }

    /// (2 pi)^(-1/2) ch_gamma.
    fn central(&self) -> M3 {
        to_m3(&self.ch_gamma) / cr((2.0 * PI).sqrt())
    }

    fn e_q(&self, scale: f64) -> M3 {
        M3::from_diagonal(&nalgebra::Vector3::new(
            e_of(cr(scale * self.q[0])),
            e_of(cr(scale * self.q[1])),
            e_of(cr(scale * self.q[2])),
        ))
    }

    fn chi(&self) -> M3 {
        M3::from_fn(|i, j| cr(self.chi_p[i][j] as f64))
    }

    /// Image of a K-class under ch_gamma.
    pub fn apply(&self, x: &KClass) -> Result<[Complex64; 3]> {
        let v = x.in_basis(Basis::P)?.coords;
        let mut out = [cr(0.0); 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|j| self.ch_gamma[i][j] * v[j] as f64).sum();
        }
        Ok(out)
    }
}

fn to_m3(m: &Matrix3c) -> M3 {
    M3::from_fn(|i, j| m[i][j])
}

fn max_entry(m: &M3) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaResiduals {
    /// Conjugated e[Q] against chi^-1 chi^T.
    pub serre: f64,
    /// Twisted pairing against chi.
    pub euler: f64,
}

pub fn gamma_identities() -> Result<GammaResiduals> {
    gamma_identities_for(&GammaData::new()?)
}

/// Both residuals for arbitrary data, so that perturbed degree operators can be probed.
pub fn gamma_identities_for(d: &GammaData) -> Result<GammaResiduals> {
    let a = d.central();
    let a_inv = a.try_inverse().ok_or(Error::DegenerateJacobian(0.0))?;
    let chi = d.chi();
    let chi_inv = chi.try_inverse().ok_or(Error::NotInvertible)?;
    let serre = a_inv * d.e_q(1.0) * a - chi_inv * chi.transpose();
    let eta = M3::from_fn(|i, j| cr(d.eta_flat[i][j]));
    let euler = a.transpose() * d.e_q(0.5) * eta * a - chi;
    Ok(GammaResiduals { serre: max_entry(&serre), euler: max_entry(&euler) })
}

/// Straight integration segments in the z-plane, endpoints affine in tau.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CyclePath {
    Path1,
    Path2a,
    Path2b,
    Path3,
}

impl CyclePath {
    pub const ALL: [CyclePath; 4] = [CyclePath::Path1, CyclePath::Path2a, CyclePath::Path2b, CyclePath::Path3];

    pub fn id(&self) -> &'static str {
        match self {
            CyclePath::Path1 => "path1",
            CyclePath::Path2a => "path2a",
            CyclePath::Path2b => "path2b",
            CyclePath::Path3 => "path3",
        }
    }

    pub fn endpoints(&self, tau: Complex64) -> (Complex64, Complex64) {
        let h = cr(0.5);
        match self {
            CyclePath::Path1 | CyclePath::Path2b => (h, h + tau),
            CyclePath::Path2a => (cr(0.0), tau),
            CyclePath::Path3 => (tau * 0.5, tau * 0.5 + 1.0),
        }
    }

    /// Whether the endpoints sit on the pole lattice.
    pub fn ends_on_poles(&self) -> bool {
        matches!(self, CyclePath::Path2a)
    }
}

impl std::str::FromStr for CyclePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CyclePath::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| Error::Parse(format!("unknown path `{s}`")))
    }
}

/// Composite Gauss-Legendre settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Nodes per panel.
    pub n_quad: usize,
    /// Panels in the first pass.
    pub panels: usize,
    /// Largest panel count tried before giving up.
    pub max_panels: usize,
    /// Largest change under panel doubling that counts as converged.
    pub quad_tol: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { n_quad: 20, panels: 8, max_panels: 1024, quad_tol: 1e-10 }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_quad == 0 || self.panels == 0 || self.max_panels < self.panels {
            return Err(Error::InvalidInput("quadrature needs n_quad, panels > 0 and max_panels >= panels".into()));
        }
        if !(self.quad_tol > 0.0) {
            return Err(Error::InvalidInput("quad_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodValue {
    pub value: Complex64,
    /// Change under the last panel doubling.
    pub error: f64,
    pub panels: usize,
}

fn check_chamber(t: &FlatPoint, u: f64) -> Result<()> {
    let tau = t.tau.tau();
    if !(t.t2.re > 0.0) || t.t2.im.abs() > 1e-14 * t.t2.re.max(1.0) {
        return Err(Error::InvalidInput("exponential periods need t2 real and positive".into()));
    }
    if tau.re.abs() > 1e-14 * tau.im.max(1.0) {
        return Err(Error::InvalidInput("exponential periods need tau on the positive imaginary axis".into()));
    }
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::InvalidInput(format!("u = {u} must be positive")));
    }
    Ok(())
}

struct Integrand<'a> {
    ctx: WeierstrassContext,
    t: &'a FlatPoint,
    u: f64,
    cfg: &'a SeriesConfig,
    zero_at_poles: bool,
}

impl Integrand<'_> {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        let wp = self.ctx.eval_unchecked(z, self.cfg)?.wp;
        let f = self.t.t2 * self.t.t2 * (wp - self.ctx.e2 / 12.0) + self.t.t1;
        let w = (-f / self.u).exp();
        if w.is_finite() {
            Ok(w)
        } else if self.zero_at_poles && (f.re.is_infinite() || f.re > 0.0 || f.is_nan()) {
            // exp(-F/u) has limit 0 at the pole endpoints
            Ok(cr(0.0))
        } else {
            Err(Error::NonConvergence { what: "exponential period integrand", terms: 0 })
        }
    }

    fn composite(&self, a: Complex64, b: Complex64, rule: &GaussLegendre, panels: usize) -> Result<Complex64> {
        let len = (b - a) / panels as f64;
        let parts: Vec<Result<Complex64>> = (0..panels)
            .into_par_iter()
            .map(|k| {
                let lo = a + len * k as f64;
                let mut s = cr(0.0);
                for &(x, w) in rule.as_node_weight_pairs() {
                    s += self.eval(lo + len * (0.5 * (x + 1.0)))? * (0.5 * w);
                }
                Ok(s * len)
            })
            .collect();
        let mut total = cr(0.0);
        for p in parts {
            total += p?;
        }
        Ok(total)
    }
}

/// u^(-1/2) (2 pi i) times the integral of exp(-F/u) dz along the path.
pub fn exponential_period(
    path: CyclePath,
    t: &FlatPoint,
    u: f64,
    quad: &QuadConfig,
    cfg: &SeriesConfig,
) -> Result<PeriodValue> {
    check_chamber(t, u)?;
    quad.validate()?;
    let integrand =
        Integrand { ctx: WeierstrassContext::new(t.tau, cfg)?, t, u, cfg, zero_at_poles: path.ends_on_poles() };
    let rule = GaussLegendre::new(NonZeroUsize::new(quad.n_quad).expect("validated"));
    let (a, b) = path.endpoints(t.tau.tau());
    let scale = TWO_PI_I / u.sqrt();
    let mut panels = quad.panels;
    let mut prev = integrand.composite(a, b, &rule, panels)? * scale;
    let mut change = f64::INFINITY;
    while panels < quad.max_panels {
        panels *= 2;
        let next = integrand.composite(a, b, &rule, panels)? * scale;
        change = (next - prev).norm();
        prev = next;
        if change <= quad.quad_tol {
            return Ok(PeriodValue { value: prev, error: change, panels });
        }
    }
    Err(Error::QuadratureUnconverged { change })
}

/// The three period combinations whose expansions fix ch_gamma.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PeriodCombination {
    /// Minus the path1 period.
    NegPath1,
    /// path2a minus path2b.
    Path2Difference,
    Path3,
}

impl PeriodCombination {
    pub const ALL: [PeriodCombination; 3] =
        [PeriodCombination::NegPath1, PeriodCombination::Path2Difference, PeriodCombination::Path3];

    pub fn id(&self) -> &'static str {
        match self {
            PeriodCombination::NegPath1 => "neg-path1",
            PeriodCombination::Path2Difference => "path2a-minus-path2b",
            PeriodCombination::Path3 => "path3",
        }
    }

    /// Powers of 1/u in the two-term model.
    pub fn exponents(&self) -> [f64; 2] {
        match self {
            PeriodCombination::Path2Difference => [1.0, 2.0],
            _ => [0.5, 1.5],
        }
    }

    /// Leading and subleading coefficients as quoted with the cycle expansions.
    pub fn quoted_coefficients(&self, t: &FlatPoint) -> [Complex64; 2] {
        let tau = t.tau.tau();
        let sp = PI.sqrt();
        match self {
            PeriodCombination::NegPath1 => [-TWO_PI_I * tau, -(TWO_PI_I * tau * t.t1 + t.t2 * t.t2)],
            PeriodCombination::Path2Difference => [t.t2 * 2.0 * sp, -t.t2 * t.t1 * 2.0 * sp],
            PeriodCombination::Path3 => [TWO_PI_I, -TWO_PI_I * t.t1],
        }
    }

    /// Coefficients from expanding exp(-F/u). The path1 subleading term has the
    /// opposite sign to the quoted one, and the path2 subleading term sees the
    /// constant term s1 = t1 - t2^2 E2 / 12 of F at the poles rather than t1.
    pub fn expanded_coefficients(&self, t: &FlatPoint, cfg: &SeriesConfig) -> Result<[Complex64; 2]> {
        let q = self.quoted_coefficients(t);
        Ok(match self {
            PeriodCombination::NegPath1 => [q[0], -q[1]],
            PeriodCombination::Path2Difference => {
                let s1 = ModuliPoint::from_flat(*t, cfg)?.s1;
                [q[0], -t.t2 * s1 * 2.0 * PI.sqrt()]
            }
            PeriodCombination::Path3 => q,
        })
    }

    pub fn evaluate(&self, t: &FlatPoint, u: f64, quad: &QuadConfig, cfg: &SeriesConfig) -> Result<PeriodValue> {
        let single = |p| exponential_period(p, t, u, quad, cfg);
        Ok(match self {
            PeriodCombination::NegPath1 => {
                let v = single(CyclePath::Path1)?;
                PeriodValue { value: -v.value, ..v }
            }
            PeriodCombination::Path2Difference => {
                let a = single(CyclePath::Path2a)?;
                let b = single(CyclePath::Path2b)?;
                PeriodValue { value: a.value - b.value, error: a.error + b.error, panels: a.panels.max(b.panels) }
            }
            PeriodCombination::Path3 => single(CyclePath::Path3)?,
        })
    }
}

impl std::str::FromStr for PeriodCombination {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PeriodCombination::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| Error::Parse(format!("unknown period combination `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub combination: PeriodCombination,
    pub exponents: [f64; 2],
    pub u_grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub leading: Complex64,
    pub subleading: Complex64,
    /// Largest misfit of u^p I(u) against the two-term model.
    pub residual: f64,
    pub condition: f64,
    /// Polynomial extrapolation in 1/u through every grid point; present on geometric grids.
    pub richardson: Option<[Complex64; 2]>,
}

pub const MAX_CONDITION: f64 = 1e8;

fn validate_grid(u_grid: &[f64]) -> Result<()> {
    if u_grid.len() < 3 {
        return Err(Error::InvalidInput("u-grid needs at least 3 values".into()));
    }
    if u_grid.iter().any(|u| !(*u > 0.0) || !u.is_finite()) {
        return Err(Error::InvalidInput("u-grid values must be positive".into()));
    }
    Ok(())
}

fn is_geometric(u_grid: &[f64]) -> bool {
    let r = u_grid[1] / u_grid[0];
    r > 1.0 && u_grid.windows(2).all(|w| ((w[1] / w[0]) - r).abs() < 1e-12 * r)
}

/// Least-squares fit of u^p I(u) = leading + subleading / u.
pub fn fit_two_term(u_grid: &[f64], scaled: &[Complex64]) -> Result<(Complex64, Complex64, f64, f64)> {
    let n = u_grid.len();
    let a = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { 1.0 / u_grid[i] });
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let cond = sv.max() / sv.min();
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(Error::IllConditioned { cond });
    }
    let rhs = DMatrix::from_fn(n, 2, |i, j| if j == 0 { scaled[i].re } else { scaled[i].im });
    let x = svd.solve(&rhs, 0.0).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let lead = c(x[(0, 0)], x[(0, 1)]);
    let sub = c(x[(1, 0)], x[(1, 1)]);
    let residual =
        (0..n).map(|i| (scaled[i] - lead - sub / u_grid[i]).norm()).fold(0.0, f64::max);
    Ok((lead, sub, residual, cond))
}

/// Constant and linear coefficient of the interpolating polynomial in 1/u.
pub fn richardson(u_grid: &[f64], scaled: &[Complex64]) -> Result<[Complex64; 2]> {
    let n = u_grid.len();
    let v = DMatrix::from_fn(n, n, |i, j| (1.0 / u_grid[i]).powi(j as i32));
    let lu = v.lu();
    let mut out = [cr(0.0); 2];
    let re = nalgebra::DVector::from_iterator(n, scaled.iter().map(|z| z.re));
    let im = nalgebra::DVector::from_iterator(n, scaled.iter().map(|z| z.im));
    let xr = lu.solve(&re).ok_or(Error::IllConditioned { cond: f64::INFINITY })?;
    let xi = lu.solve(&im).ok_or(Error::IllConditioned { cond: f64::INFINITY })?;
    for (k, o) in out.iter_mut().enumerate() {
        *o = c(xr[k], xi[k]);
    }
    Ok(out)
}

pub fn asymptotic_fit(
    combination: PeriodCombination,
    t: &FlatPoint,
    u_grid: &[f64],
    quad: &QuadConfig,
    cfg: &SeriesConfig,
) -> Result<AsymptoticFit> {
    validate_grid(u_grid)?;
    let values = u_grid
        .par_iter()
        .map(|&u| combination.evaluate(t, u, quad, cfg).map(|v| v.value))
        .collect::<Result<Vec<_>>>()?;
    let p = combination.exponents()[0];
    let scaled: Vec<Complex64> = u_grid.iter().zip(&values).map(|(u, v)| v * u.powf(p)).collect();
    let (leading, subleading, residual, condition) = fit_two_term(u_grid, &scaled)?;
    let richardson = if is_geometric(u_grid) { Some(richardson(u_grid, &scaled)?) } else { None };
    Ok(AsymptoticFit {
        combination,
        exponents: combination.exponents(),
        u_grid: u_grid.to_vec(),
        values,
        leading,
        subleading,
        residual,
        condition,
        richardson,
    })
}

/// A cycle class with its quoted image and the image under ch_gamma.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KClassImage {
    pub label: &'static str,
    pub class: KClass,
    pub quoted: [Complex64; 3],
    pub computed: [Complex64; 3],
    pub residual: f64,
}

pub fn kclass_correspondence() -> Result<Vec<KClassImage>> {
    let d = GammaData::new()?;
    let z = cr(0.0);
    let table = [
        ("-delta2", KClass::delta2().scale(-1)?, [cr(1.0), z, z]),
        ("-alpha", KClass::alpha().scale(-1)?, [z, cr(-PI.sqrt()), z]),
        ("delta1", KClass::delta1(), [z, z, TWO_PI_I]),
    ];
    table
        .into_iter()
        .map(|(label, class, quoted)| {
            let class = class.in_basis(Basis::P)?;
            let computed = d.apply(&class)?;
            let residual = (0..3).map(|i| (computed[i] - quoted[i]).norm()).fold(0.0, f64::max);
            Ok(KClassImage { label, class, quoted, computed, residual })
        })
        .collect()
}

/// Default point t = (-1, 1, tau = i).
pub fn default_point() -> Result<FlatPoint> {
    FlatPoint::new(cr(-1.0), cr(1.0), crate::modular_forms::HalfPlanePoint::new(c(0.0, 1.0))?)
}

pub const DEFAULT_U_GRID: [f64; 4] = [25.0, 50.0, 100.0, 200.0];
