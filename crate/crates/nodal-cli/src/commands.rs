use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Subcommand, ValueEnum};
use nodal::frobenius_structure::{
    canonical_coords, frobenius_tensors, ll_inverse, lyashko_looijenga, unfolding_flat, FlatPoint, ModuliPoint, Ordering,
};
use nodal::gamma_periods::{
    default_point, exponential_period, gamma_identities, kclass_correspondence, CyclePath, PeriodCombination, PeriodValue,
};
use nodal::k_lattice::{braid_to_sl2, enumerate_roots, is_class_exceptional, mutate, Basis, BraidWord, KClass};
use nodal::modular_forms::{dedekind_eta, eisenstein, HalfPlanePoint, ModularValues};
use nodal::suite::{gamma_checks, run_suite, SuiteName};
use nodal::theta_weierstrass::{half_periods, theta11_d, weierstrass, TorusPoint, WeierstrassKind};
use nodal::weyl_invariants::{invariants, TildeEPoint};
use nodal::{Complex64, SeriesConfig};
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{header, num, pair, paired_header, Output};
use crate::parse;

/// Exit code 2 for bad input or configuration, 1 for everything else.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Failed(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Failed(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Failed(m) => m,
        }
    }
}

impl From<nodal::Error> for CliError {
    fn from(e: nodal::Error) -> Self {
        use nodal::Error::*;
        match e {
            InvalidInput(_) | BelowImMin { .. } | Parse(_) | UnknownIdentity(_) | UnknownRelation(_) | PoleTooClose { .. }
            | NotExceptional => CliError::Config(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

type CliResult = Result<ExitCode, CliError>;

fn bad(m: String) -> CliError {
    CliError::Config(m)
}

fn emit(out: Output, cfg: &RunConfig) -> CliResult {
    out.emit(cfg).map_err(CliError::Failed)?;
    Ok(ExitCode::SUCCESS)
}

fn output<T: Serialize>(value: &T, head: Vec<String>, rows: Vec<Vec<String>>) -> Result<Output, CliError> {
    Output::new(value, head, rows).map_err(CliError::Failed)
}

/// Renders a complex number so that `parse::complex` reads it back exactly.
pub fn complex_arg(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn tau_of(s: &str) -> Result<HalfPlanePoint, CliError> {
    Ok(HalfPlanePoint::new(parse::complex(s).map_err(bad)?)?)
}

fn flat_of(s: &str) -> Result<FlatPoint, CliError> {
    let [t1, t2, tau] = parse::complex_triple(s).map_err(bad)?;
    Ok(FlatPoint::new(t1, t2, HalfPlanePoint::new(tau)?)?)
}

// ---------------------------------------------------------------- eval

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "verbatim")]
pub enum Function {
    E2,
    E4,
    E6,
    eta,
    e1,
    e2,
    e3,
    theta,
    p,
    p_dz,
    zeta,
    potential,
    unfolding,
    discriminant,
    y1,
    y2,
    y3,
    J,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub function: Function,
    /// Modulus, e.g. 0+1i.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
    /// Torus coordinate for theta, p, p_dz, zeta and unfolding.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Torus coordinate for the Weyl invariants.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Central coordinate for the Weyl invariants.
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub phi: String,
    /// Flat coordinates t1,t2,tau.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
}

#[derive(Serialize)]
struct EvalReport {
    function: String,
    value: Complex64,
    error_estimate: f64,
}

fn need<'a>(v: &'a Option<String>, flag: &str, f: Function) -> Result<&'a str, CliError> {
    v.as_deref().ok_or_else(|| bad(format!("{f:?} needs --{flag}")))
}

fn eval_once(a: &EvalArgs, cfg: &SeriesConfig) -> Result<Complex64, CliError> {
    use Function::*;
    let f = a.function;
    let tau = || tau_of(need(&a.tau, "tau", f)?);
    let z = || parse::complex(need(&a.z, "z", f)?).map_err(bad);
    let flat = || flat_of(need(&a.t, "t", f)?);
    let tilde = || -> Result<TildeEPoint, CliError> {
        let x = parse::complex(need(&a.x, "x", f)?).map_err(bad)?;
        Ok(TildeEPoint::new(parse::complex(&a.phi).map_err(bad)?, x, tau()?))
    };
    Ok(match f {
        E2 => eisenstein(2, tau()?, cfg)?,
        E4 => eisenstein(4, tau()?, cfg)?,
        E6 => eisenstein(6, tau()?, cfg)?,
        eta => dedekind_eta(tau()?, cfg)?,
        e1 => half_periods(tau()?, cfg)?.e1,
        e2 => half_periods(tau()?, cfg)?.e2,
        e3 => half_periods(tau()?, cfg)?.e3,
        theta => theta11_d(0, z()?, tau()?, cfg)?,
        p => weierstrass(WeierstrassKind::P, TorusPoint::new(z()?, tau()?), cfg)?,
        p_dz => weierstrass(WeierstrassKind::PDz, TorusPoint::new(z()?, tau()?), cfg)?,
        zeta => weierstrass(WeierstrassKind::Zeta, TorusPoint::new(z()?, tau()?), cfg)?,
        potential => {
            let t = flat()?;
            nodal::frobenius_structure::potential(&t, &ModularValues::at(t.tau, cfg)?)
        }
        unfolding => unfolding_flat(z()?, &flat()?, cfg)?,
        discriminant => nodal::frobenius_structure::discriminant(&flat()?, cfg)?,
        y1 => invariants(&tilde()?, cfg)?.y1,
        y2 => invariants(&tilde()?, cfg)?.y2,
        y3 => invariants(&tilde()?, cfg)?.y3,
        J => invariants(&tilde()?, cfg)?.j,
    })
}

/// The error estimate is the change when the series tail tolerance is
/// loosened by four orders of magnitude.
pub fn eval(a: &EvalArgs, cfg: &RunConfig) -> CliResult {
    let value = eval_once(a, &cfg.series)?;
    let loose = cfg.series.with_tail_tol((cfg.series.tail_tol * 1e4).min(1e-3));
    let error_estimate = (eval_once(a, &loose)? - value).norm();
    let function = format!("{:?}", a.function);
    let [re, im] = pair(value);
    let rows = vec![vec![function.clone(), re, im, num(error_estimate)]];
    let head = header(&["function", "value_re", "value_im", "error_estimate"]);
    emit(output(&EvalReport { function, value, error_estimate }, head, rows)?, cfg)
}

// ---------------------------------------------------------------- verify

pub fn verify(suite: &str, cfg: &RunConfig) -> CliResult {
    let name = SuiteName::from_str(suite)?;
    let report = run_suite(name, &cfg.suite())?;
    let rows = report
        .checks
        .iter()
        .map(|c| {
            vec![
                report.suite.as_str().to_string(),
                c.name.clone(),
                num(c.residual),
                num(c.threshold),
                format!("{:?}", c.bound).to_lowercase(),
                c.passed.to_string(),
                c.citation.clone(),
            ]
        })
        .collect();
    let head = header(&["suite", "name", "residual", "threshold", "bound", "passed", "citation"]);
    emit(output(&report, head, rows)?, cfg)?;
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    eprintln!("{}: {}/{} checks passed", name.as_str(), report.checks.len() - failed.len(), report.checks.len());
    if failed.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("failing: {}", failed.join(", "));
        Ok(ExitCode::from(1))
    }
}

// ---------------------------------------------------------------- braid

#[derive(Debug, Args)]
pub struct BraidArgs {
    /// Word such as "s1 s2^-1 [1,0,2]".
    #[arg(allow_hyphen_values = true)]
    pub word: String,
    /// Starting triple: P (projectives P3, P2, P1), S (simples in the order
    /// of the S basis) or explicit P coordinates "a,b,c;d,e,f;g,h,i".
    #[arg(long, default_value = "P", allow_hyphen_values = true)]
    pub start: String,
}

#[derive(Serialize)]
struct ClassOut {
    p: [i64; 3],
    r: [i64; 3],
}

#[derive(Serialize)]
struct BraidReport {
    word: String,
    start: Vec<ClassOut>,
    result: Vec<ClassOut>,
    exceptional: bool,
    sl2: [[i64; 2]; 2],
}

fn start_triple(s: &str) -> Result<[KClass; 3], CliError> {
    match s {
        "P" | "p" => Ok([KClass::projective(3), KClass::projective(2), KClass::projective(1)]),
        "S" | "s" => Ok([
            KClass::new([1, 0, 0], Basis::S),
            KClass::new([0, 1, 0], Basis::S),
            KClass::new([0, 0, 1], Basis::S),
        ]),
        _ => {
            let parts: Vec<&str> = s.split(';').collect();
            if parts.len() != 3 {
                return Err(bad(format!("start needs three classes separated by ';', got `{s}`")));
            }
            let mut out = [KClass::new([0; 3], Basis::P); 3];
            for (k, p) in parts.iter().enumerate() {
                let v: Vec<i64> = p
                    .split(',')
                    .map(|x| x.trim().parse::<i64>().map_err(|_| bad(format!("bad integer `{x}`"))))
                    .collect::<Result<_, _>>()?;
                let c = <[i64; 3]>::try_from(v).map_err(|_| bad(format!("class `{p}` needs three coordinates")))?;
                out[k] = KClass::new(c, Basis::P);
            }
            Ok(out)
        }
    }
}

fn class_out(x: &KClass) -> Result<ClassOut, CliError> {
    Ok(ClassOut { p: x.in_basis(Basis::P)?.coords, r: x.in_basis(Basis::R)?.coords })
}

pub fn braid(a: &BraidArgs, cfg: &RunConfig) -> CliResult {
    let word = BraidWord::from_str(&a.word)?;
    let start = start_triple(&a.start)?;
    let result = mutate(start, &word)?;
    let m = braid_to_sl2(&word)?;
    let report = BraidReport {
        word: word.to_string(),
        start: start.iter().map(class_out).collect::<Result<_, _>>()?,
        result: result.iter().map(class_out).collect::<Result<_, _>>()?,
        exceptional: is_class_exceptional(&result)?,
        sl2: [[m.get(0, 0), m.get(0, 1)], [m.get(1, 0), m.get(1, 1)]],
    };
    let rows = report
        .result
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let mut r = vec![(k + 1).to_string()];
            r.extend(c.p.iter().chain(&c.r).map(|v| v.to_string()));
            r
        })
        .collect();
    let head = header(&["slot", "p3", "p2", "p1", "alpha", "delta1", "delta2"]);
    emit(output(&report, head, rows)?, cfg)
}

// ---------------------------------------------------------------- ll

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderingArg {
    Auto,
    Given,
}

#[derive(Debug, Subcommand)]
pub enum LlCommand {
    /// Critical values of the unfolding at raw coordinates.
    Forward {
        /// s1,s2,tau
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// A point with the given critical values.
    Inverse {
        /// u1,u2,u3
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, value_enum, default_value_t = OrderingArg::Auto)]
        ordering: OrderingArg,
    },
}

#[derive(Serialize)]
struct LlForward {
    s1: Complex64,
    s2: Complex64,
    tau: Complex64,
    /// Sorted by real then imaginary part.
    u: [Complex64; 3],
    /// Listed at 1/2, (1+tau)/2, tau/2.
    canonical: [Complex64; 3],
    arg: String,
}

#[derive(Serialize)]
struct LlInverse {
    u: [Complex64; 3],
    s1: Complex64,
    s2: Complex64,
    tau: Complex64,
    t1: Complex64,
    arg: String,
}

fn triple_arg(v: &[Complex64; 3]) -> String {
    v.iter().map(|z| complex_arg(*z)).collect::<Vec<_>>().join(",")
}

fn triple_row(v: &[Complex64]) -> Vec<String> {
    v.iter().flat_map(|z| pair(*z)).collect()
}

pub fn ll(cmd: &LlCommand, cfg: &RunConfig) -> CliResult {
    let series = &cfg.series;
    match cmd {
        LlCommand::Forward { s } => {
            let [s1, s2, tau] = parse::complex_triple(s).map_err(bad)?;
            let p = ModuliPoint::new(s1, s2, HalfPlanePoint::new(tau)?, series)?;
            let u = lyashko_looijenga(&p, series)?;
            let canonical = canonical_coords(&p, series)?.as_array();
            let report = LlForward { s1, s2, tau, u, canonical, arg: triple_arg(&u) };
            let rows = vec![triple_row(&u)];
            emit(output(&report, paired_header(&["u1", "u2", "u3"]), rows)?, cfg)
        }
        LlCommand::Inverse { u, ordering } => {
            let u = parse::complex_triple(u).map_err(bad)?;
            let ord = match ordering {
                OrderingArg::Auto => Ordering::Auto,
                OrderingArg::Given => Ordering::AsGiven,
            };
            let p = ll_inverse(u, ord, series)?;
            let tau = p.tau.tau();
            let report = LlInverse { u, s1: p.s1, s2: p.s2, tau, t1: p.flat().t1, arg: triple_arg(&[p.s1, p.s2, tau]) };
            let rows = vec![triple_row(&[p.s1, p.s2, tau])];
            emit(output(&report, paired_header(&["s1", "s2", "tau"]), rows)?, cfg)
        }
    }
}

// ---------------------------------------------------------------- roots

#[derive(Serialize)]
struct RootOut {
    coords: [i64; 3],
    label: String,
}

/// Writes r-coordinates as a combination of alpha, delta1, delta2.
pub fn root_label(c: [i64; 3]) -> String {
    let names = ["alpha", "delta1", "delta2"];
    let mut s = String::new();
    for (k, &n) in c.iter().enumerate() {
        if n == 0 {
            continue;
        }
        let sign = if n < 0 { "-" } else if s.is_empty() { "" } else { "+" };
        let mag = if n.abs() == 1 { String::new() } else { n.abs().to_string() };
        s.push_str(&format!("{sign}{mag}{}", names[k]));
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

pub fn roots(bound: u32, cfg: &RunConfig) -> CliResult {
    if bound > 1000 {
        return Err(bad(format!("bound {bound} is above 1000")));
    }
    let list: Vec<RootOut> = enumerate_roots(bound)
        .iter()
        .map(|x| {
            let c = x.in_basis(Basis::R)?.coords;
            Ok(RootOut { coords: c, label: root_label(c) })
        })
        .collect::<Result<_, nodal::Error>>()?;
    let rows = list
        .iter()
        .map(|r| {
            let mut row: Vec<String> = r.coords.iter().map(|v| v.to_string()).collect();
            row.push(r.label.clone());
            row
        })
        .collect();
    emit(output(&list, header(&["alpha", "delta1", "delta2", "label"]), rows)?, cfg)
}

// ---------------------------------------------------------------- gamma

#[derive(Debug, Args)]
pub struct GammaArgs {
    /// Evaluate one path (path1, path2a, path2b, path3) or combination
    /// (neg-path1, path2a-minus-path2b, path3) instead of the full report.
    #[arg(long)]
    pub path: Option<String>,
    /// Spectral parameter for --path.
    #[arg(long)]
    pub u: Option<f64>,
    /// Flat point t1,t2,tau for --path; defaults to -1,1,0+1i.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
}

#[derive(Serialize)]
struct PeriodReport {
    path: String,
    t: [Complex64; 3],
    u: f64,
    #[serde(flatten)]
    period: PeriodValue,
}

#[derive(Serialize)]
struct GammaReport {
    identities: nodal::gamma_periods::GammaResiduals,
    correspondence: Vec<nodal::gamma_periods::KClassImage>,
    fits: Vec<nodal::suite::FitReport>,
    checks: Vec<nodal::suite::Check>,
}

pub fn gamma(a: &GammaArgs, cfg: &RunConfig) -> CliResult {
    match &a.path {
        Some(path) => {
            let u = a.u.ok_or_else(|| bad("--path needs --u".into()))?;
            let t = match &a.t {
                Some(s) => flat_of(s)?,
                None => default_point()?,
            };
            let period = match CyclePath::from_str(path) {
                Ok(c) => exponential_period(c, &t, u, &cfg.quad, &cfg.series)?,
                Err(_) => PeriodCombination::from_str(path)?.evaluate(&t, u, &cfg.quad, &cfg.series)?,
            };
            let report = PeriodReport { path: path.clone(), t: [t.t1, t.t2, t.tau.tau()], u, period };
            let [re, im] = pair(period.value);
            let rows = vec![vec![path.clone(), num(u), re, im, num(period.error), period.panels.to_string()]];
            let head = header(&["path", "u", "value_re", "value_im", "error", "panels"]);
            emit(output(&report, head, rows)?, cfg)
        }
        None => {
            if a.u.is_some() || a.t.is_some() {
                return Err(bad("--u and --t only apply with --path".into()));
            }
            let (checks, fits) = gamma_checks(&cfg.suite())?;
            let report =
                GammaReport { identities: gamma_identities()?, correspondence: kclass_correspondence()?, fits, checks };
            let mut rows = Vec::new();
            for f in &report.fits {
                let mut sources = vec![("fit", f.fitted), ("quoted", f.quoted), ("expanded", f.expanded)];
                if let Some(r) = f.richardson {
                    sources.insert(1, ("richardson", r));
                }
                for (source, v) in sources {
                    for (k, coeff) in ["leading", "subleading"].iter().enumerate() {
                        let [re, im] = pair(v[k]);
                        rows.push(vec![f.combination.id().to_string(), coeff.to_string(), source.to_string(), re, im]);
                    }
                }
            }
            let head = header(&["combination", "coefficient", "source", "re", "im"]);
            emit(output(&report, head, rows)?, cfg)
        }
    }
}

// ---------------------------------------------------------------- frobenius

#[derive(Serialize)]
struct FrobeniusReport {
    t: [Complex64; 3],
    #[serde(flatten)]
    tensors: nodal::frobenius_structure::FrobeniusTensors,
    canonical: [Complex64; 3],
    discriminant: Complex64,
}

pub fn frobenius(t: &str, cfg: &RunConfig) -> CliResult {
    let series = &cfg.series;
    let t = flat_of(t)?;
    let tensors = frobenius_tensors(&t, series)?;
    let canonical = canonical_coords(&ModuliPoint::from_flat(t, series)?, series)?.as_array();
    let report = FrobeniusReport { t: t.coords(), discriminant: nodal::frobenius_structure::discriminant(&t, series)?, tensors, canonical };

    let mut rows = Vec::new();
    let mut push = |name: &str, idx: &[usize], z: Complex64| {
        let mut r = vec![name.to_string()];
        for k in 0..3 {
            r.push(idx.get(k).map(|i| (i + 1).to_string()).unwrap_or_default());
        }
        r.extend(pair(z));
        rows.push(r);
    };
    push("potential", &[], report.tensors.potential_value);
    push("discriminant", &[], report.discriminant);
    for i in 0..3 {
        push("canonical", &[i], report.canonical[i]);
    }
    for (name, m) in [("eta", &report.tensors.eta), ("g", &report.tensors.g)] {
        for i in 0..3 {
            for j in 0..3 {
                push(name, &[i, j], m[i][j]);
            }
        }
    }
    for (name, m) in [("c", &report.tensors.c), ("gamma", &report.tensors.gamma)] {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    push(name, &[i, j, k], m[i][j][k]);
                }
            }
        }
    }
    let head = header(&["object", "i", "j", "k", "re", "im"]);
    emit(output(&report, head, rows)?, cfg)
}
