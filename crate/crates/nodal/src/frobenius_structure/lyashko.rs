use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{half_values, FlatPoint, ModuliPoint};
use crate::config::SeriesConfig;
use crate::error::{Error, Result};
use crate::modular_forms::{HalfPlanePoint, ModularValues};
use crate::numeric::TWO_PI_I;

const GRID: usize = 9;
const MAX_ITER: usize = 60;
const MAX_HALVINGS: usize = 40;
const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Critical values in the order (1/2, (1+tau)/2, tau/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalCoords {
    pub u1: Complex64,
    pub u2: Complex64,
    pub u3: Complex64,
}

impl CanonicalCoords {
    pub fn as_array(&self) -> [Complex64; 3] {
        [self.u1, self.u2, self.u3]
    }
}

/// How `ll_inverse` treats the order of the input triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Ordering {
    /// Match u1, u2, u3 to the critical points as listed.
    AsGiven,
    /// Try every assignment and keep the solution with the largest Im tau.
    #[default]
    Auto,
}

pub fn canonical_coords(p: &ModuliPoint, cfg: &SeriesConfig) -> Result<CanonicalCoords> {
    let e = half_values(p.tau, cfg)?;
    let s22 = p.s2 * p.s2;
    Ok(CanonicalCoords { u1: p.s1 + s22 * e[0], u2: p.s1 + s22 * e[1], u3: p.s1 + s22 * e[2] })
}

/// Product of the canonical coordinates at a flat point.
pub fn discriminant(t: &FlatPoint, cfg: &SeriesConfig) -> Result<Complex64> {
    let u = canonical_coords(&ModuliPoint::from_flat(*t, cfg)?, cfg)?;
    Ok(u.u1 * u.u2 * u.u3)
}

fn sort_triple(mut u: [Complex64; 3]) -> [Complex64; 3] {
    u.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    u
}

/// The critical values as an unordered triple, returned sorted by (re, im).
pub fn lyashko_looijenga(p: &ModuliPoint, cfg: &SeriesConfig) -> Result<[Complex64; 3]> {
    Ok(sort_triple(canonical_coords(p, cfg)?.as_array()))
}

/// Distance between unordered triples: best matching, worst entry.
pub fn triple_distance(a: &[Complex64; 3], b: &[Complex64; 3]) -> f64 {
    PERMUTATIONS
        .iter()
        .map(|s| (0..3).map(|i| (a[i] - b[s[i]]).norm()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

struct CrossRatio {
    value: Complex64,
    slope: Complex64,
    e: [Complex64; 3],
}

fn cross_ratio(tau: Complex64, cfg: &SeriesConfig) -> Result<CrossRatio> {
    let hp = HalfPlanePoint::new(tau)?;
    let e = half_values(hp, cfg)?;
    let mv = ModularValues::at(hp, cfg)?;
    let de = e.map(|x| TWO_PI_I * (x * x * 2.0 + mv.e2 * x / 6.0 - mv.e4 / 36.0));
    let num = e[2] - e[1];
    let den = e[0] - e[1];
    let value = num / den;
    let slope = ((de[2] - de[1]) * den - num * (de[0] - de[1])) / (den * den);
    Ok(CrossRatio { value, slope, e })
}

fn newton(start: Complex64, w: Complex64, cfg: &SeriesConfig) -> Result<(Complex64, [Complex64; 3])> {
    let tol = 1e-13 * w.norm().max(1.0);
    let mut tau = start;
    let mut cur = cross_ratio(tau, cfg)?;
    let mut res = (cur.value - w).norm();
    for _ in 0..MAX_ITER {
        if res < tol {
            return Ok((tau, cur.e));
        }
        if cur.slope.norm() == 0.0 {
            break;
        }
        let mut step = -(cur.value - w) / cur.slope;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let cand = tau + step;
            if cand.im >= cfg.im_min {
                if let Ok(next) = cross_ratio(cand, cfg) {
                    let r = (next.value - w).norm();
                    if r < res {
                        tau = cand;
                        cur = next;
                        res = r;
                        accepted = true;
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res < tol {
        Ok((tau, cur.e))
    } else {
        Err(Error::NewtonDiverged)
    }
}

fn check_distinct(u: &[Complex64; 3]) -> Result<()> {
    let scale = u.iter().map(|x| x.norm()).fold(1.0, f64::max);
    let gap = [(0, 1), (0, 2), (1, 2)].iter().map(|&(i, j)| (u[i] - u[j]).norm()).fold(f64::INFINITY, f64::min);
    if !(gap > 1e-10 * scale) {
        return Err(Error::DegenerateInput);
    }
    Ok(())
}

fn inverse_as_given(u: &[Complex64; 3], cfg: &SeriesConfig) -> Result<ModuliPoint> {
    let w = (u[2] - u[1]) / (u[0] - u[1]);
    let mut starts = Vec::with_capacity(GRID * GRID);
    for i in 0..GRID {
        for j in 0..GRID {
            let tau = Complex64::new(-0.5 + i as f64 / (GRID - 1) as f64, 0.5 + 2.0 * j as f64 / (GRID - 1) as f64);
            if tau.im < cfg.im_min {
                continue;
            }
            if let Ok(cr) = cross_ratio(tau, cfg) {
                starts.push(((cr.value - w).norm(), tau));
            }
        }
    }
    starts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let s1 = (u[0] + u[1] + u[2]) / 3.0;
    let scale = u.iter().map(|x| x.norm()).fold(1.0, f64::max);
    for (_, start) in starts {
        let Ok((tau, e)) = newton(start, w, cfg) else { continue };
        let s2 = ((u[0] - u[1]) / (e[0] - e[1])).sqrt();
        let Ok(p) = ModuliPoint::new(s1, s2, HalfPlanePoint::new(tau)?, cfg) else { continue };
        let back = canonical_coords(&p, cfg)?.as_array();
        if (0..3).all(|k| (back[k] - u[k]).norm() < 1e-6 * scale) {
            return Ok(p);
        }
    }
    Err(Error::NewtonDiverged)
}

/// Recovers a point of M with the given critical values.
pub fn ll_inverse(u: [Complex64; 3], ordering: Ordering, cfg: &SeriesConfig) -> Result<ModuliPoint> {
    check_distinct(&u)?;
    match ordering {
        Ordering::AsGiven => inverse_as_given(&u, cfg),
        Ordering::Auto => {
            let mut best: Option<ModuliPoint> = None;
            for s in PERMUTATIONS {
                if let Ok(p) = inverse_as_given(&[u[s[0]], u[s[1]], u[s[2]]], cfg) {
                    if best.is_none_or(|b| p.tau.tau().im > b.tau.tau().im) {
                        best = Some(p);
                    }
                }
            }
            best.ok_or(Error::NewtonDiverged)
        }
    }
}

/// Moves tau into |Re tau| <= 1/2, |tau| >= 1 and rescales s2 so that the
/// critical values are unchanged as a set.
pub fn reduce_to_fundamental_domain(p: &ModuliPoint, cfg: &SeriesConfig) -> Result<ModuliPoint> {
    let mut tau = p.tau.tau();
    let mut factor = Complex64::new(1.0, 0.0);
    for _ in 0..200 {
        tau -= tau.re.round();
        if tau.norm() < 1.0 - 1e-12 {
            factor *= tau;
            tau = -tau.inv();
        } else {
            break;
        }
    }
    if (tau.norm() - 1.0).abs() < 1e-9 && tau.re < -1e-12 {
        factor *= tau;
        tau = -tau.inv();
    }
    if (tau.re + 0.5).abs() < 1e-9 {
        tau += 1.0;
    }
    ModuliPoint::new(p.s1, p.s2 / factor, HalfPlanePoint::new(tau)?, cfg)
}

/// All points of the fundamental domain over u, identified up to the sign of s2.
pub fn ll_fiber(u: [Complex64; 3], cfg: &SeriesConfig) -> Result<Vec<ModuliPoint>> {
    check_distinct(&u)?;
    let mut out: Vec<ModuliPoint> = Vec::new();
    for s in PERMUTATIONS {
        let Ok(p) = inverse_as_given(&[u[s[0]], u[s[1]], u[s[2]]], cfg) else { continue };
        let r = reduce_to_fundamental_domain(&p, cfg)?;
        let same = |q: &ModuliPoint| {
            (q.s1 - r.s1).norm() < 1e-6 * q.s1.norm().max(1.0)
                && (q.s2 * q.s2 - r.s2 * r.s2).norm() < 1e-6 * (q.s2 * q.s2).norm().max(1.0)
                && (q.tau.tau() - r.tau.tau()).norm() < 1e-6
        };
        if !out.iter().any(same) {
            out.push(r);
        }
    }
    if out.is_empty() {
        return Err(Error::NewtonDiverged);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius_structure::{euler_multiplication, frobenius_tensors};
    use crate::numeric::{c, det3};
    use proptest::prelude::*;

    fn moduli(s1: Complex64, s2: Complex64, tau: Complex64) -> ModuliPoint {
        ModuliPoint::new(s1, s2, HalfPlanePoint::new(tau).unwrap(), &SeriesConfig::default()).unwrap()
    }

    #[test]
    fn discriminant_zero_on_wall() {
        let cfg = SeriesConfig::default();
        let tau = HalfPlanePoint::new(c(0.2, 1.1)).unwrap();
        let s2 = c(0.9, 0.3);
        let e = half_values(tau, &cfg).unwrap();
        let p = ModuliPoint::new(-s2 * s2 * e[0], s2, tau, &cfg).unwrap();
        assert!(discriminant(&p.flat(), &cfg).unwrap().norm() < 1e-10);
    }

    #[test]
    fn discriminant_equals_euler_determinant() {
        let cfg = SeriesConfig::default();
        let p = moduli(c(0.4, -0.1), c(1.1, 0.2), c(-0.2, 0.95));
        let t = p.flat();
        let d = discriminant(&t, &cfg).unwrap();
        let m = det3(&euler_multiplication(&t, &frobenius_tensors(&t, &cfg).unwrap()));
        assert!((d - m).norm() < 1e-8 * d.norm().max(1e-300));
    }

    #[test]
    fn round_trip_named_point() {
        let cfg = SeriesConfig::default();
        let p = moduli(c(0.3, 0.0), c(1.2, 0.0), c(0.1, 1.3));
        let u = lyashko_looijenga(&p, &cfg).unwrap();
        let q = ll_inverse(u, Ordering::Auto, &cfg).unwrap();
        assert!(triple_distance(&u, &lyashko_looijenga(&q, &cfg).unwrap()) < 1e-6);
        let q = reduce_to_fundamental_domain(&q, &cfg).unwrap();
        assert!((q.tau.tau() - p.tau.tau()).norm() < 1e-8);
        assert!((q.s2 * q.s2 - p.s2 * p.s2).norm() < 1e-8);
    }

    #[test]
    fn given_order_recovers_seed_up_to_modular_group() {
        let cfg = SeriesConfig::default();
        let p = moduli(c(-0.2, 0.1), c(0.7, -0.4), c(0.35, 0.8));
        let u = canonical_coords(&p, &cfg).unwrap().as_array();
        let q = ll_inverse(u, Ordering::AsGiven, &cfg).unwrap();
        assert!(triple_distance(&u, &lyashko_looijenga(&q, &cfg).unwrap()) < 1e-6);
        let a = reduce_to_fundamental_domain(&p, &cfg).unwrap();
        let b = reduce_to_fundamental_domain(&q, &cfg).unwrap();
        assert!((a.tau.tau() - b.tau.tau()).norm() < 1e-7);
        assert!((a.s2 * a.s2 - b.s2 * b.s2).norm() < 1e-7);
    }

    #[test]
    fn fiber_has_one_point() {
        let cfg = SeriesConfig::default();
        let p = moduli(c(0.1, 0.2), c(0.8, 0.1), c(-0.1, 1.2));
        let u = lyashko_looijenga(&p, &cfg).unwrap();
        let fiber = ll_fiber(u, &cfg).unwrap();
        assert_eq!(fiber.len(), 1);
    }

    #[test]
    fn coincident_values_rejected() {
        let cfg = SeriesConfig::default();
        let u = [c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)];
        assert!(matches!(ll_inverse(u, Ordering::Auto, &cfg), Err(Error::DegenerateInput)));
    }

    #[test]
    fn reduction_preserves_critical_values() {
        let cfg = SeriesConfig::default();
        let p = moduli(c(0.1, 0.0), c(0.6, 0.2), c(0.4, 0.45));
        let r = reduce_to_fundamental_domain(&p, &cfg).unwrap();
        assert!(r.tau.tau().norm() >= 1.0 - 1e-9 && r.tau.tau().re.abs() <= 0.5 + 1e-9);
        let a = lyashko_looijenga(&p, &cfg).unwrap();
        let b = lyashko_looijenga(&r, &cfg).unwrap();
        assert!(triple_distance(&a, &b) < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn permuting_input_keeps_image(s1r in -1.0f64..1.0, s1i in -1.0f64..1.0, r in 0.4f64..1.5, th in 0.0f64..std::f64::consts::TAU,
                                       re in -0.5f64..0.5, im in 0.9f64..1.8, k in 0usize..6) {
            let cfg = SeriesConfig::default();
            let p = moduli(c(s1r, s1i), Complex64::from_polar(r, th), c(re, im));
            let u = canonical_coords(&p, &cfg).unwrap().as_array();
            let s = PERMUTATIONS[k];
            let v = [u[s[0]], u[s[1]], u[s[2]]];
            let a = lyashko_looijenga(&ll_inverse(u, Ordering::Auto, &cfg).unwrap(), &cfg).unwrap();
            let b = lyashko_looijenga(&ll_inverse(v, Ordering::Auto, &cfg).unwrap(), &cfg).unwrap();
            prop_assert!(triple_distance(&a, &b) < 1e-6 * r.max(1.0).powi(2));
        }
    }
}
