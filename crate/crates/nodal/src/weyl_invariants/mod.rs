//! The elliptic Weyl group acting on (phi, x, tau), the invariants y1, y2,
//! y3, the anti-invariant J and the metric they induce on flat coordinates.

mod invariants;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular_forms::HalfPlanePoint;

pub use invariants::{
    chevalley_cubic, chevalley_residual, coordinate_jacobian, flat_point, invariance_residuals, invariant_jacobian, invariants,
    j_product, j_theta_quotient, pullback_metric, weyl_metric, x_self_pairing, InvarianceResiduals, Invariants,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TildeEPoint {
    pub phi: Complex64,
    pub x: Complex64,
    pub tau: HalfPlanePoint,
}

impl TildeEPoint {
    pub fn new(phi: Complex64, x: Complex64, tau: HalfPlanePoint) -> Self {
        TildeEPoint { phi, x, tau }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    R1,
    R2,
    R3,
    T1,
    T2,
    C,
}

impl Generator {
    pub const ALL: [Generator; 6] = [Generator::R1, Generator::R2, Generator::R3, Generator::T1, Generator::T2, Generator::C];

    fn name(self) -> &'static str {
        match self {
            Generator::R1 => "r1",
            Generator::R2 => "r2",
            Generator::R3 => "r3",
            Generator::T1 => "t1",
            Generator::T2 => "t2",
            Generator::C => "c",
        }
    }

    /// Number of simple reflections in the generator.
    fn reflection_length(self) -> u64 {
        match self {
            Generator::R1 | Generator::R2 | Generator::R3 => 1,
            Generator::T1 | Generator::T2 => 2,
            Generator::C => 3,
        }
    }

    fn act_once(self, inverse: bool, p: TildeEPoint) -> TildeEPoint {
        let (phi, x, tau) = (p.phi, p.x, p.tau.tau());
        let one = Complex64::new(1.0, 0.0);
        let (phi2, x2) = match (self, inverse) {
            (Generator::R1, _) => (phi, one - x),
            (Generator::R2, _) => (phi - x * 2.0 + one + tau, one + tau - x),
            (Generator::R3, _) => (phi - x * 2.0 + tau, tau - x),
            (Generator::T1, false) => (phi + one, x + one),
            (Generator::T1, true) => (phi - one, x - one),
            (Generator::T2, false) => (phi + x * 2.0 - one + tau, x + tau),
            (Generator::T2, true) => (phi - x * 2.0 + tau + one, x - tau),
            (Generator::C, false) => (phi + one, -x),
            (Generator::C, true) => (phi - one, -x),
        };
        TildeEPoint { phi: phi2, x: x2, tau: p.tau }
    }
}

/// A word in the generators (applied right-most first) or an SL(2, Z) matrix (a, b, c, d).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupElement {
    Word(Vec<(Generator, i64)>),
    Modular([i64; 4]),
}

impl GroupElement {
    pub fn generator(g: Generator) -> Self {
        GroupElement::Word(vec![(g, 1)])
    }

    pub fn modular(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a.checked_mul(d).zip(b.checked_mul(c)).map(|(x, y)| x - y) != Some(1) {
            return Err(Error::InvalidInput(format!("determinant of ({a},{b};{c},{d}) is not 1")));
        }
        Ok(GroupElement::Modular([a, b, c, d]))
    }

    /// Sign picked up by J.
    pub fn j_sign(&self) -> f64 {
        match self {
            GroupElement::Word(w) => {
                let n: u64 = w.iter().map(|(g, k)| g.reflection_length() * k.unsigned_abs()).sum();
                if n % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            GroupElement::Modular(_) => 1.0,
        }
    }
}

pub fn apply_group(g: &GroupElement, p: TildeEPoint) -> Result<TildeEPoint> {
    match g {
        GroupElement::Word(w) => {
            let mut q = p;
            for &(gen, k) in w.iter().rev() {
                for _ in 0..k.unsigned_abs() {
                    q = gen.act_once(k < 0, q);
                }
            }
            Ok(q)
        }
        GroupElement::Modular([a, b, c, d]) => {
            let tau = p.tau.tau();
            let j = tau * *c as f64 + *d as f64;
            let phi = p.phi - p.x * p.x * *c as f64 / j;
            let t2 = (tau * *a as f64 + *b as f64) / j;
            Ok(TildeEPoint { phi, x: p.x / j, tau: HalfPlanePoint::new(t2)? })
        }
    }
}

impl FromStr for GroupElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(body) = s.strip_prefix("sl2(").and_then(|b| b.strip_suffix(')')) {
            let v: Vec<i64> = body
                .split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad matrix entry '{x}'"))))
                .collect::<Result<_>>()?;
            if v.len() != 4 {
                return Err(Error::Parse("sl2(...) needs four entries".into()));
            }
            return GroupElement::modular(v[0], v[1], v[2], v[3]).map_err(|e| Error::Parse(e.to_string()));
        }
        let mut out = Vec::new();
        for tok in s.split_whitespace() {
            let (head, exp) = match tok.split_once('^') {
                Some((h, e)) => (h, e.parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent in '{tok}'")))?),
                None => (tok, 1),
            };
            let g = Generator::ALL
                .into_iter()
                .find(|g| g.name() == head)
                .ok_or_else(|| Error::Parse(format!("unknown generator '{head}'")))?;
            if exp.unsigned_abs() > 10_000 {
                return Err(Error::Parse(format!("exponent too large in '{tok}'")));
            }
            out.push((g, exp));
        }
        Ok(GroupElement::Word(out))
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Modular([a, b, c, d]) => write!(f, "sl2({a},{b},{c},{d})"),
            GroupElement::Word(w) => {
                let parts: Vec<String> = w
                    .iter()
                    .map(|(g, k)| if *k == 1 { g.name().to_string() } else { format!("{}^{}", g.name(), k) })
                    .collect();
                f.write_str(&parts.join(" "))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c;

    fn pt(phi: Complex64, x: Complex64, tau: Complex64) -> TildeEPoint {
        TildeEPoint::new(phi, x, HalfPlanePoint::new(tau).unwrap())
    }

    fn close(a: TildeEPoint, b: TildeEPoint) -> bool {
        (a.phi - b.phi).norm() < 1e-12 && (a.x - b.x).norm() < 1e-12 && (a.tau.tau() - b.tau.tau()).norm() < 1e-12
    }

    #[test]
    fn reflection_twice_is_identity() {
        let p = pt(c(0.3, 0.0), c(0.2, 0.1), c(0.0, 1.1));
        let g: GroupElement = "r1^2".parse().unwrap();
        assert!(close(apply_group(&g, p).unwrap(), p));
    }

    #[test]
    fn translation_closed_form() {
        let p = pt(c(0.3, 0.2), c(0.2, 0.1), c(0.1, 1.1));
        let (m, n) = (2.0, 3.0);
        let g: GroupElement = "t1^2 t2^3".parse().unwrap();
        let tau = p.tau.tau();
        let want = pt(p.phi + p.x * 2.0 * n + tau * n * n + m - n, p.x + m + tau * n, tau);
        assert!(close(apply_group(&g, p).unwrap(), want));
    }

    #[test]
    fn derived_generators_match_reflection_products() {
        let p = pt(c(-0.4, 0.1), c(0.33, 0.27), c(0.2, 0.9));
        for (a, b) in [("c", "r1 r2 r3"), ("t1", "r2 r3"), ("t2", "r2 r1"), ("t1^-1 t1", ""), ("t2 t2^-1", ""), ("c^-1 c", "")] {
            let ga: GroupElement = a.parse().unwrap();
            let gb: GroupElement = b.parse().unwrap();
            assert!(close(apply_group(&ga, p).unwrap(), apply_group(&gb, p).unwrap()), "{a} vs {b}");
        }
        let comm: GroupElement = "t1 t2 t1^-1 t2^-1 c^2".parse().unwrap();
        assert!(close(apply_group(&comm, p).unwrap(), p));
    }

    #[test]
    fn modular_translation() {
        let p = pt(c(0.1, 0.0), c(0.2, 0.1), c(0.0, 1.0));
        let g = GroupElement::modular(1, 1, 0, 1).unwrap();
        assert!(close(apply_group(&g, p).unwrap(), pt(p.phi, p.x, p.tau.tau() + 1.0)));
        assert!(GroupElement::modular(1, 1, 1, 1).is_err());
        assert_eq!("sl2(1,0,1,1)".parse::<GroupElement>().unwrap(), GroupElement::Modular([1, 0, 1, 1]));
    }

    #[test]
    fn parse_and_sign() {
        let g: GroupElement = "r1 t2 c^-2".parse().unwrap();
        assert_eq!(g, GroupElement::Word(vec![(Generator::R1, 1), (Generator::T2, 1), (Generator::C, -2)]));
        assert_eq!(g.to_string(), "r1 t2 c^-2");
        assert_eq!(g.j_sign(), -1.0);
        assert_eq!(GroupElement::generator(Generator::C).j_sign(), -1.0);
        assert!("r4".parse::<GroupElement>().is_err());
        assert!("r1^x".parse::<GroupElement>().is_err());
    }
}
