use serde::{Deserialize, Serialize};

use super::{euler_matrix, serre_matrix, Basis, FormKind, IntMatrix, KClass, LatticeMap};
use crate::error::{Error, Result};

/// Class in the rank-5 lattice, coordinates (kappa1, kappa2, alpha, delta2, delta1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rank5Class {
    pub coords: [i64; 5],
}

impl Rank5Class {
    pub fn from_rank3(x: &KClass) -> Result<Self> {
        let r = x.in_basis(Basis::R)?.coords;
        Ok(Rank5Class { coords: [0, 0, r[0], r[2], r[1]] })
    }

    pub fn kappa1() -> Self {
        Rank5Class { coords: [1, 0, 0, 0, 0] }
    }

    pub fn kappa2() -> Self {
        Rank5Class { coords: [0, 1, 0, 0, 0] }
    }

    /// The rank-3 part, if the kappa coordinates vanish.
    pub fn to_rank3(&self) -> Option<KClass> {
        let c = self.coords;
        (c[0] == 0 && c[1] == 0).then(|| KClass::new([c[2], c[4], c[3]], Basis::R))
    }
}

pub fn hyperbolic_form() -> IntMatrix {
    IntMatrix::from_rows([
        [0, 0, 0, 0, 1],
        [0, 0, 0, -1, 0],
        [0, 0, 2, 0, 0],
        [0, -1, 0, 0, 0],
        [1, 0, 0, 0, 0],
    ])
}

/// I = chi + chi^T.
pub fn symmetric_form(b: Basis) -> Result<IntMatrix> {
    let chi = euler_matrix(b)?;
    let t = chi.transpose();
    let n = chi.dim();
    Ok(IntMatrix((0..n).map(|i| (0..n).map(|j| chi.get(i, j) + t.get(i, j)).collect()).collect()))
}

/// Classes of S(1), S(2), S(3) in R coordinates.
pub fn simple_roots() -> [KClass; 3] {
    [KClass::new([1, -1, 0], Basis::R), KClass::new([-1, 1, 1], Basis::R), KClass::new([1, 0, -1], Basis::R)]
}

/// +-alpha - (p+1) delta1 - (q+1) delta2 with pq even.
pub fn is_real_root(x: &KClass) -> Result<bool> {
    let [a, b, c] = x.in_basis(Basis::R)?.coords;
    let p = -b - 1;
    let q = -c - 1;
    Ok(a.abs() == 1 && (p.rem_euclid(2) == 0 || q.rem_euclid(2) == 0))
}

/// All real roots with |p|, |q| <= bound, in R coordinates.
pub fn enumerate_roots(bound: u32) -> Vec<KClass> {
    let h = bound as i64;
    let mut out = Vec::new();
    for sign in [1i64, -1] {
        for p in -h..=h {
            for q in -h..=h {
                if (p * q) % 2 == 0 {
                    out.push(KClass::new([sign, -(p + 1), -(q + 1)], Basis::R));
                }
            }
        }
    }
    out
}

fn reflection_in(form: &IntMatrix, beta: &[i64]) -> Result<IntMatrix> {
    let n = beta.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0i64; n];
        e[j] = 1;
        let k = form.bilinear(beta, &e)?;
        let col = (0..n)
            .map(|i| k.checked_mul(beta[i]).and_then(|v| e[i].checked_sub(v)).ok_or(Error::Overflow("reflection")))
            .collect::<Result<Vec<_>>>()?;
        cols.push(col);
    }
    Ok(IntMatrix::from_columns(&cols))
}

/// lambda -> lambda - I(beta, lambda) beta in R coordinates.
pub fn reflection(root: &KClass) -> Result<LatticeMap> {
    if !is_real_root(root)? {
        return Err(Error::NotARoot);
    }
    let beta = root.in_basis(Basis::R)?.coords;
    Ok(LatticeMap {
        matrix: reflection_in(&symmetric_form(Basis::R)?, &beta)?,
        preserved_form: FormKind::Symmetric,
        basis: Some(Basis::R),
    })
}

/// Reflection of the rank-5 lattice in the image of a real root.
pub fn reflection_rank5(root: &Rank5Class) -> Result<LatticeMap> {
    let r3 = root.to_rank3().ok_or(Error::NotARoot)?;
    if !is_real_root(&r3)? {
        return Err(Error::NotARoot);
    }
    Ok(LatticeMap {
        matrix: reflection_in(&hyperbolic_form(), &root.coords)?,
        preserved_form: FormKind::Hyperbolic,
        basis: None,
    })
}

pub const RELATION_IDS: [&str; 8] = [
    "w-involutions",
    "w-coxeter-square",
    "coxeter-is-shifted-serre",
    "tau-translations",
    "tilde-involutions",
    "tilde-elliptic-artin",
    "tilde-commutator",
    "tilde-c-squared-central",
];

fn simple3() -> Result<[IntMatrix; 3]> {
    let [a, b, c] = simple_roots();
    Ok([reflection(&a)?.matrix, reflection(&b)?.matrix, reflection(&c)?.matrix])
}

fn simple5() -> Result<[IntMatrix; 3]> {
    let [a, b, c] = simple_roots();
    let r = |x: &KClass| -> Result<IntMatrix> { Ok(reflection_rank5(&Rank5Class::from_rank3(x)?)?.matrix) };
    Ok([r(&a)?, r(&b)?, r(&c)?])
}

fn product(ms: &[&IntMatrix]) -> Result<IntMatrix> {
    let mut out = IntMatrix::identity(ms[0].dim());
    for m in ms {
        out = out.mul(m)?;
    }
    Ok(out)
}

/// Image of a vector given in (alpha, delta1, delta2, kappa1, kappa2) order.
#[cfg(test)]
fn image5(m: &IntMatrix, alpha: i64, d1: i64, d2: i64, k1: i64, k2: i64) -> Result<Vec<i64>> {
    m.apply(&[k1, k2, alpha, d2, d1])
}

fn tilde_coxeter() -> Result<IntMatrix> {
    let [r1, r2, r3] = simple5()?;
    product(&[&r1, &r2, &r3])
}

/// Exact matrix verification of a named group relation.
pub fn group_relation_check(id: &str) -> Result<bool> {
    let id3 = IntMatrix::identity(3);
    let id5 = IntMatrix::identity(5);
    match id {
        "w-involutions" => {
            let rs = simple3()?;
            Ok(rs.iter().all(|r| r.mul(r).ok() == Some(id3.clone())))
        }
        "w-coxeter-square" => {
            let [r1, r2, r3] = simple3()?;
            let c = product(&[&r1, &r2, &r3])?;
            Ok(c.mul(&c)? == id3)
        }
        "coxeter-is-shifted-serre" => {
            let [r1, r2, r3] = simple3()?;
            let c = product(&[&r1, &r2, &r3])?;
            let r_alpha = reflection_in(&symmetric_form(Basis::R)?, &[1, 0, 0])?;
            Ok(c == r_alpha && c == serre_matrix(Basis::R)?.matrix.neg()?)
        }
        "tau-translations" => {
            let [r1, r2, r3] = simple3()?;
            let t1 = r2.mul(&r3)?;
            let t2 = r2.mul(&r1)?;
            Ok(t1.apply(&[1, 0, 0])? == vec![1, -2, 0]
                && t2.apply(&[1, 0, 0])? == vec![1, 0, -2]
                && t1.apply(&[0, 1, 0])? == vec![0, 1, 0]
                && t2.apply(&[0, 0, 1])? == vec![0, 0, 1])
        }
        "tilde-involutions" => {
            let rs = simple5()?;
            Ok(rs.iter().all(|r| r.mul(r).ok() == Some(id5.clone())))
        }
        "tilde-elliptic-artin" => {
            let rs = simple5()?;
            let c = tilde_coxeter()?;
            let c2 = c.mul(&c)?;
            for r in &rs {
                if r.mul(&c2)? != c2.mul(r)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        "tilde-commutator" => {
            let [r1, r2, r3] = simple5()?;
            let t1 = r2.mul(&r3)?;
            let t2 = r2.mul(&r1)?;
            let comm = product(&[&t1, &t2, &t1.inverse()?, &t2.inverse()?])?;
            Ok(comm == tilde_coxeter()?.pow(-2)?)
        }
        "tilde-c-squared-central" => {
            let c = tilde_coxeter()?;
            let c2 = c.mul(&c)?;
            let rs = simple5()?;
            let mut ok = c2 != id5;
            for r in &rs {
                ok &= r.mul(&c2)? == c2.mul(r)?;
            }
            Ok(ok)
        }
        other => Err(Error::UnknownRelation(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn root_membership() {
        let [a1, a2, a3] = simple_roots();
        for r in [a1, a2, a3] {
            assert!(is_real_root(&r).unwrap());
        }
        assert!(!is_real_root(&KClass::alpha()).unwrap());
        assert!(matches!(reflection(&KClass::alpha()), Err(Error::NotARoot)));
        let form = symmetric_form(Basis::R).unwrap();
        for b in enumerate_roots(5) {
            assert_eq!(form.bilinear(&b.coords, &b.coords).unwrap(), 2);
        }
    }

    #[test]
    fn gram_of_simple_roots() {
        let form = symmetric_form(Basis::S).unwrap();
        assert_eq!(form, IntMatrix::from_rows([[2, -2, 2], [-2, 2, -2], [2, -2, 2]]));
    }

    #[test]
    fn coxeter_element_is_r_alpha() {
        let [r1, r2, r3] = simple3().unwrap();
        let c = product(&[&r1, &r2, &r3]).unwrap();
        assert_eq!(c, IntMatrix::from_rows([[-1, 0, 0], [0, 1, 0], [0, 0, 1]]));
    }

    #[test]
    fn rank5_reflection_images() {
        let [r1, r2, r3] = simple5().unwrap();
        assert_eq!(image5(&r1, 1, 0, 0, 0, 0).unwrap(), image5(&id(), -1, 2, 0, 0, 0).unwrap());
        assert_eq!(image5(&r1, 0, 0, 0, 1, 0).unwrap(), image5(&id(), 1, -1, 0, 1, 0).unwrap());
        assert_eq!(image5(&r2, 0, 0, 0, 0, 1).unwrap(), image5(&id(), -1, 1, 1, 0, 1).unwrap());
        assert_eq!(image5(&r3, 0, 0, 0, 0, 1).unwrap(), image5(&id(), -1, 0, 1, 0, 1).unwrap());
        let c = tilde_coxeter().unwrap();
        assert_eq!(image5(&c, 1, 0, 0, 0, 0).unwrap(), image5(&id(), -1, 0, 0, 0, 0).unwrap());
        assert_eq!(image5(&c, 0, 1, 0, 0, 0).unwrap(), image5(&id(), 0, 1, 0, 0, 0).unwrap());
        assert_eq!(image5(&c, 0, 0, 0, 1, 0).unwrap(), image5(&id(), 0, 0, -1, 1, 0).unwrap());
        assert_eq!(image5(&c, 0, 0, 0, 0, 1).unwrap(), image5(&id(), 0, -1, 0, 0, 1).unwrap());
        let t1 = r2.mul(&r3).unwrap();
        assert_eq!(image5(&t1, 0, 0, 0, 1, 0).unwrap(), image5(&id(), 1, -1, -1, 1, 0).unwrap());
        for r in [&r1, &r2, &r3] {
            assert!(r.preserves(&hyperbolic_form()).unwrap());
        }
    }

    fn id() -> IntMatrix {
        IntMatrix::identity(5)
    }

    #[test]
    fn named_relations_hold() {
        for id in RELATION_IDS {
            assert!(group_relation_check(id).unwrap(), "{id}");
        }
        assert!(matches!(group_relation_check("nope"), Err(Error::UnknownRelation(_))));
    }

    #[test]
    fn reflections_are_isometric_involutions() {
        for b in enumerate_roots(3) {
            let r = reflection(&b).unwrap();
            assert!(r.preserves_form().unwrap());
            assert_eq!(r.matrix.mul(&r.matrix).unwrap(), IntMatrix::identity(3));
            let r5 = reflection_rank5(&Rank5Class::from_rank3(&b).unwrap()).unwrap();
            assert!(r5.preserves_form().unwrap());
            assert_eq!(r5.determinant().unwrap(), -1);
        }
    }

    proptest! {
        #[test]
        fn roots_closed_under_simple_reflections(sign in prop::bool::ANY, p in -6i64..=6, q in -6i64..=6) {
            prop_assume!((p * q) % 2 == 0);
            let b = KClass::new([if sign { 1 } else { -1 }, -(p + 1), -(q + 1)], Basis::R);
            for r in simple3().unwrap() {
                let img = r.apply(&b.coords).unwrap();
                let k = KClass::new([img[0], img[1], img[2]], Basis::R);
                prop_assert!(is_real_root(&k).unwrap());
                let (pp, qq) = (-img[1] - 1, -img[2] - 1);
                prop_assert!(pp.abs() <= 8 && qq.abs() <= 8);
            }
        }
    }
}
