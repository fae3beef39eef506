//! Exact integer arithmetic on the Grothendieck lattice: Euler forms, the
//! Serre matrix, twist matrices, braid mutations, real roots and the rank-5
//! hyperbolic extension.

mod braid;
mod matrix;
mod roots;
mod spectrum;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub use braid::{braid_to_sl2, is_class_exceptional, mutate, BraidToken, BraidWord};
pub use matrix::IntMatrix;
pub use roots::{
    enumerate_roots, group_relation_check, hyperbolic_form, is_real_root, reflection, reflection_rank5,
    simple_roots, symmetric_form, Rank5Class, RELATION_IDS,
};
pub use spectrum::{chi_a_spectrum, exponent_variance, ChiSpectrum};

/// Coordinate systems on the rank-3 lattice. `P` lists projectives as
/// (P3, P2, P1); `R` is (alpha, delta1, delta2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    S,
    P,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KClass {
    pub coords: [i64; 3],
    pub basis: Basis,
}

/// Which bilinear form a map is meant to preserve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormKind {
    Euler,
    Symmetric,
    Hyperbolic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeMap {
    pub matrix: IntMatrix,
    pub preserved_form: FormKind,
    /// Coordinates the matrix is written in; `None` for rank 5.
    pub basis: Option<Basis>,
}

impl LatticeMap {
    pub fn form_matrix(&self) -> Result<IntMatrix> {
        match (self.preserved_form, self.basis) {
            (FormKind::Euler, Some(b)) => euler_matrix(b),
            (FormKind::Symmetric, Some(b)) => symmetric_form(b),
            _ => Ok(hyperbolic_form()),
        }
    }

    pub fn preserves_form(&self) -> Result<bool> {
        self.matrix.preserves(&self.form_matrix()?)
    }

    pub fn determinant(&self) -> Result<i64> {
        self.matrix.determinant()
    }
}

/// Columns are the basis vectors written in the P basis.
fn to_p(b: Basis) -> IntMatrix {
    match b {
        Basis::P => IntMatrix::identity(3),
        Basis::R => IntMatrix::from_rows([[1, -1, 0], [-1, 1, -1], [1, 0, 1]]),
        Basis::S => IntMatrix::from_rows([[2, -2, 1], [-2, 1, 0], [1, 0, 0]]),
    }
}

pub(crate) fn euler_p() -> IntMatrix {
    IntMatrix::from_rows([[1, 2, 2], [0, 1, 2], [0, 0, 1]])
}

/// Gram matrix of the Euler form, chi(x, y) = x^T M y.
pub fn euler_matrix(b: Basis) -> Result<IntMatrix> {
    let c = to_p(b);
    c.transpose().mul(&euler_p())?.mul(&c)
}

/// Matrix taking `from` coordinates to `to` coordinates.
pub fn change_of_basis(from: Basis, to: Basis) -> Result<IntMatrix> {
    to_p(to).inverse()?.mul(&to_p(from))
}

impl KClass {
    pub fn new(coords: [i64; 3], basis: Basis) -> Self {
        KClass { coords, basis }
    }

    pub fn in_basis(&self, b: Basis) -> Result<KClass> {
        let v = change_of_basis(self.basis, b)?.apply(&self.coords)?;
        Ok(KClass { coords: [v[0], v[1], v[2]], basis: b })
    }

    pub fn alpha() -> Self {
        KClass::new([1, 0, 0], Basis::R)
    }

    pub fn delta1() -> Self {
        KClass::new([0, 1, 0], Basis::R)
    }

    pub fn delta2() -> Self {
        KClass::new([0, 0, 1], Basis::R)
    }

    /// [P(k)] for k = 1, 2, 3.
    pub fn projective(k: usize) -> Self {
        let mut c = [0; 3];
        c[3 - k.clamp(1, 3)] = 1;
        KClass::new(c, Basis::P)
    }

    pub fn scale(&self, s: i64) -> Result<KClass> {
        let mut c = self.coords;
        for x in c.iter_mut() {
            *x = x.checked_mul(s).ok_or(crate::error::Error::Overflow("class scaling"))?;
        }
        Ok(KClass { coords: c, basis: self.basis })
    }

    /// a*self - other, in self's basis.
    pub(crate) fn combine(&self, a: i64, other: &KClass) -> Result<KClass> {
        let o = other.in_basis(self.basis)?;
        let mut c = [0i64; 3];
        for k in 0..3 {
            c[k] = self.coords[k]
                .checked_mul(a)
                .and_then(|x| x.checked_sub(o.coords[k]))
                .ok_or(crate::error::Error::Overflow("class combination"))?;
        }
        Ok(KClass { coords: c, basis: self.basis })
    }
}

pub fn euler_form(x: &KClass, y: &KClass) -> Result<i64> {
    let xp = x.in_basis(Basis::P)?;
    let yp = y.in_basis(Basis::P)?;
    euler_p().bilinear(&xp.coords, &yp.coords)
}

/// chi^{-1} chi^T in the requested coordinates.
pub fn serre_matrix(b: Basis) -> Result<LatticeMap> {
    let chi = euler_matrix(b)?;
    Ok(LatticeMap { matrix: chi.inverse()?.mul(&chi.transpose())?, preserved_form: FormKind::Euler, basis: Some(b) })
}

/// x -> x - sum_i chi(e_i, x) e_i written in coordinates `b`.
pub fn twist_matrix(classes: &[KClass], b: Basis) -> Result<LatticeMap> {
    if classes.is_empty() {
        return Err(crate::error::Error::InvalidInput("twist needs at least one class".into()));
    }
    let es = classes.iter().map(|e| e.in_basis(b)).collect::<Result<Vec<_>>>()?;
    let mut cols = Vec::with_capacity(3);
    for j in 0..3 {
        let mut unit = [0i64; 3];
        unit[j] = 1;
        let x = KClass::new(unit, b);
        let mut col = unit;
        for e in &es {
            let k = euler_form(e, &x)?;
            for (c, &ec) in col.iter_mut().zip(&e.coords) {
                *c = k.checked_mul(ec).and_then(|v| c.checked_sub(v)).ok_or(crate::error::Error::Overflow("twist"))?;
            }
        }
        cols.push(col.to_vec());
    }
    let matrix = IntMatrix::from_columns(&cols);
    matrix.inverse()?;
    Ok(LatticeMap { matrix, preserved_form: FormKind::Euler, basis: Some(b) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn euler_matrices_in_all_bases() {
        assert_eq!(euler_matrix(Basis::S).unwrap(), IntMatrix::from_rows([[1, -2, 2], [0, 1, -2], [0, 0, 1]]));
        assert_eq!(euler_matrix(Basis::R).unwrap(), IntMatrix::from_rows([[1, 0, 0], [0, 0, 1], [0, -1, 0]]));
        let (p3, p2) = (KClass::projective(3), KClass::projective(2));
        assert_eq!(euler_form(&p3, &p2).unwrap(), 2);
        assert_eq!(euler_form(&KClass::alpha(), &KClass::alpha()).unwrap(), 1);
        assert_eq!(euler_form(&KClass::delta1(), &KClass::delta2()).unwrap(), 1);
        assert_eq!(euler_form(&KClass::delta2(), &KClass::delta1()).unwrap(), -1);
    }

    #[test]
    fn basis_changes_are_inverse() {
        for a in [Basis::S, Basis::P, Basis::R] {
            for b in [Basis::S, Basis::P, Basis::R] {
                let m = change_of_basis(a, b).unwrap().mul(&change_of_basis(b, a).unwrap()).unwrap();
                assert_eq!(m, IntMatrix::identity(3));
            }
        }
        let a1 = KClass::new([1, 0, 0], Basis::S).in_basis(Basis::R).unwrap();
        assert_eq!(a1.coords, [1, -1, 0]);
        let a2 = KClass::new([0, 1, 0], Basis::S).in_basis(Basis::R).unwrap();
        assert_eq!(a2.coords, [-1, 1, 1]);
        let a3 = KClass::new([0, 0, 1], Basis::S).in_basis(Basis::R).unwrap();
        assert_eq!(a3.coords, [1, 0, -1]);
    }

    #[test]
    fn serre_matrices() {
        let r = serre_matrix(Basis::R).unwrap().matrix;
        assert_eq!(r, IntMatrix::from_rows([[1, 0, 0], [0, -1, 0], [0, 0, -1]]));
        assert_eq!(r.mul(&r).unwrap(), IntMatrix::identity(3));
        let p = serre_matrix(Basis::P).unwrap().matrix;
        assert_eq!(p, IntMatrix::from_rows([[1, 2, 2], [-2, -3, -2], [2, 2, 1]]));
        assert_eq!(p.mul(&p).unwrap(), IntMatrix::identity(3));
        assert!(serre_matrix(Basis::S).unwrap().preserves_form().unwrap());
    }

    #[test]
    fn spherical_twists() {
        let t1 = twist_matrix(&[KClass::delta1()], Basis::R).unwrap();
        assert_eq!(t1.matrix.inverse().unwrap(), IntMatrix::from_rows([[1, 0, 0], [0, 1, 1], [0, 0, 1]]));
        let t2 = twist_matrix(&[KClass::delta2()], Basis::R).unwrap();
        assert_eq!(t2.matrix.inverse().unwrap(), IntMatrix::from_rows([[1, 0, 0], [0, 1, 0], [0, -1, 1]]));
        for t in [&t1, &t2] {
            assert!(t.preserves_form().unwrap());
            assert_eq!(t.matrix.apply(&[1, 0, 0]).unwrap(), vec![1, 0, 0]);
        }
        let serre = serre_matrix(Basis::R).unwrap().matrix;
        let prod = t1.matrix.mul(&t2.matrix).unwrap().pow(-3).unwrap();
        assert_eq!(prod, serre);
    }

    #[test]
    fn two_cycle_twist_is_inverse_serre_shifted() {
        let t = twist_matrix(&[KClass::alpha(), KClass::alpha()], Basis::R).unwrap();
        let want = serre_matrix(Basis::R).unwrap().matrix.inverse().unwrap().neg().unwrap();
        assert_eq!(t.matrix, want);
        assert!(t.preserves_form().unwrap());
    }

    #[test]
    fn non_exceptional_twist_rejected() {
        let two_alpha = KClass::alpha().scale(2).unwrap();
        assert!(matches!(twist_matrix(&[two_alpha], Basis::R), Err(Error::NotInvertible)));
        assert!(twist_matrix(&[], Basis::R).is_err());
    }
}
