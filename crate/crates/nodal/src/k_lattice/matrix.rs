use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square integer matrix acting on column vectors; overflow is an error.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntMatrix(pub Vec<Vec<i64>>);

fn add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::Overflow("lattice addition"))
}

fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::Overflow("lattice multiplication"))
}

impl IntMatrix {
    pub fn from_rows<const N: usize>(rows: [[i64; N]; N]) -> Self {
        IntMatrix(rows.iter().map(|r| r.to_vec()).collect())
    }

    /// Matrix whose k-th column is `cols[k]`.
    pub fn from_columns(cols: &[Vec<i64>]) -> Self {
        let n = cols.len();
        IntMatrix((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
    }

    pub fn identity(n: usize) -> Self {
        IntMatrix((0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.0[i][j]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.0.iter().map(|r| r[j]).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        IntMatrix((0..n).map(|i| (0..n).map(|j| self.0[j][i]).collect()).collect())
    }

    pub fn neg(&self) -> Result<Self> {
        self.scale(-1)
    }

    pub fn scale(&self, s: i64) -> Result<Self> {
        let rows = self.0.iter().map(|r| r.iter().map(|&x| mul(x, s)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
        Ok(IntMatrix(rows))
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<Self> {
        let n = self.dim();
        let mut out = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0i64;
                for k in 0..n {
                    s = add(s, mul(self.0[i][k], other.0[k][j])?)?;
                }
                out[i][j] = s;
            }
        }
        Ok(IntMatrix(out))
    }

    pub fn apply(&self, v: &[i64]) -> Result<Vec<i64>> {
        self.0
            .iter()
            .map(|r| r.iter().zip(v).try_fold(0i64, |s, (&a, &b)| add(s, mul(a, b)?)))
            .collect()
    }

    /// x^T M y.
    pub fn bilinear(&self, x: &[i64], y: &[i64]) -> Result<i64> {
        let my = self.apply(y)?;
        x.iter().zip(&my).try_fold(0i64, |s, (&a, &b)| add(s, mul(a, b)?))
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut out = IntMatrix::identity(self.dim());
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base)?;
        }
        Ok(out)
    }

    fn rational(&self) -> Vec<Vec<Ratio<i128>>> {
        self.0.iter().map(|r| r.iter().map(|&x| Ratio::from_integer(x as i128)).collect()).collect()
    }

    pub fn determinant(&self) -> Result<i64> {
        let n = self.dim();
        let mut a = self.rational();
        let mut det = Ratio::from_integer(1i128);
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| a[r][col] != Ratio::from_integer(0)) else {
                return Ok(0);
            };
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            det *= a[col][col];
            for r in col + 1..n {
                let f = a[r][col] / a[col][col];
                for k in col..n {
                    let t = a[col][k] * f;
                    a[r][k] -= t;
                }
            }
        }
        let d = det.to_integer();
        i64::try_from(d).map_err(|_| Error::Overflow("determinant"))
    }

    /// Integer inverse; fails unless the determinant is a unit.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim();
        let zero = Ratio::from_integer(0i128);
        let mut a = self.rational();
        let mut inv: Vec<Vec<Ratio<i128>>> =
            (0..n).map(|i| (0..n).map(|j| Ratio::from_integer(i128::from(i == j))).collect()).collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| a[r][col] != zero).ok_or(Error::NotInvertible)?;
            a.swap(piv, col);
            inv.swap(piv, col);
            let p = a[col][col];
            for k in 0..n {
                a[col][k] /= p;
                inv[col][k] /= p;
            }
            for r in 0..n {
                if r != col && a[r][col] != zero {
                    let f = a[r][col];
                    for k in 0..n {
                        let (t1, t2) = (a[col][k] * f, inv[col][k] * f);
                        a[r][k] -= t1;
                        inv[r][k] -= t2;
                    }
                }
            }
        }
        let rows = inv
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| {
                        if !x.is_integer() {
                            return Err(Error::NotInvertible);
                        }
                        i64::try_from(x.to_integer()).map_err(|_| Error::Overflow("inverse"))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(IntMatrix(rows))
    }

    /// Whether M^T F M = F.
    pub fn preserves(&self, form: &IntMatrix) -> Result<bool> {
        Ok(self.transpose().mul(form)?.mul(self)? == *form)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_determinant() {
        let m = IntMatrix::from_rows([[2, 1, 0], [1, 1, 0], [0, 3, 1]]);
        assert_eq!(m.determinant().unwrap(), 1);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), IntMatrix::identity(3));
        let s = IntMatrix::from_rows([[2, 0], [0, 1]]);
        assert!(matches!(s.inverse(), Err(Error::NotInvertible)));
        assert_eq!(s.determinant().unwrap(), 2);
    }

    #[test]
    fn overflow_is_reported() {
        let m = IntMatrix::from_rows([[i64::MAX, 1], [0, 1]]);
        assert!(matches!(m.mul(&m), Err(Error::Overflow(_))));
    }

    #[test]
    fn negative_powers() {
        let m = IntMatrix::from_rows([[1, 1], [0, 1]]);
        assert_eq!(m.pow(-3).unwrap(), IntMatrix::from_rows([[1, -3], [0, 1]]));
        assert_eq!(m.pow(0).unwrap(), IntMatrix::identity(2));
    }
}
