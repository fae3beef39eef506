//! Truncated Taylor polynomials in two variables, used to carry exact
//! mixed derivatives through rational expressions.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::numeric::factorial;

/// Coefficients a[i][j] of dx^i dy^j with i + j <= order.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    order: usize,
    c: Vec<Complex64>,
}

impl Jet {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.order + 1) + j
    }

    pub fn zero(order: usize) -> Self {
        Jet { order, c: vec![Complex64::new(0.0, 0.0); (order + 1) * (order + 1)] }
    }

    pub fn constant(order: usize, v: Complex64) -> Self {
        let mut j = Jet::zero(order);
        j.c[0] = v;
        j
    }

    /// The function (x0 + dx) in the first slot.
    pub fn var_x(order: usize, x0: Complex64) -> Self {
        let mut j = Jet::constant(order, x0);
        if order > 0 {
            let k = j.idx(1, 0);
            j.c[k] = Complex64::new(1.0, 0.0);
        }
        j
    }

    /// Builds a jet from its partial derivatives d^(i+j) f / dx^i dy^j.
    pub fn from_partials<F: Fn(usize, usize) -> Complex64>(order: usize, partial: F) -> Self {
        let mut j = Jet::zero(order);
        for a in 0..=order {
            for b in 0..=order - a {
                let k = j.idx(a, b);
                j.c[k] = partial(a, b) / (factorial(a) * factorial(b));
            }
        }
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, i: usize, j: usize) -> Complex64 {
        if i + j > self.order {
            return Complex64::new(0.0, 0.0);
        }
        self.c[self.idx(i, j)]
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    /// d^(i+j) f / dx^i dy^j at the base point.
    pub fn partial(&self, i: usize, j: usize) -> Complex64 {
        self.coeff(i, j) * (factorial(i) * factorial(j))
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Jet::from_coeffs(order, |i, j| self.coeff(i, j))
    }

    fn from_coeffs<F: Fn(usize, usize) -> Complex64>(order: usize, f: F) -> Self {
        let mut out = Jet::zero(order);
        for a in 0..=order {
            for b in 0..=order - a {
                let k = out.idx(a, b);
                out.c[k] = f(a, b);
            }
        }
        out
    }

    pub fn dx(&self) -> Self {
        assert!(self.order > 0, "cannot differentiate an order-0 jet");
        Jet::from_coeffs(self.order - 1, |i, j| self.coeff(i + 1, j) * (i + 1) as f64)
    }

    pub fn dy(&self) -> Self {
        assert!(self.order > 0, "cannot differentiate an order-0 jet");
        Jet::from_coeffs(self.order - 1, |i, j| self.coeff(i, j + 1) * (j + 1) as f64)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Jet { order: self.order, c: self.c.iter().map(|v| v * s).collect() }
    }

    pub fn add_const(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.c[0] += s;
        out
    }

    pub fn recip(&self) -> Self {
        let f0 = self.value();
        // 1/(f0 (1 + g)) = (1/f0) sum (-g)^k
        let g = self.add_const(-f0).scale(f0.inv());
        let mut term = Jet::constant(self.order, Complex64::new(1.0, 0.0));
        let mut acc = term.clone();
        for _ in 0..self.order {
            term = &term * &g.scale(Complex64::new(-1.0, 0.0));
            acc = &acc + &term;
        }
        acc.scale(f0.inv())
    }

    pub fn div(&self, other: &Jet) -> Self {
        self * &other.recip()
    }

    /// exp of the jet, using exp(f0) * exp(g) with nilpotent g.
    pub fn exp(&self) -> Self {
        let f0 = self.value();
        let g = self.add_const(-f0);
        let mut term = Jet::constant(self.order, Complex64::new(1.0, 0.0));
        let mut acc = term.clone();
        for k in 1..=self.order {
            term = (&term * &g).scale(Complex64::new(1.0 / k as f64, 0.0));
            acc = &acc + &term;
        }
        acc.scale(f0.exp())
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        let order = self.order.min(o.order);
        Jet::from_coeffs(order, |i, j| self.coeff(i, j) + o.coeff(i, j))
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        let order = self.order.min(o.order);
        Jet::from_coeffs(order, |i, j| self.coeff(i, j) - o.coeff(i, j))
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let order = self.order.min(o.order);
        let mut out = Jet::zero(order);
        for a in 0..=order {
            for b in 0..=order - a {
                let mut s = Complex64::new(0.0, 0.0);
                for i in 0..=a {
                    for j in 0..=b {
                        s += self.coeff(i, j) * o.coeff(a - i, b - j);
                    }
                }
                let k = out.idx(a, b);
                out.c[k] = s;
            }
        }
        out
    }
}
