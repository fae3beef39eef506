//! Small numerical helpers shared across modules.

use num_complex::Complex64;

use crate::error::Result;

pub const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// |a - b| measured relative to max(1, |a|, |b|).
pub fn scaled_diff(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / 1f64.max(a.norm()).max(b.norm())
}

/// Five-point central first derivative along the complex direction `h`.
pub fn diff5<F>(f: F, x: Complex64, h: Complex64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let fp2 = f(x + h * 2.0)?;
    let fp1 = f(x + h)?;
    let fm1 = f(x - h)?;
    let fm2 = f(x - h * 2.0)?;
    Ok((-fp2 + fp1 * 8.0 - fm1 * 8.0 + fm2) / (h * 12.0))
}

/// Five-point central second derivative along the complex direction `h`.
pub fn diff5_second<F>(f: F, x: Complex64, h: Complex64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let fp2 = f(x + h * 2.0)?;
    let fp1 = f(x + h)?;
    let f0 = f(x)?;
    let fm1 = f(x - h)?;
    let fm2 = f(x - h * 2.0)?;
    Ok((-fp2 + fp1 * 16.0 - f0 * 30.0 + fm1 * 16.0 - fm2) / (h * h * 12.0))
}

pub fn binomial(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

/// Determinant of a 3x3 complex matrix given by rows.
pub fn det3(m: &[[Complex64; 3]; 3]) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn max_abs_diff3(a: &[[Complex64; 3]; 3], b: &[[Complex64; 3]; 3]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}
