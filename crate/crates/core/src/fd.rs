//! Central differences with one Richardson pass.

use num_complex::Complex64;

use crate::{Error, Result};

/// Default step `10^{-5} (1 + |x|)`.
pub fn default_step(x: &[f64]) -> f64 {
    let n: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    1e-5 * (1.0 + n)
}

/// Values that can be combined linearly by finite-difference formulas.
pub trait Linear: Clone {
    /// `a·self + b·other`.
    fn axpby(&self, a: f64, other: &Self, b: f64) -> Self;
}

impl Linear for Complex64 {
    fn axpby(&self, a: f64, other: &Self, b: f64) -> Self {
        self * a + other * b
    }
}

impl Linear for crate::CMat {
    fn axpby(&self, a: f64, other: &Self, b: f64) -> Self {
        self * Complex64::new(a, 0.0) + other * Complex64::new(b, 0.0)
    }
}

fn central<T, F>(f: &F, x: &[f64], j: usize, h: f64) -> Result<T>
where
    T: Linear,
    F: Fn(&[f64]) -> Result<T>,
{
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    xp[j] += h;
    xm[j] -= h;
    if xp[j] == x[j] || xm[j] == x[j] {
        return Err(Error::StepUnderflow {
            coordinate: j,
            x: x[j],
        });
    }
    let step = xp[j] - xm[j];
    Ok(f(&xp)?.axpby(1.0 / step, &f(&xm)?, -1.0 / step))
}

/// `∂_j f(x)` by `(4 D(h/2) - D(h)) / 3`.
pub fn partial<T, F>(f: &F, x: &[f64], j: usize, h: f64) -> Result<T>
where
    T: Linear,
    F: Fn(&[f64]) -> Result<T>,
{
    if j >= x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: j + 1,
        });
    }
    let coarse = central(f, x, j, h)?;
    let fine = central(f, x, j, 0.5 * h)?;
    Ok(fine.axpby(4.0 / 3.0, &coarse, -1.0 / 3.0))
}

/// Scalar convenience wrapper.
pub fn partial_scalar<F>(f: &F, x: &[f64], j: usize) -> Result<Complex64>
where
    F: Fn(&[f64]) -> Result<Complex64>,
{
    partial(f, x, j, default_step(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_derivative_of_smooth_function() {
        let f = |x: &[f64]| Ok(Complex64::new((x[0] * x[1]).sin(), x[1].exp()));
        let x = [0.7, -1.3];
        let d0 = partial_scalar(&f, &x, 0).unwrap();
        let d1 = partial_scalar(&f, &x, 1).unwrap();
        let c = (x[0] * x[1]).cos();
        assert!((d0 - Complex64::new(x[1] * c, 0.0)).norm() < 1e-10);
        assert!((d1 - Complex64::new(x[0] * c, x[1].exp())).norm() < 1e-10);
    }

    #[test]
    fn underflowing_step_is_reported() {
        let f = |x: &[f64]| Ok(Complex64::new(x[0], 0.0));
        let err = partial(&f, &[1e30], 0, 1e-5).unwrap_err();
        assert!(matches!(err, Error::StepUnderflow { coordinate: 0, .. }));
    }
}
