use std::sync::Arc;

use num_complex::Complex64;

use super::family::MatrixFamily;
use super::value::FormValue;
use crate::fd::{default_step, partial};
use crate::{CMat, Error, Result};

type ValueFn = Arc<dyn Fn(&[f64]) -> Result<FormValue> + Send + Sync>;
type PartialsFn = Arc<dyn Fn(&[f64]) -> Result<Vec<FormValue>> + Send + Sync>;

/// How coefficient derivatives are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DerivativeScheme {
    #[default]
    Analytic,
    /// Central differences with one Richardson pass; `None` selects `10^{-5}(1+|x|)`.
    FiniteDifference(Option<f64>),
}

/// A lazily evaluated matrix-valued `q`-form on `ℝ^p`.
#[derive(Clone)]
pub struct MatrixForm {
    pub p: usize,
    pub rank: usize,
    pub degree: usize,
    value: ValueFn,
    partials: Option<PartialsFn>,
}

impl std::fmt::Debug for MatrixForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MatrixForm")
            .field("p", &self.p)
            .field("rank", &self.rank)
            .field("degree", &self.degree)
            .field("analytic_partials", &self.partials.is_some())
            .finish()
    }
}

impl MatrixForm {
    pub fn new<F>(p: usize, rank: usize, degree: usize, value: F) -> Self
    where
        F: Fn(&[f64]) -> Result<FormValue> + Send + Sync + 'static,
    {
        Self {
            p,
            rank,
            degree,
            value: Arc::new(value),
            partials: None,
        }
    }

    /// Attach analytic coordinate partials `[∂_0 ω, …, ∂_{p-1} ω]`.
    pub fn with_partials<G>(mut self, g: G) -> Self
    where
        G: Fn(&[f64]) -> Result<Vec<FormValue>> + Send + Sync + 'static,
    {
        self.partials = Some(Arc::new(g));
        self
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.partials.is_some()
    }

    pub fn zero(p: usize, rank: usize, degree: usize) -> Self {
        MatrixForm::new(p, rank, degree, move |_| Ok(FormValue::zero(p, rank, degree)))
            .with_partials(move |_| Ok(vec![FormValue::zero(p, rank, degree); p]))
    }

    /// Constant-coefficient form.
    pub fn constant(value: FormValue) -> Self {
        let (p, rank, degree) = (value.p, value.rank, value.degree);
        let zero = FormValue::zero(p, rank, degree);
        MatrixForm::new(p, rank, degree, move |_| Ok(value.clone()))
            .with_partials(move |_| Ok(vec![zero.clone(); p]))
    }

    /// The family itself as a 0-form.
    pub fn function(f: &MatrixFamily) -> Self {
        let p = f.p;
        let (f1, f2) = (f.clone(), f.clone());
        let mut w = MatrixForm::new(p, f.rank, 0, move |x| Ok(FormValue::function(p, f1.eval(x)?)));
        if f.has_analytic_partials() {
            w = w.with_partials(move |x| {
                Ok(f2.partials(x)?.into_iter().map(|d| FormValue::function(p, d)).collect())
            });
        }
        w
    }

    /// `df = Σ_j ∂_j f dx_j`.
    pub fn differential(f: &MatrixFamily) -> Self {
        let p = f.p;
        let (f1, f2) = (f.clone(), f.clone());
        let mut w = MatrixForm::new(p, f.rank, 1, move |x| FormValue::one_form(p, f1.partials(x)?));
        if f.has_analytic_second() {
            w = w.with_partials(move |x| {
                let h = f2.second(x)?;
                (0..p)
                    .map(|i| FormValue::one_form(p, (0..p).map(|j| h[j][i].clone()).collect()))
                    .collect()
            });
        }
        w
    }

    pub fn eval(&self, x: &[f64]) -> Result<FormValue> {
        if x.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: x.len(),
            });
        }
        (self.value)(x)
    }

    /// Coordinate partials of the coefficients at `x`.
    pub fn partials(&self, x: &[f64], scheme: DerivativeScheme) -> Result<Vec<FormValue>> {
        match scheme {
            DerivativeScheme::Analytic => match &self.partials {
                Some(g) => g(x),
                None => Err(Error::DerivativeUnavailable(
                    "form has no analytic partials; use a finite-difference scheme".into(),
                )),
            },
            DerivativeScheme::FiniteDifference(h) => {
                let h = h.unwrap_or_else(|| default_step(x));
                (0..self.p)
                    .map(|j| partial(&|y: &[f64]| self.eval(y), x, j, h))
                    .collect()
            }
        }
    }

    fn check(&self, other: &MatrixForm) -> Result<()> {
        if self.p != other.p || self.rank != other.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: other.rank,
            });
        }
        Ok(())
    }

    /// `self ∧ other`. Degrees above `p` give the zero form with the overflow flag set.
    pub fn wedge(&self, other: &MatrixForm) -> Result<MatrixForm> {
        self.check(other)?;
        let degree = (self.degree + other.degree).min(self.p);
        let (a, b) = (self.clone(), other.clone());
        let mut w = MatrixForm::new(self.p, self.rank, degree, move |x| a.eval(x)?.wedge(&b.eval(x)?));
        if self.partials.is_some() && other.partials.is_some() {
            let (a, b) = (self.clone(), other.clone());
            w = w.with_partials(move |x| {
                let (av, bv) = (a.eval(x)?, b.eval(x)?);
                let (da, db) = (
                    a.partials(x, DerivativeScheme::Analytic)?,
                    b.partials(x, DerivativeScheme::Analytic)?,
                );
                da.iter()
                    .zip(&db)
                    .map(|(da, db)| da.wedge(&bv)?.add(&av.wedge(db)?))
                    .collect()
            });
        }
        Ok(w)
    }

    pub fn add(&self, other: &MatrixForm) -> Result<MatrixForm> {
        self.check(other)?;
        if self.degree != other.degree {
            return Err(Error::InvalidInput("cannot add forms of different degree".into()));
        }
        let (a, b) = (self.clone(), other.clone());
        let mut w = MatrixForm::new(self.p, self.rank, self.degree, move |x| a.eval(x)?.add(&b.eval(x)?));
        if self.partials.is_some() && other.partials.is_some() {
            let (a, b) = (self.clone(), other.clone());
            w = w.with_partials(move |x| {
                let da = a.partials(x, DerivativeScheme::Analytic)?;
                let db = b.partials(x, DerivativeScheme::Analytic)?;
                da.iter().zip(&db).map(|(u, v)| u.add(v)).collect()
            });
        }
        Ok(w)
    }

    pub fn scale(&self, s: Complex64) -> MatrixForm {
        let a = self.clone();
        let mut w = MatrixForm::new(self.p, self.rank, self.degree, move |x| Ok(a.eval(x)?.scale(s)));
        if self.partials.is_some() {
            let a = self.clone();
            w = w.with_partials(move |x| {
                Ok(a.partials(x, DerivativeScheme::Analytic)?
                    .into_iter()
                    .map(|d| d.scale(s))
                    .collect())
            });
        }
        w
    }

    /// Pointwise trace (rank 1 result).
    pub fn trace(&self) -> MatrixForm {
        let a = self.clone();
        let mut w = MatrixForm::new(self.p, 1, self.degree, move |x| Ok(a.eval(x)?.trace()));
        if self.partials.is_some() {
            let a = self.clone();
            w = w.with_partials(move |x| {
                Ok(a.partials(x, DerivativeScheme::Analytic)?
                    .iter()
                    .map(FormValue::trace)
                    .collect())
            });
        }
        w
    }

    /// `B^{-1} ω B`, pointwise.
    pub fn conjugate_by(&self, b: &MatrixFamily) -> Result<MatrixForm> {
        if b.p != self.p || b.rank != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: b.rank,
            });
        }
        let (a, bf) = (self.clone(), b.clone());
        Ok(MatrixForm::new(self.p, self.rank, self.degree, move |x| {
            let bm = bf.eval(x)?;
            let binv = super::family::invert(&bm, x)?;
            Ok(a.eval(x)?.sandwich(&binv, &bm))
        }))
    }

    /// `dω = Σ_j dx_j ∧ ∂_j ω`. The result has no analytic partials, so a
    /// second `d` must use a finite-difference scheme.
    pub fn exterior_derivative(&self, scheme: DerivativeScheme) -> Result<MatrixForm> {
        if scheme == DerivativeScheme::Analytic && self.partials.is_none() {
            return Err(Error::DerivativeUnavailable(
                "form has no analytic partials; use a finite-difference scheme".into(),
            ));
        }
        let a = self.clone();
        let (p, rank) = (self.p, self.rank);
        let degree = (self.degree + 1).min(p);
        let overflow = self.degree + 1 > p;
        Ok(MatrixForm::new(p, rank, degree, move |x| {
            if overflow {
                let mut z = FormValue::zero(p, rank, p);
                z.overflow = true;
                return Ok(z);
            }
            let parts = a.partials(x, scheme)?;
            let mut out = FormValue::zero(p, rank, degree);
            for (j, d) in parts.iter().enumerate() {
                out = out.add(&d.dx_wedge(j))?;
            }
            Ok(out)
        }))
    }
}

/// `ω^q` for a form given pointwise, with product-rule partials.
pub(crate) fn power_value(w: &FormValue, q: usize) -> Result<FormValue> {
    let mut acc = w.clone();
    for _ in 1..q {
        acc = acc.wedge(w)?;
    }
    Ok(acc)
}

pub(crate) fn power_partials(w: &FormValue, dw: &[FormValue], q: usize) -> Result<Vec<FormValue>> {
    // Powers w^0 .. w^{q-1}, with w^0 the identity 0-form.
    let one = FormValue::function(w.p, CMat::identity(w.rank, w.rank));
    let mut pows = vec![one];
    for m in 1..q {
        let next = pows[m - 1].wedge(w)?;
        pows.push(next);
    }
    dw.iter()
        .map(|d| {
            let mut total: Option<FormValue> = None;
            for m in 0..q {
                let term = pows[m].wedge(d)?.wedge(&pows[q - 1 - m])?;
                total = Some(match total {
                    None => term,
                    Some(t) => t.add(&term)?,
                });
            }
            Ok(total.expect("q >= 1"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_family() -> MatrixFamily {
        MatrixFamily::new(3, 1, |x: &[f64]| {
            Ok(CMat::from_element(1, 1, Complex64::new(x[0] * x[1] + x[2].sin(), x[0])))
        })
    }

    #[test]
    fn d_of_coordinate_one_form() {
        // d(x_2 dx_1) = dx_2 ∧ dx_1 = -dx_1 ∧ dx_2.
        let w = MatrixForm::new(3, 1, 1, |x: &[f64]| {
            let mut v = FormValue::zero(3, 1, 1);
            v.set(&[0], CMat::from_element(1, 1, Complex64::new(x[1], 0.0)));
            Ok(v)
        });
        let dw = w.exterior_derivative(DerivativeScheme::FiniteDifference(None)).unwrap();
        let v = dw.eval(&[0.3, 0.4, 0.5]).unwrap();
        assert!((v.scalar(0b011).re + 1.0).abs() < 1e-10);
        assert!(v.scalar(0b101).norm() < 1e-10);
        assert!(w.exterior_derivative(DerivativeScheme::Analytic).is_err());
    }

    #[test]
    fn dd_vanishes_on_exact_forms() {
        let f = scalar_family();
        let df = MatrixForm::function(&f)
            .exterior_derivative(DerivativeScheme::FiniteDifference(None))
            .unwrap();
        // A coarser outer step keeps the nested difference out of round-off.
        let ddf = df.exterior_derivative(DerivativeScheme::FiniteDifference(Some(1e-3))).unwrap();
        let v = ddf.eval(&[0.2, -0.7, 1.3]).unwrap();
        assert!(v.max_abs() < 1e-7, "{}", v.max_abs());
    }

    #[test]
    fn constant_forms_are_closed() {
        let mut v = FormValue::zero(2, 1, 1);
        v.set(&[1], CMat::from_element(1, 1, Complex64::new(2.0, 0.0)));
        let w = MatrixForm::constant(v);
        let d = w.exterior_derivative(DerivativeScheme::Analytic).unwrap();
        assert_eq!(d.eval(&[1.0, 2.0]).unwrap().max_abs(), 0.0);
    }
}
