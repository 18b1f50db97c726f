use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::fd::{default_step, partial};
use crate::{CMat, Error, Result};

type EvalFn = Arc<dyn Fn(&[f64]) -> Result<CMat> + Send + Sync>;
type PartialsFn = Arc<dyn Fn(&[f64]) -> Result<Vec<CMat>> + Send + Sync>;
type SecondFn = Arc<dyn Fn(&[f64]) -> Result<Vec<Vec<CMat>>> + Send + Sync>;

/// A matrix-valued function `ℝ^p → M_N(ℂ)` with optional analytic derivatives.
#[derive(Clone)]
pub struct MatrixFamily {
    pub p: usize,
    pub rank: usize,
    eval: EvalFn,
    partials: Option<PartialsFn>,
    second: Option<SecondFn>,
    pub invertible_hint: bool,
}

impl std::fmt::Debug for MatrixFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MatrixFamily")
            .field("p", &self.p)
            .field("rank", &self.rank)
            .field("analytic_partials", &self.partials.is_some())
            .field("analytic_second", &self.second.is_some())
            .finish()
    }
}

fn check_dim(p: usize, x: &[f64]) -> Result<()> {
    if x.len() == p {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: p,
            got: x.len(),
        })
    }
}

impl MatrixFamily {
    pub fn new<F>(p: usize, rank: usize, eval: F) -> Self
    where
        F: Fn(&[f64]) -> Result<CMat> + Send + Sync + 'static,
    {
        Self {
            p,
            rank,
            eval: Arc::new(eval),
            partials: None,
            second: None,
            invertible_hint: false,
        }
    }

    /// Attach analytic first partials `[∂_0 f, …, ∂_{p-1} f]`.
    pub fn with_partials<G>(mut self, g: G) -> Self
    where
        G: Fn(&[f64]) -> Result<Vec<CMat>> + Send + Sync + 'static,
    {
        self.partials = Some(Arc::new(g));
        self
    }

    /// Attach analytic second partials `h[i][j] = ∂_i ∂_j f`.
    pub fn with_second<G>(mut self, g: G) -> Self
    where
        G: Fn(&[f64]) -> Result<Vec<Vec<CMat>>> + Send + Sync + 'static,
    {
        self.second = Some(Arc::new(g));
        self
    }

    pub fn invertible(mut self) -> Self {
        self.invertible_hint = true;
        self
    }

    /// The constant family.
    pub fn constant(p: usize, m: CMat) -> Self {
        let rank = m.nrows();
        let m2 = m.clone();
        MatrixFamily::new(p, rank, move |_| Ok(m2.clone()))
            .with_partials(move |_| Ok(vec![CMat::zeros(rank, rank); p]))
            .with_second(move |_| Ok(vec![vec![CMat::zeros(rank, rank); p]; p]))
    }

    /// Affine family `m0 + Σ x_j m_j` with exact derivatives.
    pub fn affine(m0: CMat, slopes: Vec<CMat>) -> Self {
        let p = slopes.len();
        let rank = m0.nrows();
        let s1 = slopes.clone();
        MatrixFamily::new(p, rank, move |x| {
            check_dim(p, x)?;
            let mut m = m0.clone();
            for (xj, a) in x.iter().zip(&s1) {
                m += a * Complex64::new(*xj, 0.0);
            }
            Ok(m)
        })
        .with_partials(move |_| Ok(slopes.clone()))
        .with_second(move |_| Ok(vec![vec![CMat::zeros(rank, rank); p]; p]))
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.partials.is_some()
    }

    pub fn has_analytic_second(&self) -> bool {
        self.partials.is_some() && self.second.is_some()
    }

    pub fn eval(&self, x: &[f64]) -> Result<CMat> {
        check_dim(self.p, x)?;
        let m = (self.eval)(x)?;
        if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { at: x.to_vec() });
        }
        Ok(m)
    }

    /// First partials, analytic when available, otherwise Richardson differences.
    pub fn partials(&self, x: &[f64]) -> Result<Vec<CMat>> {
        check_dim(self.p, x)?;
        match &self.partials {
            Some(g) => g(x),
            None => {
                let h = default_step(x);
                (0..self.p)
                    .map(|j| partial(&|y: &[f64]| self.eval(y), x, j, h))
                    .collect()
            }
        }
    }

    /// Second partials; differences of the first partials when not analytic.
    pub fn second(&self, x: &[f64]) -> Result<Vec<Vec<CMat>>> {
        check_dim(self.p, x)?;
        if let (Some(_), Some(s)) = (&self.partials, &self.second) {
            return s(x);
        }
        let h = default_step(x);
        (0..self.p)
            .map(|i| {
                let di = |y: &[f64]| -> Result<Vec<CMat>> { self.partials(y) };
                let d: Vec<CMat> = (0..self.p)
                    .map(|j| partial(&|y: &[f64]| Ok(di(y)?[j].clone()), x, i, h))
                    .collect::<Result<_>>()?;
                Ok(d)
            })
            .collect()
    }

    /// Pointwise inverse, with the offending point on failure.
    pub fn inverse_at(&self, x: &[f64]) -> Result<CMat> {
        invert(&self.eval(x)?, x)
    }

    /// `x ↦ A(x) B(x)` with product-rule derivatives.
    pub fn product(&self, other: &MatrixFamily) -> Result<MatrixFamily> {
        if self.p != other.p || self.rank != other.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: other.rank,
            });
        }
        let (a, b) = (self.clone(), other.clone());
        let (a1, b1) = (self.clone(), other.clone());
        let (a2, b2) = (self.clone(), other.clone());
        let mut fam = MatrixFamily::new(self.p, self.rank, move |x| Ok(a.eval(x)? * b.eval(x)?));
        fam.invertible_hint = self.invertible_hint && other.invertible_hint;
        if self.partials.is_some() && other.partials.is_some() {
            fam = fam.with_partials(move |x| {
                let (av, bv) = (a1.eval(x)?, b1.eval(x)?);
                let (da, db) = (a1.partials(x)?, b1.partials(x)?);
                Ok(da.iter().zip(&db).map(|(da, db)| da * &bv + &av * db).collect())
            });
            if self.has_analytic_second() && other.has_analytic_second() {
                fam = fam.with_second(move |x| {
                    let (av, bv) = (a2.eval(x)?, b2.eval(x)?);
                    let (da, db) = (a2.partials(x)?, b2.partials(x)?);
                    let (ha, hb) = (a2.second(x)?, b2.second(x)?);
                    let p = da.len();
                    Ok((0..p)
                        .map(|i| {
                            (0..p)
                                .map(|j| {
                                    &ha[i][j] * &bv + &da[i] * &db[j] + &da[j] * &db[i] + &av * &hb[i][j]
                                })
                                .collect()
                        })
                        .collect())
                });
            }
        }
        Ok(fam)
    }

    /// `x ↦ A(Ox)` for a `p × p` matrix `O`.
    pub fn rotated(&self, o: &DMatrix<f64>) -> Result<MatrixFamily> {
        if o.nrows() != self.p || o.ncols() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: o.nrows(),
            });
        }
        let apply = {
            let o = o.clone();
            move |x: &[f64]| -> Vec<f64> { (&o * nalgebra::DVector::from_column_slice(x)).as_slice().to_vec() }
        };
        let (a, a1, a2) = (self.clone(), self.clone(), self.clone());
        let (ap, ap1, ap2) = (apply.clone(), apply.clone(), apply);
        let (o1, o2) = (o.clone(), o.clone());
        let p = self.p;
        let mut fam = MatrixFamily::new(p, self.rank, move |x| {
            check_dim(p, x)?;
            a.eval(&ap(x))
        });
        fam.invertible_hint = self.invertible_hint;
        if self.partials.is_some() {
            fam = fam.with_partials(move |x| {
                check_dim(p, x)?;
                let d = a1.partials(&ap1(x))?;
                Ok((0..p)
                    .map(|j| {
                        d.iter()
                            .enumerate()
                            .fold(CMat::zeros(d[0].nrows(), d[0].ncols()), |acc, (i, di)| {
                                acc + di * Complex64::new(o1[(i, j)], 0.0)
                            })
                    })
                    .collect())
            });
            if self.has_analytic_second() {
                fam = fam.with_second(move |x| {
                    check_dim(p, x)?;
                    let h = a2.second(&ap2(x))?;
                    let n = h[0][0].nrows();
                    Ok((0..p)
                        .map(|k| {
                            (0..p)
                                .map(|l| {
                                    let mut acc = CMat::zeros(n, n);
                                    for i in 0..p {
                                        for j in 0..p {
                                            acc += &h[i][j] * Complex64::new(o2[(i, k)] * o2[(j, l)], 0.0);
                                        }
                                    }
                                    acc
                                })
                                .collect()
                        })
                        .collect())
                });
            }
        }
        Ok(fam)
    }
}

pub(crate) fn invert(m: &CMat, x: &[f64]) -> Result<CMat> {
    let scale = m.iter().fold(0.0f64, |s, z| s.max(z.norm()));
    if scale == 0.0 {
        return Err(Error::Singular { point: x.to_vec() });
    }
    let lu = m.clone().lu();
    let inv = lu.try_inverse().ok_or_else(|| Error::Singular { point: x.to_vec() })?;
    let inv_scale = inv.iter().fold(0.0f64, |s, z| s.max(z.norm()));
    if !inv_scale.is_finite() || inv_scale * scale > 1e14 {
        return Err(Error::Singular { point: x.to_vec() });
    }
    Ok(inv)
}
