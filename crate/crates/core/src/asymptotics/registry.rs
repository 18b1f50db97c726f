use std::sync::Arc;

use num_complex::Complex64;

use super::model::{ExpansionModel, Term};
use crate::cutoff::chi;
use crate::ids::{expect_args, parse_call, positive_int};
use crate::quadrature::RadiusLadder;
use crate::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// A built-in test function on `ℝ^p` (or on `(0, ∞)` when `model_at_zero` is set).
#[derive(Clone)]
pub struct NamedFunction {
    pub id: String,
    pub p: usize,
    pub f: ScalarFn,
    pub model: ExpansionModel,
    pub model_at_zero: Option<ExpansionModel>,
    pub ladder: RadiusLadder,
    pub ladder_at_zero: RadiusLadder,
}

impl std::fmt::Debug for NamedFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NamedFunction")
            .field("id", &self.id)
            .field("p", &self.p)
            .field("model", &self.model)
            .finish()
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Ids: `lorentzian`, `cutoff_power(α,l)`, `power_log(α,l)`, `polynomial(c0,..,cn)`,
/// `cutoff_sign`, `cutoff_coordinate(j)`, `exp_decay`, `inv_x_one_plus_x`.
pub fn named_function(id: &str, p: usize) -> Result<NamedFunction> {
    if p == 0 {
        return Err(Error::InvalidInput("cone dimension must be positive".into()));
    }
    let (name, args) = parse_call(id)?;
    let pf = p as f64;
    let wide = RadiusLadder::default();
    let zero = RadiusLadder::default_at_zero();
    let line_only = || -> Result<()> {
        if p == 1 {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("`{name}` is defined on the line only")))
        }
    };
    let nf = |f: ScalarFn, model, model_at_zero, ladder, ladder_at_zero| NamedFunction {
        id: id.trim().to_string(),
        p,
        f,
        model,
        model_at_zero,
        ladder,
        ladder_at_zero,
    };
    Ok(match name.as_str() {
        "lorentzian" => {
            expect_args(&name, &args, 0)?;
            nf(
                Arc::new(|x: &[f64]| re(1.0 / (1.0 + x.iter().map(|v| v * v).sum::<f64>()))),
                ExpansionModel::powers(&[-2.0, -4.0, -6.0, -8.0], -10.0)?,
                Some(ExpansionModel::powers_at_zero(&[0.0, 2.0, 4.0, 6.0], 8.0)?),
                RadiusLadder::new(16.0, 65536.0, 24),
                RadiusLadder::new(2f64.powi(-20), 2f64.powi(-6), 24),
            )
        }
        "cutoff_power" => {
            expect_args(&name, &args, 2)?;
            let (alpha, l) = (args[0], args[1]);
            if l < 0.0 || l.fract() != 0.0 {
                return Err(Error::InvalidInput("log power must be a nonnegative integer".into()));
            }
            let li = l as i32;
            nf(
                Arc::new(move |x: &[f64]| {
                    let r = norm(x);
                    if r <= 0.5 {
                        re(0.0)
                    } else {
                        re(chi(r) * r.powf(alpha) * r.ln().powi(li))
                    }
                }),
                ExpansionModel::at_infinity(vec![Term::new(alpha, l as u32)], (alpha - 6.0).min(-pf - 4.0))?,
                None,
                wide,
                zero,
            )
        }
        "power_log" => {
            expect_args(&name, &args, 2)?;
            line_only()?;
            let (alpha, l) = (args[0], args[1]);
            if l < 0.0 || l.fract() != 0.0 {
                return Err(Error::InvalidInput("log power must be a nonnegative integer".into()));
            }
            let li = l as i32;
            let t = vec![Term::new(alpha, l as u32)];
            nf(
                Arc::new(move |x: &[f64]| {
                    let r = x[0].abs();
                    re(r.powf(alpha) * r.ln().powi(li))
                }),
                ExpansionModel::at_infinity(t.clone(), (alpha - 4.0).min(-2.0))?,
                Some(ExpansionModel::at_zero(t, (alpha + 4.0).max(0.0))?),
                wide,
                zero,
            )
        }
        "polynomial" => {
            line_only()?;
            if args.is_empty() {
                return Err(Error::InvalidInput("polynomial needs coefficients".into()));
            }
            let c = args.clone();
            let degs: Vec<f64> = (0..c.len()).rev().map(|d| d as f64).collect();
            nf(
                Arc::new(move |x: &[f64]| re(c.iter().rev().fold(0.0, |acc, ci| acc * x[0] + ci))),
                ExpansionModel::powers(&degs, -2.0)?,
                None,
                RadiusLadder::new(4.0, 4096.0, 24),
                zero,
            )
        }
        "cutoff_sign" => {
            expect_args(&name, &args, 0)?;
            line_only()?;
            nf(
                Arc::new(|x: &[f64]| re(chi(x[0].abs()) * x[0].signum())),
                ExpansionModel::at_infinity(vec![Term::new(0.0, 0)], -6.0)?,
                None,
                wide,
                zero,
            )
        }
        "cutoff_coordinate" => {
            expect_args(&name, &args, 1)?;
            let j = positive_int(&name, args[0] + 1.0)? - 1;
            if j >= p {
                return Err(Error::DimensionMismatch { expected: p, got: j + 1 });
            }
            nf(
                Arc::new(move |x: &[f64]| {
                    let r = norm(x);
                    if r <= 0.5 {
                        re(0.0)
                    } else {
                        re(chi(r) * x[j] * r.powf(-pf))
                    }
                }),
                ExpansionModel::at_infinity(vec![Term::new(1.0 - pf, 0)], -pf - 4.0)?,
                None,
                wide,
                zero,
            )
        }
        "exp_decay" => {
            expect_args(&name, &args, 0)?;
            nf(
                Arc::new(|x: &[f64]| re((-norm(x)).exp())),
                ExpansionModel::empty(-8.0 - pf),
                Some(ExpansionModel::powers_at_zero(&[0.0, 1.0, 2.0, 3.0], 4.0)?),
                RadiusLadder::new(64.0, 65536.0, 16),
                RadiusLadder::new(2f64.powi(-24), 2f64.powi(-8), 16),
            )
        }
        "inv_x_one_plus_x" => {
            expect_args(&name, &args, 0)?;
            line_only()?;
            nf(
                Arc::new(|x: &[f64]| {
                    let r = x[0].abs();
                    re(1.0 / (r * (1.0 + r)))
                }),
                ExpansionModel::powers(&[-2.0, -3.0, -4.0, -5.0], -6.0)?,
                Some(ExpansionModel::powers_at_zero(&[-1.0, 0.0, 1.0, 2.0, 3.0], 4.0)?),
                RadiusLadder::new(64.0, 65536.0, 24),
                RadiusLadder::new(1.0 / 65536.0, 1.0 / 64.0, 24),
            )
        }
        other => return Err(Error::InvalidInput(format!("unknown function id `{other}`"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_resolve() {
        for id in [
            "lorentzian",
            "cutoff_power(-1, 0)",
            "power_log(-1.5, 2)",
            "polynomial(1, 2, 3)",
            "cutoff_sign",
            "cutoff_coordinate(0)",
            "exp_decay",
            "inv_x_one_plus_x",
        ] {
            let nf = named_function(id, 1).unwrap();
            assert!((nf.f)(&[2.0]).re.is_finite(), "{id}");
        }
        assert!(named_function("polynomial(1,2)", 3).is_err());
        assert!(named_function("nonsense", 1).is_err());
        let p = named_function("polynomial(1, 0, 2)", 1).unwrap();
        assert_eq!((p.f)(&[3.0]).re, 19.0);
    }
}
