use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fit::{fit_expansion, Fallible, Integrand};
use super::model::ExpansionModel;
use super::regint::{regint_rp, RegintConfig};
use crate::{Error, Result};

/// Both sides of an identity computed by independent routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
}

impl IdentityCheck {
    pub fn defect(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }
}

/// Change of variables under a regular matrix `A`.
///
/// `lhs = ⨍ f(Aξ) dξ`; `rhs = |det A|^{-1} (⨍ f + Σ_l (-1)^{l+1}/(l+1) ∫_S f_{-p,l}(ξ) log^{l+1}|A^{-1}ξ| dξ)`.
/// Returns the pair and the correction term separately.
pub fn cov_correction(
    f: &dyn Integrand,
    p: usize,
    model: &ExpansionModel,
    a: &DMatrix<f64>,
    cfg: &RegintConfig,
) -> Result<(IdentityCheck, Complex64)> {
    if a.nrows() != p || a.ncols() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: a.nrows().max(a.ncols()),
        });
    }
    let det = a.determinant();
    let a_inv = a
        .clone()
        .try_inverse()
        .filter(|_| det.abs() > 0.0)
        .ok_or_else(|| Error::InvalidInput("change of variables needs an invertible matrix".into()))?;
    let pulled = Fallible(|xi: &[f64]| {
        let x = a * nalgebra::DVector::from_column_slice(xi);
        f.eval(x.as_slice())
    });
    let lhs = regint_rp(&pulled, p, model, cfg)?.value;
    let plain = regint_rp(f, p, model, cfg)?.value;

    let log_power = model
        .terms
        .iter()
        .find(|t| (t.degree + p as f64).abs() < 1e-12)
        .map(|t| t.log_power);
    let mut correction = Complex64::new(0.0, 0.0);
    if let Some(lmax) = log_power {
        let fit = fit_expansion(f, p, model, &cfg.ladder, cfg.sphere, &cfg.fit)?;
        fit.ensure_valid()?;
        for l in 0..=lmax {
            let sign = if l % 2 == 0 { -1.0 } else { 1.0 };
            let term = fit.sphere_integral(-(p as f64), l, |xi| {
                let y = &a_inv * nalgebra::DVector::from_column_slice(xi);
                Complex64::new(y.norm().ln().powi(l as i32 + 1), 0.0)
            })?;
            correction += term * (sign / (l as f64 + 1.0));
        }
    }
    let scale = 1.0 / det.abs();
    Ok((
        IdentityCheck {
            lhs,
            rhs: (plain + correction) * scale,
        },
        correction * scale,
    ))
}

/// Stokes defect in direction `j`: `⨍ ∂_j f = ∫_S f_{1-p,0}(ξ) ξ_j dξ`.
///
/// `derivative` evaluates `∂_j f`; when absent a Richardson central difference is used.
pub fn stokes_defect(
    f: &dyn Integrand,
    derivative: Option<&dyn Integrand>,
    p: usize,
    j: usize,
    model: &ExpansionModel,
    cfg: &RegintConfig,
) -> Result<IdentityCheck> {
    if j >= p {
        return Err(Error::DimensionMismatch { expected: p, got: j + 1 });
    }
    let degree = 1.0 - p as f64;
    let fit = fit_expansion(f, p, model, &cfg.ladder, cfg.sphere, &cfg.fit)?;
    fit.ensure_valid()?;
    let rhs = fit.sphere_integral(degree, 0, |xi| Complex64::new(xi[j], 0.0))?;
    let dmodel = model.shifted(-1.0);
    let lhs = match derivative {
        Some(d) => regint_rp(d, p, &dmodel, cfg)?.value,
        None => {
            let fd = Fallible(|x: &[f64]| crate::fd::partial_scalar(&|y: &[f64]| f.eval(y), x, j));
            regint_rp(&fd, p, &dmodel, cfg)?.value
        }
    };
    Ok(IdentityCheck { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::model::Term;
    use crate::cutoff::chi;
    use crate::sphere::SphereResolution;

    #[test]
    fn identity_matrix_has_no_correction() {
        let f = |x: &[f64]| Complex64::new(chi(x[0].abs()) / x[0].abs(), 0.0);
        let model = ExpansionModel::at_infinity(vec![Term::new(-1.0, 0)], -6.0).unwrap();
        let (chk, corr) =
            cov_correction(&f, 1, &model, &DMatrix::identity(1, 1), &RegintConfig::default()).unwrap();
        assert!(corr.norm() < 1e-12);
        assert!(chk.defect() < 1e-10);
    }

    #[test]
    fn dilation_on_the_line_produces_log_correction() {
        let f = |x: &[f64]| Complex64::new(chi(x[0].abs()) / x[0].abs(), 0.0);
        let model = ExpansionModel::at_infinity(vec![Term::new(-1.0, 0)], -6.0).unwrap();
        let a = DMatrix::from_element(1, 1, 2.0);
        let (chk, corr) = cov_correction(&f, 1, &model, &a, &RegintConfig::default()).unwrap();
        // (1/2)·(-1)·Σ_{±} log(1/2) = log 2.
        assert!((corr.re - 2f64.ln()).abs() < 1e-10, "{corr}");
        assert!(chk.defect() < 1e-8, "{chk:?}");
    }

    #[test]
    fn stokes_on_the_line() {
        let f = |x: &[f64]| Complex64::new(chi(x[0].abs()) * x[0].signum(), 0.0);
        let model = ExpansionModel::at_infinity(vec![Term::new(0.0, 0)], -6.0).unwrap();
        let chk = stokes_defect(&f, None, 1, 0, &model, &RegintConfig::default()).unwrap();
        assert!((chk.rhs.re - 2.0).abs() < 1e-12);
        assert!((chk.lhs.re - 2.0).abs() < 1e-8, "{chk:?}");
    }

    #[test]
    fn stokes_in_three_dimensions() {
        let f = |x: &[f64]| {
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            Complex64::new(chi(r) * x[0] / r.powi(3), 0.0)
        };
        let model = ExpansionModel::at_infinity(vec![Term::new(-2.0, 0)], -7.0).unwrap();
        let cfg = RegintConfig::default().with_sphere(SphereResolution::new(12, 24));
        let chk = stokes_defect(&f, None, 3, 0, &model, &cfg).unwrap();
        let expect = 4.0 * std::f64::consts::PI / 3.0;
        assert!((chk.rhs.re - expect).abs() < 1e-12);
        assert!((chk.lhs.re - expect).abs() < 1e-6, "{chk:?}");
    }
}
