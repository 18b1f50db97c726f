use num_complex::Complex64;
use rayon::prelude::*;

use crate::asymptotics::{fit_radial, ExpansionModel, FitConfig, RegularizedValue, Term};
use crate::forms::MatrixForm;
use crate::quadrature::RadiusLadder;
use crate::sphere::{SphereResolution, SphereRule};
use crate::{Error, Result};

/// Model of `R ↦ ∫_{|x|=R} tr θ` from the model of the coefficients of `θ`
/// (a `(p-1)`-form on `ℝ^p`): degrees shift by `p - 1` and a constant is added.
pub fn boundary_model(theta: &ExpansionModel, p: usize) -> Result<ExpansionModel> {
    let shifted = theta.shifted(p as f64 - 1.0);
    if shifted.remainder >= 0.0 {
        return Err(Error::InvalidInput(format!(
            "boundary model remainder {} must be negative: declare every non-decaying term",
            shifted.remainder
        )));
    }
    let mut terms = shifted.terms.clone();
    if !terms.iter().any(|t| t.degree.abs() < 1e-12) {
        terms.push(Term::new(0.0, 0));
    }
    terms.sort_by(|a, b| b.degree.total_cmp(&a.degree));
    ExpansionModel::at_infinity(terms, shifted.remainder)
}

/// `T̃r(θ) = ⨍ d tr θ`, computed as the constant term of `R ↦ ∫_{|x|=R} tr θ`.
///
/// `model` describes that boundary integral (see [`boundary_model`]).
pub fn formal_trace_form(
    theta: &MatrixForm,
    model: &ExpansionModel,
    ladder: &RadiusLadder,
    sphere: SphereResolution,
    fit: &FitConfig,
) -> Result<RegularizedValue> {
    let p = theta.p;
    if p == 0 || theta.degree + 1 != p {
        return Err(Error::InvalidInput(format!(
            "formal trace needs a form of degree p - 1 = {}, got {}",
            p.saturating_sub(1),
            theta.degree
        )));
    }
    ladder.validate()?;
    let rule = SphereRule::new(p - 1, sphere);
    let full = (1u32 << p) - 1;
    let g = |r: f64| -> Result<Complex64> {
        let parts: Vec<Complex64> = rule
            .points
            .par_iter()
            .zip(rule.weights.par_iter())
            .map(|(xi, w)| {
                let x: Vec<f64> = xi.iter().map(|v| r * v).collect();
                let v = theta.eval(&x)?.trace();
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, xj) in xi.iter().enumerate() {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    acc += v.scalar(full & !(1 << j)) * (sign * xj);
                }
                Ok(acc * *w)
            })
            .collect::<Result<_>>()?;
        Ok(parts.iter().sum::<Complex64>() * r.powi(p as i32 - 1))
    };
    let fitted = fit_radial(g, model, &ladder.radii(), fit)?;
    fitted.ensure_valid()?;
    let value = fitted
        .coefficient(0.0, 0)
        .map(|c| c[0])
        .ok_or(Error::MissingCoefficient {
            degree: 0.0,
            log_power: 0,
        })?;
    Ok(RegularizedValue {
        value,
        ambiguity_degree: -1,
        diagnostics: vec![fitted],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::FormValue;
    use crate::CMat;
    use std::f64::consts::PI;

    #[test]
    fn boundary_of_radial_field_in_three_dimensions() {
        // θ = x_j/|x|^3 contracted: the flux form of the Coulomb field has T̃r = 4π.
        let theta = MatrixForm::new(3, 1, 2, |x: &[f64]| {
            let r3 = x.iter().map(|v| v * v).sum::<f64>().powf(1.5);
            let c = |v: f64| CMat::from_element(1, 1, Complex64::new(v / r3, 0.0));
            let mut f = FormValue::zero(3, 1, 2);
            f.set(&[1, 2], c(x[0]));
            f.set(&[0, 2], c(-x[1]));
            f.set(&[0, 1], c(x[2]));
            Ok(f)
        });
        let model = boundary_model(&ExpansionModel::powers(&[-2.0], -4.0).unwrap(), 3).unwrap();
        let v = formal_trace_form(
            &theta,
            &model,
            &RadiusLadder::new(2.0, 64.0, 8),
            SphereResolution::default(),
            &FitConfig::default(),
        )
        .unwrap();
        assert!((v.value.re - 4.0 * PI).abs() < 1e-10, "{}", v.value);
    }

    #[test]
    fn boundary_on_the_line_is_difference_of_limits() {
        let theta = MatrixForm::new(1, 1, 0, |x: &[f64]| {
            Ok(FormValue::function(1, CMat::from_element(1, 1, Complex64::new(x[0].atan() + 1.0 / x[0], 0.0))))
        });
        let model = boundary_model(&ExpansionModel::powers(&[0.0, -1.0, -3.0, -5.0, -7.0], -9.0).unwrap(), 1).unwrap();
        let v = formal_trace_form(
            &theta,
            &model,
            &RadiusLadder::new(32.0, 65536.0, 24),
            SphereResolution::default(),
            &FitConfig::default(),
        )
        .unwrap();
        assert!((v.value.re - PI).abs() < 1e-9, "{}", v.value);
    }
}
