use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::form::MatrixForm;
use crate::sphere::{SphereResolution, SphereRule};
use crate::{Error, Result};

/// Default resolution used for `S^3`: 48 × 48 polar nodes and 96 azimuthal nodes.
pub fn default_s3_resolution() -> SphereResolution {
    SphereResolution::new(48, 96)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereIntegral {
    pub value: Complex64,
    /// Difference to the same rule at roughly half resolution.
    pub error_estimate: f64,
}

fn integrate_at(form: &MatrixForm, res: SphereResolution) -> Result<Complex64> {
    let d = form.p - 1;
    let rule = SphereRule::new(d, res);
    let full = (1u32 << form.p) - 1;
    let vals: Vec<Complex64> = rule
        .points
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(x, w)| {
            let v = form.eval(x)?;
            // Pull back through the interior product with the outward normal.
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, xj) in x.iter().enumerate() {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                acc += v.scalar(full & !(1 << j)) * (sign * xj);
            }
            Ok(acc * *w)
        })
        .collect::<Result<_>>()?;
    Ok(vals.iter().sum())
}

/// `∫_{S^d} ω` for a scalar `d`-form on `ℝ^{d+1}` (boundary orientation of the ball).
pub fn sphere_integrate(form: &MatrixForm, res: SphereResolution) -> Result<SphereIntegral> {
    if form.rank != 1 {
        return Err(Error::InvalidInput("sphere integration needs a scalar (traced) form".into()));
    }
    if form.p < 2 || form.degree != form.p - 1 {
        return Err(Error::InvalidInput(format!(
            "need a degree {} form on R^{} to integrate over the sphere",
            form.p.saturating_sub(1),
            form.p
        )));
    }
    let value = integrate_at(form, res)?;
    let coarse = integrate_at(form, res.coarser())?;
    Ok(SphereIntegral {
        value,
        error_estimate: (value - coarse).norm(),
    })
}

/// As [`sphere_integrate`], failing when the refinement estimate exceeds `tol · max(1, |value|)`.
pub fn sphere_integrate_checked(
    form: &MatrixForm,
    res: SphereResolution,
    tol: f64,
) -> Result<SphereIntegral> {
    let s = sphere_integrate(form, res)?;
    if s.error_estimate > tol * s.value.norm().max(1.0) {
        return Err(Error::QuadratureNonconvergence {
            difference: s.error_estimate,
        });
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::value::FormValue;
    use crate::CMat;
    use std::f64::consts::PI;

    fn volume_form(p: usize) -> MatrixForm {
        MatrixForm::new(p, 1, p - 1, move |x: &[f64]| {
            let full = (1u32 << p) - 1;
            let mut v = FormValue::zero(p, 1, p - 1);
            for (j, xj) in x.iter().enumerate() {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                v.coeffs.insert(full & !(1 << j), CMat::from_element(1, 1, Complex64::new(s * xj, 0.0)));
            }
            Ok(v)
        })
    }

    #[test]
    fn circle_and_three_sphere_volumes() {
        let s1 = sphere_integrate(&volume_form(2), SphereResolution::default()).unwrap();
        assert!((s1.value.re - 2.0 * PI).abs() < 1e-13);
        let s3 = sphere_integrate(&volume_form(4), default_s3_resolution()).unwrap();
        assert!((s3.value.re - 2.0 * PI * PI).abs() < 1e-11);
        assert!(s3.error_estimate < 1e-10);
    }
}
