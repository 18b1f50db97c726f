use num_complex::Complex64;

use super::family::{invert, MatrixFamily};
use super::form::{power_partials, power_value, DerivativeScheme, MatrixForm};
use super::value::FormValue;
use crate::clifford::CliffordRep;
use crate::{CMat, Error, Result};

/// `ω = f^{-1} df` evaluated at a point, with its partials when requested.
pub(crate) fn mc_value(f: &MatrixFamily, x: &[f64]) -> Result<(CMat, FormValue)> {
    let inv = invert(&f.eval(x)?, x)?;
    let parts: Vec<CMat> = f.partials(x)?.iter().map(|d| &inv * d).collect();
    Ok((inv, FormValue::one_form(f.p, parts)?))
}

fn mc_partials(f: &MatrixFamily, x: &[f64]) -> Result<Vec<FormValue>> {
    let inv = invert(&f.eval(x)?, x)?;
    let d = f.partials(x)?;
    let h = f.second(x)?;
    let p = f.p;
    // ∂_i(f^{-1}∂_j f) = -f^{-1}∂_i f f^{-1}∂_j f + f^{-1}∂_i∂_j f
    (0..p)
        .map(|i| {
            let a = &inv * &d[i];
            let parts = (0..p)
                .map(|j| -(&a * &inv * &d[j]) + &inv * &h[i][j])
                .collect();
            FormValue::one_form(p, parts)
        })
        .collect()
}

/// The Maurer–Cartan form `f^{-1} df`.
pub fn maurer_cartan_form(f: &MatrixFamily) -> MatrixForm {
    let (f1, f2) = (f.clone(), f.clone());
    let mut w = MatrixForm::new(f.p, f.rank, 1, move |x| Ok(mc_value(&f1, x)?.1));
    if f.has_analytic_second() {
        w = w.with_partials(move |x| mc_partials(&f2, x));
    }
    w
}

/// `(f^{-1} df)^q` and its trace form.
#[derive(Debug, Clone)]
pub struct MaurerCartanPower {
    pub form: MatrixForm,
    pub trace: MatrixForm,
}

pub fn maurer_cartan_power(f: &MatrixFamily, q: usize) -> Result<MaurerCartanPower> {
    if q == 0 {
        return Err(Error::InvalidInput("Maurer-Cartan power must be positive".into()));
    }
    let degree = q.min(f.p);
    let (f1, f2) = (f.clone(), f.clone());
    let mut form = MatrixForm::new(f.p, f.rank, degree, move |x| power_value(&mc_value(&f1, x)?.1, q));
    if f.has_analytic_second() {
        form = form.with_partials(move |x| {
            let w = mc_value(&f2, x)?.1;
            let dw = mc_partials(&f2, x)?;
            power_partials(&w, &dw, q)
        });
    }
    let trace = form.trace();
    Ok(MaurerCartanPower { form, trace })
}

/// Top coefficient of `tr((f^{-1}df)^p)` at `x` (the integrand of `η_k`).
pub fn trace_density(f: &MatrixFamily, x: &[f64]) -> Result<Complex64> {
    let (_, w) = mc_value(f, x)?;
    Ok(power_value(&w, f.p)?.trace().top_scalar())
}

/// Closed form of `tr((f^{-1}df)^p)` for `f(x) = x_0 + c(x')` on `ℝ^{p+1}`:
/// `|x|^{-p-1} p! tr(E_1⋯E_p) Σ_j (-1)^j x_j dx_0∧…∧\widehat{dx_j}∧…∧dx_p`.
pub fn clifford_omega_closed_form(rep: &CliffordRep, x: &[f64]) -> Result<FormValue> {
    let p = rep.p;
    if x.len() != p + 1 {
        return Err(Error::DimensionMismatch {
            expected: p + 1,
            got: x.len(),
        });
    }
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 == 0.0 {
        return Err(Error::Singular { point: x.to_vec() });
    }
    let fact: f64 = (1..=p).map(|i| i as f64).product();
    let c = rep.volume_trace() * fact * r2.sqrt().powi(-(p as i32) - 1);
    let full = (1u32 << (p + 1)) - 1;
    let mut out = FormValue::zero(p + 1, 1, p);
    for (j, xj) in x.iter().enumerate() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        out.coeffs
            .insert(full & !(1 << j), CMat::from_element(1, 1, c * (sign * xj)));
    }
    Ok(out)
}

/// `d(f^{-1}df) + (f^{-1}df)^2` at `x`; vanishes identically.
pub fn structure_equation_defect(f: &MatrixFamily, x: &[f64], scheme: DerivativeScheme) -> Result<f64> {
    let w = maurer_cartan_form(f);
    let dw = w.exterior_derivative(scheme)?.eval(x)?;
    let ww = w.eval(x)?;
    Ok(dw.add(&ww.wedge(&ww)?)?.max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::registry::named_family;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    #[test]
    fn moebius_logarithmic_derivative() {
        let f = named_family("moebius").unwrap();
        for &x in &[-2.0, 0.0, 0.7, 10.0] {
            let v = maurer_cartan_power(&f, 1).unwrap().trace.eval(&[x]).unwrap();
            let expect = 2.0 * I / (x * x + 1.0);
            assert!((v.scalar(1) - expect).norm() < 1e-14, "{x}");
        }
    }

    #[test]
    fn affine_clifford_density_at_origin() {
        let f = named_family("affine_clifford(1, 2)").unwrap();
        let v = trace_density(&f, &[0.0, 0.0, 0.0]).unwrap();
        assert!((v - Complex64::new(-12.0, 0.0)).norm() < 1e-13, "{v}");
    }

    #[test]
    fn constant_family_has_zero_form() {
        let f = MatrixFamily::constant(3, CMat::identity(2, 2) * Complex64::new(2.0, 1.0));
        let v = maurer_cartan_power(&f, 3).unwrap().form.eval(&[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(v.max_abs(), 0.0);
    }

    #[test]
    fn closed_form_matches_direct_computation() {
        let rep = CliffordRep::standard(2).unwrap();
        let f = named_family("clifford_cone(2)").unwrap();
        let direct = maurer_cartan_power(&f, 3).unwrap().trace;
        for x in [[1.0, 0.0, 0.0, 0.0], [0.3, -1.2, 0.5, 2.0], [-0.4, 0.1, 0.9, -0.2]] {
            let a = clifford_omega_closed_form(&rep, &x).unwrap();
            let b = direct.eval(&x).unwrap();
            for (m, c) in &a.coeffs {
                let d = b.scalar(*m);
                assert!((c[(0, 0)] - d).norm() < 1e-10 * c[(0, 0)].norm().max(1.0), "{x:?}");
            }
        }
        let e = clifford_omega_closed_form(&rep, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((e.scalar(0b1110).re + 12.0).abs() < 1e-13);
    }

    #[test]
    fn structure_equation_holds() {
        let f = named_family("affine_clifford(0.5, 2)").unwrap();
        let x = [0.3, -0.2, 0.8];
        assert!(structure_equation_defect(&f, &x, DerivativeScheme::Analytic).unwrap() < 1e-13);
        assert!(structure_equation_defect(&f, &x, DerivativeScheme::FiniteDifference(None)).unwrap() < 1e-8);
    }
}
