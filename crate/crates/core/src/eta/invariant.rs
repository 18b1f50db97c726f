use num_complex::Complex64;

use super::{c_k, EtaResult, EtaRoute};
use crate::asymptotics::{regint_radial, regint_rp, ExpansionModel, Fallible, RegintConfig};
use crate::clifford::i_pow_neg;
use crate::forms::{maurer_cartan_power, sphere_integrate, trace_density, MatrixFamily, SphereIntegral};
use crate::sphere::SphereResolution;
use crate::{Error, Result};

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, i| a * i as f64)
}

/// `η_k(A) = 2 c_k ⨍_{ℝ^{2k-1}} tr((A^{-1}dA)^{2k-1})`; `model` describes the density.
pub fn eta_k(a: &MatrixFamily, k: usize, model: &ExpansionModel, cfg: &RegintConfig) -> Result<EtaResult> {
    if k == 0 || a.p != 2 * k - 1 {
        return Err(Error::DimensionMismatch {
            expected: 2 * k.max(1) - 1,
            got: a.p,
        });
    }
    let density = Fallible(|x: &[f64]| trace_density(a, x));
    let rv = regint_rp(&density, a.p, model, cfg)?;
    Ok(EtaResult::from_regint(c_k(k) * 2.0, rv, EtaRoute::MatrixForm))
}

/// Top coefficient of `tr((f^{-1}df)^{2k-1})` for `f = a + c(x)` in the standard
/// representation: `(2k-1)! a 2^{k-1} i^{-k} (a² + |x|²)^{-k}`.
pub fn affine_clifford_density(a: f64, k: usize, r: f64) -> Complex64 {
    let p = 2 * k - 1;
    i_pow_neg(k) * (factorial(p) * a * (1u64 << (k - 1)) as f64 * (a * a + r * r).powi(-(k as i32)))
}

/// `η_k(a + c(x))` through the closed-form density and a radial regularized integral.
pub fn eta_affine_closed_form(a: f64, k: usize, model: &ExpansionModel, cfg: &RegintConfig) -> Result<EtaResult> {
    if k == 0 || a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidInput("closed form needs k >= 1 and a finite nonzero a".into()));
    }
    let rv = regint_radial(|r| Ok(affine_clifford_density(a, k, r)), 2 * k - 1, model, cfg)?;
    Ok(EtaResult::from_regint(c_k(k) * 2.0, rv, EtaRoute::ClosedForm))
}

/// `c_k ∫_{S^{2k-1}} tr((f^{-1}df)^{2k-1})` for a family on `ℝ^{2k}`.
pub fn winding_sphere(f: &MatrixFamily, k: usize, res: SphereResolution) -> Result<SphereIntegral> {
    if k == 0 || f.p != 2 * k {
        return Err(Error::DimensionMismatch {
            expected: 2 * k.max(1),
            got: f.p,
        });
    }
    let mc = maurer_cartan_power(f, 2 * k - 1)?;
    let s = sphere_integrate(&mc.trace, res)?;
    let c = c_k(k);
    Ok(SphereIntegral {
        value: s.value * c,
        error_estimate: s.error_estimate * c.norm(),
    })
}

/// Winding number of `f` restricted to the unit sphere, as an [`EtaResult`].
pub fn winding(f: &MatrixFamily, k: usize, res: SphereResolution) -> Result<EtaResult> {
    let s = winding_sphere(f, k, res)?;
    Ok(EtaResult {
        value: s.value,
        route: EtaRoute::Boundary,
        error_estimate: s.error_estimate,
        diagnostics: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::CliffordRep;
    use crate::forms::{affine_clifford, clifford_cone, default_s3_resolution, moebius_family};
    use crate::quadrature::RadiusLadder;
    use crate::CMat;

    fn affine_model() -> ExpansionModel {
        ExpansionModel::powers(&[-4.0, -6.0, -8.0, -10.0], -12.0).unwrap()
    }

    fn affine_cfg() -> RegintConfig {
        RegintConfig::default().with_ladder(RadiusLadder::new(16.0, 65536.0, 24))
    }

    #[test]
    fn eta_one_of_moebius_is_two() {
        let model = ExpansionModel::powers(&[-2.0, -4.0, -6.0, -8.0], -10.0).unwrap();
        let cfg = RegintConfig::default().with_ladder(RadiusLadder::new(16.0, 65536.0, 24));
        let e = eta_k(&moebius_family(1.0, 1), 1, &model, &cfg).unwrap();
        assert!((e.value - Complex64::new(2.0, 0.0)).norm() < 1e-8, "{}", e.value);
    }

    #[test]
    fn constant_family_has_zero_eta() {
        let f = MatrixFamily::constant(3, CMat::identity(2, 2) * Complex64::new(2.0, 1.0));
        let e = eta_k(&f, 2, &affine_model(), &RegintConfig::default()).unwrap();
        assert!(e.value.norm() < 1e-14);
    }

    #[test]
    fn affine_clifford_eta_two_routes() {
        let rep = CliffordRep::standard(2).unwrap();
        for a in [1.0, -1.0, 0.5] {
            let closed = eta_affine_closed_form(a, 2, &affine_model(), &affine_cfg()).unwrap();
            let sign: f64 = if a > 0.0 { -1.0 } else { 1.0 };
            assert!((closed.value.re - sign).abs() < 1e-8, "{a}: {}", closed.value);
            assert!(closed.value.im.abs() < 1e-12);
            let x = [0.3, -0.2, 0.9];
            let r = (0.09f64 + 0.04 + 0.81).sqrt();
            let d = trace_density(&affine_clifford(a, &rep), &x).unwrap();
            assert!((d - affine_clifford_density(a, 2, r)).norm() < 1e-12);
        }
    }

    #[test]
    fn matrix_route_for_affine_clifford() {
        let rep = CliffordRep::standard(2).unwrap();
        let e = eta_k(&affine_clifford(1.0, &rep), 2, &affine_model(), &affine_cfg()).unwrap();
        assert!((e.value.re + 1.0).abs() < 1e-4, "{}", e.value);
        let closed = eta_affine_closed_form(1.0, 2, &affine_model(), &affine_cfg()).unwrap();
        assert!((e.value - closed.value).norm() < 1e-8 * closed.value.norm(), "{} vs {}", e.value, closed.value);
    }

    #[test]
    fn windings() {
        let rep = CliffordRep::standard(2).unwrap();
        let w = winding(&clifford_cone(&rep), 2, default_s3_resolution()).unwrap();
        assert!((w.value.re + 1.0).abs() < 1e-6, "{}", w.value);
        let circle = MatrixFamily::affine(
            CMat::zeros(1, 1),
            vec![CMat::identity(1, 1), CMat::identity(1, 1) * Complex64::new(0.0, 1.0)],
        );
        let w1 = winding(&circle, 1, SphereResolution::default()).unwrap();
        assert!((w1.value.re - 1.0).abs() < 1e-12, "{}", w1.value);
        let c = MatrixFamily::constant(2, CMat::identity(1, 1));
        assert!(winding(&c, 1, SphereResolution::default()).unwrap().value.norm() < 1e-15);
    }
}
