use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::{c_k, EtaResult, EtaRoute};
use crate::asymptotics::{regint_radial, regint_rp, ExpansionModel, Fallible, RegintConfig};
use crate::clifford::i_pow_neg;
use crate::partrace::{extended_trace, named_kernel, tr_param, Kernel, SpectralFamily, SpectralModel, TraceConfig};
use crate::special::hurwitz_zeta;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum SpectralEtaMethod {
    /// `ζ_H(0, a) - ζ_H(0, 1 - a)` for the reduced shift `0 < a < 1`.
    Hurwitz,
    /// `Γ(k)/(Γ(k-½)√π) ⨍_ℝ TR(|μ|^{2k-2} D (D² + μ²)^{-k}) dμ`.
    Regint { k: usize },
}

fn circle_shift(model: &SpectralModel) -> Result<f64> {
    model.validate()?;
    match model {
        SpectralModel::Circle { a } => Ok(*a),
        SpectralModel::Point { .. } => Err(Error::InvalidInput("spectral eta needs a circle model".into())),
    }
}

/// Spectral eta-invariant `η_D(0)` of `D = -i d/dθ + a`.
///
/// `model` describes `TR` of the weighted kernel at infinity (regint method only).
pub fn spectral_eta(
    spectrum: &SpectralModel,
    method: SpectralEtaMethod,
    model: &ExpansionModel,
    cfg: &RegintConfig,
    tcfg: &TraceConfig,
) -> Result<EtaResult> {
    let a = circle_shift(spectrum)?;
    match method {
        SpectralEtaMethod::Hurwitz => {
            let b = a - a.floor();
            let v = hurwitz_zeta(0.0, b) - hurwitz_zeta(0.0, 1.0 - b);
            Ok(EtaResult {
                value: Complex64::new(v, 0.0),
                route: EtaRoute::Hurwitz,
                error_estimate: 0.0,
                diagnostics: Vec::new(),
            })
        }
        SpectralEtaMethod::Regint { k } => {
            if k < 2 {
                return Err(Error::InvalidInput(
                    "regint route needs k >= 2 so that D(D²+μ²)^{-k} is trace class".into(),
                ));
            }
            let kernel = Kernel::Expr(named_kernel(&format!("weighted_eta({k})"), 1)?);
            let fam = SpectralFamily::new(spectrum.clone(), kernel, -1.0)?;
            let rv = extended_trace(&fam, model, cfg, tcfg)?;
            let kf = k as f64;
            let scale = gamma(kf) / (gamma(kf - 0.5) * std::f64::consts::PI.sqrt());
            Ok(EtaResult::from_regint(Complex64::new(scale, 0.0), rv, EtaRoute::SpectralReduction))
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, i| a * i as f64)
}

fn eta_kernel_family(spectrum: &SpectralModel, k: usize, p: usize) -> Result<SpectralFamily> {
    let kernel = Kernel::Expr(named_kernel(&format!("eta_kernel({k})"), p)?);
    SpectralFamily::new(spectrum.clone(), kernel, 1.0 - 2.0 * k as f64)
}

/// Density of `η_k(D ± c(μ))` at `|μ| = r`: the eigenvalue sum of
/// `tr((λ ± c(μ))^{-1} dc)^{2k-1} = ±(2k-1)! 2^{k-1} i^{-k} λ (λ² + r²)^{-k}`.
pub fn suspension_density(spectrum: &SpectralModel, k: usize, sign: f64, r: f64, tcfg: &TraceConfig) -> Result<Complex64> {
    let fam = eta_kernel_family(spectrum, k, 1)?;
    let tr = tr_param(&fam, &[r], tcfg)?.value;
    Ok(i_pow_neg(k) * (sign * factorial(2 * k - 1) * (1u64 << (k - 1)) as f64) * tr)
}

fn check_sign(sign: f64) -> Result<()> {
    if sign == 1.0 || sign == -1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("suspension sign must be +1 or -1, got {sign}")))
    }
}

/// `η_k(D ± c(μ))` on `ℝ^{2k-1}` by eigenvalue-wise reduction and a radial regularized integral.
pub fn eta_suspension(
    spectrum: &SpectralModel,
    k: usize,
    sign: f64,
    model: &ExpansionModel,
    cfg: &RegintConfig,
    tcfg: &TraceConfig,
) -> Result<EtaResult> {
    circle_shift(spectrum)?;
    check_sign(sign)?;
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let rv = regint_radial(|r| suspension_density(spectrum, k, sign, r, tcfg), 2 * k - 1, model, cfg)?;
    Ok(EtaResult::from_regint(c_k(k) * 2.0, rv, EtaRoute::SpectralReduction))
}

/// As [`eta_suspension`] but integrating the eigenvalue sum over the full `ℝ^{2k-1}`.
pub fn eta_suspension_full(
    spectrum: &SpectralModel,
    k: usize,
    sign: f64,
    model: &ExpansionModel,
    cfg: &RegintConfig,
    tcfg: &TraceConfig,
) -> Result<EtaResult> {
    circle_shift(spectrum)?;
    check_sign(sign)?;
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let p = 2 * k - 1;
    let fam = eta_kernel_family(spectrum, k, p)?;
    let scale = i_pow_neg(k) * (sign * factorial(p) * (1u64 << (k - 1)) as f64);
    let f = Fallible(|mu: &[f64]| Ok(scale * tr_param(&fam, mu, tcfg)?.value));
    let rv = regint_rp(&f, p, model, cfg)?;
    Ok(EtaResult::from_regint(c_k(k) * 2.0, rv, EtaRoute::SpectralReduction))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::CliffordRep;
    use crate::forms::{affine_clifford, trace_density};
    use crate::quadrature::RadiusLadder;
    use crate::sphere::SphereResolution;

    fn cfg() -> RegintConfig {
        RegintConfig::default().with_ladder(RadiusLadder::new(8.0, 512.0, 12))
    }

    #[test]
    fn hurwitz_route() {
        for a in [0.1, 0.25, 0.4, 1.25, -0.75] {
            let m = SpectralModel::circle(a).unwrap();
            let e = spectral_eta(&m, SpectralEtaMethod::Hurwitz, &ExpansionModel::empty(-8.0), &cfg(), &TraceConfig::default())
                .unwrap();
            let b = a - a.floor();
            assert!((e.value.re - (1.0 - 2.0 * b)).abs() < 1e-12, "{a}");
        }
        let half = SpectralModel::circle(0.5).unwrap();
        let e = spectral_eta(&half, SpectralEtaMethod::Hurwitz, &ExpansionModel::empty(-8.0), &cfg(), &TraceConfig::default())
            .unwrap();
        assert!(e.value.norm() < 1e-15);
    }

    #[test]
    fn regint_route_matches_hurwitz() {
        for a in [0.1, 0.25, 0.4] {
            let m = SpectralModel::circle(a).unwrap();
            for k in [2, 3] {
                let e = spectral_eta(
                    &m,
                    SpectralEtaMethod::Regint { k },
                    &ExpansionModel::empty(-8.0),
                    &cfg(),
                    &TraceConfig::default(),
                )
                .unwrap();
                assert!((e.value.re - (1.0 - 2.0 * a)).abs() < 1e-8, "{a} {k}: {}", e.value);
            }
        }
    }

    #[test]
    fn per_eigenvalue_density_matches_matrix_trace() {
        let rep = CliffordRep::standard(2).unwrap();
        for (lambda, sign) in [(1.25, 1.0), (-0.75, 1.0), (0.25, -1.0)] {
            let mut f = affine_clifford(lambda, &rep);
            if sign < 0.0 {
                f = f.rotated(&(-nalgebra::DMatrix::<f64>::identity(3, 3))).unwrap();
            }
            let x = [0.4, 0.1, -0.7];
            let r2: f64 = x.iter().map(|v| v * v).sum();
            let closed = i_pow_neg(2) * (sign * 6.0 * 2.0 * lambda / (lambda * lambda + r2).powi(2));
            let d = trace_density(&f, &x).unwrap();
            assert!((d - closed).norm() < 1e-12, "{lambda} {sign}: {d} vs {closed}");
        }
    }

    #[test]
    fn suspension_signs_and_symmetric_spectrum() {
        let t = TraceConfig::default();
        let m = SpectralModel::circle(0.25).unwrap();
        let model = ExpansionModel::empty(-8.0);
        let plus = eta_suspension(&m, 2, 1.0, &model, &cfg(), &t).unwrap();
        let minus = eta_suspension(&m, 2, -1.0, &model, &cfg(), &t).unwrap();
        assert!((plus.value.re + 0.5).abs() < 1e-8, "{}", plus.value);
        assert!((minus.value.re - 0.5).abs() < 1e-8, "{}", minus.value);
        let half = SpectralModel::circle(0.5).unwrap();
        // The cancelling spectrum leaves pure round-off, so only the absolute floor can validate the fit.
        let mut c = cfg();
        c.fit.absolute_floor = 1e-10;
        for k in [2, 3] {
            let e = eta_suspension(&half, k, 1.0, &model, &c, &t).unwrap();
            assert!(e.value.norm() < 1e-10);
        }
    }

    #[test]
    fn full_dimensional_quadrature_agrees() {
        let t = TraceConfig::default();
        let m = SpectralModel::circle(0.25).unwrap();
        let c = RegintConfig::default()
            .with_ladder(RadiusLadder::new(8.0, 64.0, 6))
            .with_sphere(SphereResolution::new(8, 16));
        let full = eta_suspension_full(&m, 2, 1.0, &ExpansionModel::empty(-8.0), &c, &t).unwrap();
        assert!((full.value.re + 0.5).abs() < 1e-6, "{}", full.value);
    }
}
