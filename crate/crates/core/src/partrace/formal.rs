use super::kernel::Kernel;
use super::spectral::SpectralFamily;
use super::trace::{tr_param, TraceConfig};
use crate::asymptotics::{regint_radial, regint_rp, stokes_defect, ExpansionModel, Fallible, IdentityCheck};
use crate::asymptotics::{RegintConfig, RegularizedValue};
use crate::Result;

/// Extended trace `Tr̄(A) = ⨍_{ℝ^p} TR(A)(μ) dμ`; `model` describes `TR(A)` at infinity.
pub fn extended_trace(
    fam: &SpectralFamily,
    model: &ExpansionModel,
    cfg: &RegintConfig,
    tcfg: &TraceConfig,
) -> Result<RegularizedValue> {
    let p = fam.p();
    let radial = fam.kernel.as_expr().is_some_and(|e| e.is_radial());
    if radial {
        regint_radial(
            |r| {
                let mut mu = vec![0.0; p];
                mu[0] = r;
                Ok(tr_param(fam, &mu, tcfg)?.value)
            },
            p,
            model,
            cfg,
        )
    } else {
        let f = Fallible(|mu: &[f64]| Ok(tr_param(fam, mu, tcfg)?.value));
        regint_rp(&f, p, model, cfg)
    }
}

/// Formal trace of `ω = (-1)^{j} TR(A) dμ_0 ∧ … \widehat{dμ_j} … ∧ dμ_{p-1}` (indices from 0).
///
/// `rhs` is `∫_{S^{p-1}} TR(A)_{1-p}(ξ) ξ_j dξ`, `lhs` is `⨍ TR(∂_j A)`.
/// `model` describes `TR(A)` at infinity and must contain degree `1-p`.
pub fn formal_trace(
    fam: &SpectralFamily,
    j: usize,
    model: &ExpansionModel,
    cfg: &RegintConfig,
    tcfg: &TraceConfig,
) -> Result<IdentityCheck> {
    let p = fam.p();
    let f = Fallible(|mu: &[f64]| Ok(tr_param(fam, mu, tcfg)?.value));
    match &fam.kernel {
        Kernel::Expr(e) => {
            let dfam = fam.with_kernel(Kernel::Expr(e.derivative(j)?), fam.order - 1.0)?;
            let df = Fallible(|mu: &[f64]| Ok(tr_param(&dfam, mu, tcfg)?.value));
            stokes_defect(&f, Some(&df), p, j, model, cfg)
        }
        Kernel::Custom { .. } => stokes_defect(&f, None, p, j, model, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::chi;
    use crate::partrace::kernel::{named_kernel, KernelExpr};
    use crate::partrace::spectral::SpectralModel;
    use crate::quadrature::RadiusLadder;
    use num_complex::Complex64;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn short_ladder() -> RegintConfig {
        RegintConfig::default().with_ladder(RadiusLadder::new(4.0, 512.0, 16))
    }

    #[test]
    fn extended_trace_of_weighted_eta_kernel() {
        // TR(μ² D (D²+μ²)^{-2}) decays exponentially; the plain integral over ℝ is π/4 for a = 1/4.
        let fam = SpectralFamily::new(
            SpectralModel::circle(0.25).unwrap(),
            Kernel::Expr(named_kernel("weighted_eta(2)", 1).unwrap()),
            -1.0,
        )
        .unwrap();
        let v = extended_trace(&fam, &ExpansionModel::empty(-8.0), &short_ladder(), &TraceConfig::default()).unwrap();
        assert!((v.value.re - PI / 4.0).abs() < 1e-8, "{}", v.value);
    }

    #[test]
    fn formal_trace_of_odd_family() {
        let e = KernelExpr::term(1, Complex64::new(1.0, 0.0), vec![1], 0, 0, 1).unwrap();
        let fam = SpectralFamily::new(SpectralModel::circle(0.5).unwrap(), Kernel::Expr(e), -1.0).unwrap();
        let model = ExpansionModel::powers(&[0.0], -8.0).unwrap();
        let chk = formal_trace(&fam, 0, &model, &short_ladder(), &TraceConfig::default()).unwrap();
        assert!((chk.rhs.re - 2.0 * PI).abs() < 1e-8, "{chk:?}");
        assert!(chk.defect() < 1e-8, "{chk:?}");
    }

    #[test]
    fn formal_trace_of_scalar_cutoff_sign() {
        let k = Kernel::Custom {
            p: 1,
            f: Arc::new(|_l: f64, m: &[f64]| Complex64::new(chi(m[0].abs()) * m[0].signum(), 0.0)),
        };
        let fam = SpectralFamily::new(SpectralModel::Point { eigenvalues: vec![1.0] }, k, 0.0).unwrap();
        let model = ExpansionModel::powers(&[0.0], -8.0).unwrap();
        let chk = formal_trace(&fam, 0, &model, &short_ladder(), &TraceConfig::default()).unwrap();
        assert!((chk.rhs.re - 2.0).abs() < 1e-10 && chk.defect() < 1e-7, "{chk:?}");
    }
}
