use std::sync::Arc;

use num_complex::Complex64;

use super::boundary::formal_trace_form;
use super::invariant::eta_k;
use super::c_k;
use crate::asymptotics::{ExpansionModel, IdentityCheck, RegintConfig};
use crate::fd::partial;
use crate::forms::{maurer_cartan_form, mc_value, power_value, FormValue, MatrixFamily, MatrixForm};
use crate::{CMat, Error, Result};

type FamilyAt = Arc<dyn Fn(f64) -> Result<MatrixFamily> + Send + Sync>;

/// A one-parameter family `s ↦ A_s` of matrix families on `ℝ^p`.
#[derive(Clone)]
pub struct PathFamily {
    pub p: usize,
    pub rank: usize,
    family: FamilyAt,
    derivative: Option<FamilyAt>,
    /// Step for central differences in `s` (one Richardson pass).
    pub step: f64,
}

impl std::fmt::Debug for PathFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PathFamily")
            .field("p", &self.p)
            .field("rank", &self.rank)
            .field("step", &self.step)
            .finish()
    }
}

impl PathFamily {
    pub fn new<F>(p: usize, rank: usize, family: F) -> Self
    where
        F: Fn(f64) -> Result<MatrixFamily> + Send + Sync + 'static,
    {
        Self {
            p,
            rank,
            family: Arc::new(family),
            derivative: None,
            step: 1e-2,
        }
    }

    /// Exact `s ↦ ∂_s A_s`, used instead of differences in `s`.
    pub fn with_derivative<F>(mut self, d: F) -> Self
    where
        F: Fn(f64) -> Result<MatrixFamily> + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn at(&self, s: f64) -> Result<MatrixFamily> {
        let f = (self.family)(s)?;
        if f.p != self.p || f.rank != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: f.rank,
            });
        }
        Ok(f)
    }

    /// `∂_s A_s(x)`.
    pub fn ds(&self, s: f64, x: &[f64]) -> Result<CMat> {
        if let Some(d) = &self.derivative {
            return d(s)?.eval(x);
        }
        partial(&|t: &[f64]| self.at(t[0])?.eval(x), &[s], 0, self.step)
    }
}

/// The `(2k-2)`-form `(A_s^{-1} ∂_s A_s)(A_s^{-1} dA_s)^{2k-2}`.
pub fn variation_form(path: &PathFamily, k: usize, s: f64) -> Result<MatrixForm> {
    let p = path.p;
    let q = 2 * k - 2;
    let a = path.at(s)?;
    let path = path.clone();
    Ok(MatrixForm::new(p, path.rank, q, move |x| {
        let (inv, w) = mc_value(&a, x)?;
        let lead = FormValue::function(p, &inv * path.ds(s, x)?);
        if q == 0 {
            Ok(lead)
        } else {
            lead.wedge(&power_value(&w, q)?)
        }
    }))
}

/// Variation formula at `s`: `lhs = d/ds η_k(A_s)` by central differences,
/// `rhs = 2(2k-1) c_k T̃r((A_s^{-1}∂_sA_s)(A_s^{-1}dA_s)^{2k-2})`.
///
/// `density` models the η-density, `boundary` the boundary integral of the variation form.
pub fn eta_variation(
    path: &PathFamily,
    k: usize,
    s: f64,
    density: &ExpansionModel,
    boundary: &ExpansionModel,
    cfg: &RegintConfig,
) -> Result<IdentityCheck> {
    if k == 0 || path.p != 2 * k - 1 {
        return Err(Error::DimensionMismatch {
            expected: 2 * k.max(1) - 1,
            got: path.p,
        });
    }
    let lhs = partial(
        &|t: &[f64]| Ok(eta_k(&path.at(t[0])?, k, density, cfg)?.value),
        &[s],
        0,
        path.step,
    )?;
    let theta = variation_form(path, k, s)?;
    let tr = formal_trace_form(&theta, boundary, &cfg.ladder, cfg.sphere, &cfg.fit)?;
    let rhs = c_k(k) * (2.0 * (2 * k - 1) as f64) * tr.value;
    Ok(IdentityCheck { lhs, rhs })
}

/// `η_1(AB)` against `η_1(A) + η_1(B)` for families on the line.
pub fn eta1_additivity(
    a: &MatrixFamily,
    b: &MatrixFamily,
    model: &ExpansionModel,
    cfg: &RegintConfig,
) -> Result<IdentityCheck> {
    let ab = a.product(b)?;
    let lhs = eta_k(&ab, 1, model, cfg)?.value;
    let rhs = eta_k(a, 1, model, cfg)?.value + eta_k(b, 1, model, cfg)?.value;
    Ok(IdentityCheck { lhs, rhs })
}

/// Additivity defect of `η_2`: `lhs = η_2(AB) - η_2(A) - η_2(B)`,
/// `rhs = -6 c_2 T̃r(ω_1 ∧ ω_2)` with `ω_1 = B^{-1}(A^{-1}dA)B`, `ω_2 = B^{-1}dB`.
pub fn additivity_defect(
    a: &MatrixFamily,
    b: &MatrixFamily,
    density: &ExpansionModel,
    boundary: &ExpansionModel,
    cfg: &RegintConfig,
) -> Result<IdentityCheck> {
    if a.p != 3 || b.p != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: a.p });
    }
    let ab = a.product(b)?;
    let eta = |f: &MatrixFamily| -> Result<Complex64> { Ok(eta_k(f, 2, density, cfg)?.value) };
    let lhs = eta(&ab)? - eta(a)? - eta(b)?;
    let w1 = maurer_cartan_form(a).conjugate_by(b)?;
    let w2 = maurer_cartan_form(b);
    let theta = w1.wedge(&w2)?;
    let tr = formal_trace_form(&theta, boundary, &cfg.ladder, cfg.sphere, &cfg.fit)?;
    Ok(IdentityCheck {
        lhs,
        rhs: c_k(2) * -6.0 * tr.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eta::boundary::boundary_model;
    use crate::forms::{moebius_family, named_family};
    use crate::quadrature::RadiusLadder;

    fn line_cfg() -> RegintConfig {
        RegintConfig::default().with_ladder(RadiusLadder::new(16.0, 65536.0, 24))
    }

    #[test]
    fn moebius_homotopy_has_no_variation() {
        let path = PathFamily::new(1, 1, |s| Ok(moebius_family(s, 1)));
        let density = ExpansionModel::powers(&[-2.0, -4.0, -6.0, -8.0], -10.0).unwrap();
        let theta = ExpansionModel::powers(&[-1.0, -3.0, -5.0, -7.0], -9.0).unwrap();
        let chk = eta_variation(&path, 1, 0.75, &density, &boundary_model(&theta, 1).unwrap(), &line_cfg()).unwrap();
        assert!(chk.lhs.norm() < 1e-6 && chk.rhs.norm() < 1e-6, "{chk:?}");
    }

    #[test]
    fn divisor_path_variation_is_minus_two() {
        let path = crate::eta::unwinding_path(0.05).to_path_family().with_step(1e-3);
        let density = ExpansionModel::empty(-8.0);
        let theta = ExpansionModel::empty(-8.0);
        let cfg = RegintConfig::default().with_ladder(RadiusLadder::new(4.0, 64.0, 8));
        let chk = eta_variation(&path, 1, 0.5, &density, &boundary_model(&theta, 1).unwrap(), &cfg).unwrap();
        assert!((chk.rhs.re + 2.0).abs() < 1e-10, "{chk:?}");
        assert!(chk.defect() < 1e-4, "{chk:?}");
    }

    #[test]
    fn unit_clifford_path_variation() {
        let rep = crate::clifford::CliffordRep::standard(2).unwrap();
        let path = PathFamily::new(3, 2, move |s| {
            let r = rep.clone();
            let n = r.rank;
            let jb = |x: &[f64]| (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt();
            Ok(MatrixFamily::new(3, n, move |x| {
                Ok(CMat::identity(n, n) + r.action(x)? * Complex64::new(s / jb(x), 0.0))
            }))
        });
        let degs: Vec<f64> = (4..=11).map(|d| -(d as f64)).collect();
        let density = ExpansionModel::powers(&degs, -12.0).unwrap();
        let tdeg: Vec<f64> = (2..=9).map(|d| -(d as f64)).collect();
        let bm = boundary_model(&ExpansionModel::powers(&tdeg, -10.0).unwrap(), 3).unwrap();
        let chk = eta_variation(&path, 2, 0.8, &density, &bm, &line_cfg()).unwrap();
        assert!(chk.rhs.norm() > 1e-3 && chk.defect() < 1e-4, "{chk:?}");
    }

    #[test]
    fn eta_one_is_additive_on_moebius_pairs() {
        let density = ExpansionModel::powers(&[-2.0, -4.0, -6.0, -8.0], -10.0).unwrap();
        let chk = eta1_additivity(
            &named_family("moebius").unwrap(),
            &named_family("scaled_moebius(2)").unwrap(),
            &density,
            &line_cfg(),
        )
        .unwrap();
        assert!((chk.lhs.re - 4.0).abs() < 1e-8 && chk.defect() < 1e-8, "{chk:?}");
    }
}
