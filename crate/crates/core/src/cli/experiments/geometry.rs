use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Params;
use crate::asymptotics::{ordinary_integral_rp, regint_rp, ExpansionModel, Fallible, RegintConfig};
use crate::clifford::CliffordRep;
use crate::cli::config::Budget;
use crate::cli::report::{Check, Outcome, Provenance, Table};
use crate::eta::c_k;
use crate::forms::{
    affine_clifford, clifford_cone, clifford_omega_closed_form, default_s3_resolution, maurer_cartan_power,
    sphere_integrate, trace_density,
};
use crate::quadrature::RadiusLadder;
use crate::sphere::SphereResolution;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliffordCheck {
    /// Single `k`; `1..=5` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

impl Params for CliffordCheck {
    fn validate(&self) -> std::result::Result<(), String> {
        match self.k {
            Some(k) if !(1..=8).contains(&k) => Err(format!("k = {k} outside 1..=8")),
            _ => Ok(()),
        }
    }
}

pub fn clifford_check(p: &CliffordCheck, _budget: &Budget) -> Result<Outcome> {
    let ks: Vec<usize> = p.k.map_or_else(|| (1..=5).collect(), |k| vec![k]);
    let zero = Complex64::new(0.0, 0.0);
    let mut out = Outcome::default();
    for k in ks {
        let rep = CliffordRep::standard(k)?;
        let d = rep.defects();
        let expect = Complex64::new((1u64 << (k - 1)) as f64, 0.0) * Complex64::i().powi(-(k as i32));
        out.push(Check::abs(
            &format!("k={k}: tr(E_1...E_p)"),
            rep.volume_trace(),
            expect,
            1e-12,
            Provenance::ClosedForm,
            "2^(k-1) i^(-k)",
        ));
        out.push(Check::real_abs(
            &format!("k={k}: skew-adjointness defect"),
            Complex64::new(d.skew_adjoint, 0.0),
            0.0,
            1e-12,
            Provenance::Exact,
            "E_j* = -E_j",
        ));
        out.push(Check::abs(
            &format!("k={k}: anticommutation defect"),
            Complex64::new(d.anticommutation, 0.0),
            zero,
            1e-12,
            Provenance::Exact,
            "E_i E_j + E_j E_i = -2 delta_ij",
        ));
        out.push(Check::abs(
            &format!("k={k}: volume element defect"),
            Complex64::new(d.volume_element, 0.0),
            zero,
            1e-12,
            Provenance::Exact,
            "i^k E_1...E_p = 1",
        ));
    }
    Ok(out.route("standard-representation"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SphereOmega {
    pub k: usize,
}

impl Default for SphereOmega {
    fn default() -> Self {
        Self { k: 2 }
    }
}

impl Params for SphereOmega {
    fn validate(&self) -> std::result::Result<(), String> {
        if (1..=3).contains(&self.k) {
            Ok(())
        } else {
            Err(format!("sphere-omega supports k = 1..=3, got {}", self.k))
        }
    }
}

pub fn sphere_omega(p: &SphereOmega, budget: &Budget) -> Result<Outcome> {
    let k = p.k;
    let rep = CliffordRep::standard(k)?;
    let f = clifford_cone(&rep);
    let mc = maurer_cartan_power(&f, 2 * k - 1)?;
    let base = match k {
        1 => SphereResolution::new(24, 64),
        2 => default_s3_resolution(),
        _ => SphereResolution::new(8, 16),
    };
    let s = sphere_integrate(&mc.trace, budget.sphere(base))?;
    let mut out = Outcome::default().error_estimate(s.error_estimate);
    out.push(Check::rel(
        &format!("integral over S^{}", 2 * k - 1),
        s.value,
        -1.0 / c_k(k),
        1e-6,
        Provenance::ClosedForm,
        "-1/c_k",
    ));
    // Pointwise agreement with the closed form away from the sphere.
    let x: Vec<f64> = (0..2 * k).map(|j| 0.9 - 0.35 * j as f64).collect();
    let numeric = mc.trace.eval(&x)?;
    let closed = clifford_omega_closed_form(&rep, &x)?;
    let diff = numeric.add(&closed.scale(Complex64::new(-1.0, 0.0)))?.max_abs();
    out.push(Check::real_abs(
        "pointwise form vs closed form",
        Complex64::new(diff, 0.0),
        0.0,
        1e-9,
        Provenance::ClosedForm,
        "|x|^(-p-1) p! tr(E_1...E_p) sum (-1)^j x_j dx_hat(j)",
    ));
    Ok(out.route("sphere-quadrature"))
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RpOmega {
    /// Constant `a`; both `a = 1` and `a = -1` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
}

impl Params for RpOmega {
    fn validate(&self) -> std::result::Result<(), String> {
        match self.a {
            Some(a) if a == 0.0 || !a.is_finite() => Err("a must be finite and nonzero".into()),
            _ => Ok(()),
        }
    }
}

pub fn rp_omega(p: &RpOmega, budget: &Budget) -> Result<Outcome> {
    let rep = CliffordRep::standard(2)?;
    let model = ExpansionModel::powers(&[-4.0, -6.0, -8.0, -10.0], -12.0)?;
    let cfg = budget.regint(RegintConfig::default().with_ladder(RadiusLadder::new(16.0, 65536.0, 24)));
    let mut out = Outcome::default();
    for a in p.a.map_or_else(|| vec![1.0, -1.0], |a| vec![a]) {
        let f = affine_clifford(a, &rep);
        let density = Fallible(|x: &[f64]| trace_density(&f, x));
        let expect = -a.signum() * 12.0 * PI * PI;
        let rv = regint_rp(&density, 3, &model, &cfg)?;
        out = out.error_estimate(rv.residual());
        out.tables.extend(Table::from_regint(&format!("a={a}"), &rv));
        out.push(Check::real_rel(
            &format!("a={a}: regularized integral"),
            rv.value,
            expect,
            1e-4,
            Provenance::ClosedForm,
            "-sgn(a) 12 pi^2",
        ));
        let plain = ordinary_integral_rp(&density, 3, &cfg)?;
        out.push(Check::real_rel(
            &format!("a={a}: ordinary quadrature"),
            plain,
            expect,
            1e-4,
            Provenance::ClosedForm,
            "-sgn(a) 12 pi^2",
        ));
    }
    Ok(out.route("matrix-form"))
}
