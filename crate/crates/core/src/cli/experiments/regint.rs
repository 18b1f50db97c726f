use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Params;
use crate::asymptotics::{
    cov_correction, mellin_reg, named_function, regint_halfline, regint_rp, stokes_defect, ExpansionModel,
    HalflineConfig, NamedFunction, RegintConfig, Term,
};
use crate::cli::config::Budget;
use crate::cli::report::{Check, Outcome, Provenance, Table};
use crate::cutoff::chi;
use crate::quadrature::RadiusLadder;
use crate::sphere::SphereResolution;
use crate::Result;

const ZERO: f64 = 0.0;

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegintDemo {
    /// Registry id; the built-in corpus runs when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    /// Integrate over `(0, ∞)` (partie finie at both ends) instead of `ℝ^p`.
    pub halfline: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ExpansionModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl Params for RegintDemo {
    fn validate(&self) -> std::result::Result<(), String> {
        if self.function.is_some() && self.reference.is_none() {
            return Err("regint-demo with `function` needs a `reference` value".into());
        }
        if self.function.is_none() && (self.reference.is_some() || self.model.is_some() || self.p.is_some()) {
            return Err("`reference`, `model` and `p` apply only together with `function`".into());
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err("tolerance must be positive".into());
            }
        }
        if let Some(m) = &self.model {
            m.validate().map_err(|e| e.to_string())?;
        }
        Ok(())
    }
}

fn halfline_cfg(nf: &NamedFunction, budget: &Budget) -> HalflineConfig {
    budget.halfline(HalflineConfig {
        ladder_at_infinity: nf.ladder,
        ladder_at_zero: nf.ladder_at_zero,
        ..Default::default()
    })
}

fn table_name(id: &str) -> String {
    id.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

fn regint_named(nf: &NamedFunction, model: &ExpansionModel, budget: &Budget, out: &mut Outcome) -> Result<Complex64> {
    let f = |x: &[f64]| (nf.f)(x);
    let cfg = budget.regint(RegintConfig::default().with_ladder(nf.ladder));
    let rv = regint_rp(&f, nf.p, model, &cfg)?;
    out.tables.extend(Table::from_regint(&table_name(&nf.id), &rv));
    *out = std::mem::take(out).error_estimate(rv.residual());
    Ok(rv.value)
}

fn halfline_named(nf: &NamedFunction, model: &ExpansionModel, budget: &Budget, out: &mut Outcome) -> Result<Complex64> {
    let Some(at_zero) = &nf.model_at_zero else {
        return Err(crate::Error::InvalidInput(format!("`{}` has no model at the origin", nf.id)));
    };
    let f = |x: f64| Ok((nf.f)(&[x]));
    let rv = regint_halfline(f, at_zero, model, &halfline_cfg(nf, budget))?;
    out.tables.extend(Table::from_regint(&table_name(&nf.id), &rv));
    *out = std::mem::take(out).error_estimate(rv.residual());
    Ok(rv.value)
}

/// A fixed polynomial on `ℝ^p` of degree 3.
fn polynomial_rp(p: usize) -> impl Fn(&[f64]) -> Complex64 + Sync {
    move |x: &[f64]| {
        let x0 = x[0];
        let x1 = if p > 1 { x[1] } else { 0.5 };
        let x2 = if p > 2 { x[2] } else { -1.0 };
        Complex64::new(1.0 + 3.0 * x0 - x0 * x1 + 2.0 * x1 * x1 - x0 * x0 * x0 + x0 * x1 * x2, x2 * x2 - 2.0 * x0)
    }
}

pub fn regint_demo(p: &RegintDemo, budget: &Budget) -> Result<Outcome> {
    let mut out = Outcome::default();
    if let Some(id) = &p.function {
        let nf = named_function(id, p.p.unwrap_or(1))?;
        let model = p.model.clone().unwrap_or_else(|| nf.model.clone());
        let v = if p.halfline {
            halfline_named(&nf, &model, budget, &mut out)?
        } else {
            regint_named(&nf, &model, budget, &mut out)?
        };
        let reference = p.reference.unwrap_or(ZERO);
        out.push(Check::real_abs(
            id,
            v,
            reference,
            p.tolerance.unwrap_or(1e-8),
            Provenance::Oracle,
            "supplied reference",
        ));
        return Ok(out.route(if p.halfline { "halfline" } else { "rp" }));
    }

    for (alpha, l) in [(-1.5, 0), (-1.0, 1), (0.5, 2)] {
        let nf = named_function(&format!("power_log({alpha}, {l})"), 1)?;
        let v = halfline_named(&nf, &nf.model.clone(), budget, &mut out)?;
        out.push(Check::real_abs(
            &format!("halfline x^{alpha} log^{l} x"),
            v,
            0.0,
            1e-8,
            Provenance::ClosedForm,
            "regularized integral of a pure power vanishes",
        ));
    }

    let nf = named_function("polynomial(1, -2, 0.5, 3)", 1)?;
    let v = regint_named(&nf, &nf.model.clone(), budget, &mut out)?;
    out.push(Check::real_abs(
        "polynomial on R",
        v,
        0.0,
        1e-8,
        Provenance::ClosedForm,
        "regularized integral of a polynomial vanishes",
    ));
    for dim in [2usize, 3] {
        let f = polynomial_rp(dim);
        let model = ExpansionModel::powers(&[3.0, 2.0, 1.0, 0.0], -(dim as f64) - 1.0)?;
        let cfg = budget.regint(
            RegintConfig::default()
                .with_ladder(RadiusLadder::new(4.0, 4096.0, 24))
                .with_sphere(SphereResolution::new(8, 16)),
        );
        let rv = regint_rp(&f, dim, &model, &cfg)?;
        out.tables.extend(Table::from_regint(&format!("polynomial-r{dim}"), &rv));
        out.push(Check::real_abs(
            &format!("polynomial on R^{dim}"),
            rv.value,
            0.0,
            1e-8,
            Provenance::ClosedForm,
            "regularized integral of a polynomial vanishes",
        ));
    }

    let nf = named_function("inv_x_one_plus_x", 1)?;
    let v = halfline_named(&nf, &nf.model.clone(), budget, &mut out)?;
    out.push(Check::real_abs(
        "halfline 1/(x(1+x))",
        v,
        0.0,
        1e-8,
        Provenance::Oracle,
        "finite parts of the antiderivative log(x/(1+x)) at 0 and infinity",
    ));

    let nf = named_function("lorentzian", 1)?;
    let v = regint_named(&nf, &nf.model.clone(), budget, &mut out)?;
    out.push(Check::real_abs(
        "1/(1+x^2) on R",
        v,
        PI,
        1e-8,
        Provenance::Exact,
        "convergent integral pi",
    ));
    let nf = named_function("lorentzian", 3)?;
    let v = regint_named(&nf, &nf.model.clone(), budget, &mut out)?;
    out.push(Check::real_abs(
        "1/(1+|x|^2) on R^3",
        v,
        -2.0 * PI * PI,
        1e-8,
        Provenance::Oracle,
        "constant term of 4 pi (R - atan R)",
    ));
    Ok(out.route("rp+halfline"))
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CovCheck {
    /// `identity`, `line-dilation` or `anisotropic`; all when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
}

const COV_CASES: [&str; 3] = ["identity", "line-dilation", "anisotropic"];

impl Params for CovCheck {
    fn validate(&self) -> std::result::Result<(), String> {
        match &self.case {
            Some(c) if !COV_CASES.contains(&c.as_str()) => Err(format!("unknown cov-check case `{c}`")),
            _ => Ok(()),
        }
    }
}

fn cutoff_power(x: &[f64], p: i32) -> Complex64 {
    let r = norm(x);
    Complex64::new(chi(r) * r.powi(-p), 0.0)
}

pub fn cov_check(p: &CovCheck, budget: &Budget) -> Result<Outcome> {
    let mut out = Outcome::default();
    for case in COV_CASES {
        if p.case.as_deref().is_some_and(|c| c != case) {
            continue;
        }
        match case {
            "identity" | "line-dilation" => {
                let f = |x: &[f64]| cutoff_power(x, 1);
                let model = ExpansionModel::at_infinity(vec![Term::new(-1.0, 0)], -6.0)?;
                let a = if case == "identity" { 1.0 } else { 2.0 };
                let cfg = budget.regint(RegintConfig::default());
                let (chk, corr) = cov_correction(&f, 1, &model, &DMatrix::from_element(1, 1, a), &cfg)?;
                out.push(Check::abs(
                    &format!("{case}: lhs vs rhs"),
                    chk.lhs,
                    chk.rhs,
                    1e-6,
                    Provenance::Oracle,
                    "formula side of the change of variables",
                ));
                let (expect, src) = if case == "identity" {
                    (0.0, "no correction for the identity")
                } else {
                    (2f64.ln(), "log 2 from the explicit antiderivative of 1/|x|")
                };
                out.push(Check::real_abs(&format!("{case}: correction"), corr, expect, 1e-10, Provenance::Oracle, src));
            }
            _ => {
                let f = |x: &[f64]| cutoff_power(x, 3);
                let model = ExpansionModel::at_infinity(vec![Term::new(-3.0, 0)], -8.0)?;
                let cfg = budget.regint(RegintConfig::default().with_sphere(SphereResolution::new(24, 48)));
                let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 1.0, 1.0]));
                let (chk, corr) = cov_correction(&f, 3, &model, &a, &cfg)?;
                out.push(Check::abs(
                    "anisotropic: lhs vs rhs",
                    chk.lhs,
                    chk.rhs,
                    1e-6,
                    Provenance::Oracle,
                    "formula side of the change of variables",
                ));
                // -1/2 ∫_{S²} log|A^{-1}ξ| = -π ∫_0^1 log(1 - 3t²/4) dt in closed form.
                let c: f64 = 0.75;
                let j = (1.0 - c).ln() - 2.0 + 2.0 / c.sqrt() * c.sqrt().atanh();
                out.push(Check::real_abs(
                    "anisotropic: correction",
                    corr,
                    -PI * j,
                    1e-8,
                    Provenance::Oracle,
                    "elementary integral of log|A^-1 xi| over the sphere",
                ));
            }
        }
    }
    Ok(out.route("rp"))
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StokesCheck {
    /// `compact`, `sign-line` or `coordinate-3d`; all when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
}

const STOKES_CASES: [&str; 3] = ["compact", "sign-line", "coordinate-3d"];

impl Params for StokesCheck {
    fn validate(&self) -> std::result::Result<(), String> {
        match &self.case {
            Some(c) if !STOKES_CASES.contains(&c.as_str()) => Err(format!("unknown stokes-check case `{c}`")),
            _ => Ok(()),
        }
    }
}

pub fn stokes_check(p: &StokesCheck, budget: &Budget) -> Result<Outcome> {
    let mut out = Outcome::default();
    for case in STOKES_CASES {
        if p.case.as_deref().is_some_and(|c| c != case) {
            continue;
        }
        let (chk, expect, src) = match case {
            "compact" => {
                let f = |x: &[f64]| Complex64::new((1.0 - chi(x[0].abs())) * x[0], 0.0);
                let model = ExpansionModel::at_infinity(vec![Term::new(0.0, 0)], -6.0)?;
                let chk = stokes_defect(&f, None, 1, 0, &model, &budget.regint(RegintConfig::default()))?;
                (chk, 0.0, "compact support: ordinary Stokes")
            }
            "sign-line" => {
                let f = |x: &[f64]| Complex64::new(chi(x[0].abs()) * x[0].signum(), 0.0);
                let model = ExpansionModel::at_infinity(vec![Term::new(0.0, 0)], -6.0)?;
                let chk = stokes_defect(&f, None, 1, 0, &model, &budget.regint(RegintConfig::default()))?;
                (chk, 2.0, "f(+inf) - f(-inf) = 2")
            }
            _ => {
                let f = |x: &[f64]| {
                    let r = norm(x);
                    Complex64::new(chi(r) * x[0] / r.powi(3), 0.0)
                };
                let model = ExpansionModel::at_infinity(vec![Term::new(-2.0, 0)], -7.0)?;
                let cfg = budget.regint(RegintConfig::default().with_sphere(SphereResolution::new(12, 24)));
                let chk = stokes_defect(&f, None, 3, 0, &model, &cfg)?;
                (chk, 4.0 * PI / 3.0, "integral of xi_1^2 over S^2 is 4 pi / 3")
            }
        };
        out.push(Check::abs(
            &format!("{case}: lhs vs rhs"),
            chk.lhs,
            chk.rhs,
            1e-6,
            Provenance::Oracle,
            "sphere integral of the extracted coefficient",
        ));
        out.push(Check::real_abs(&format!("{case}: rhs"), chk.rhs, expect, 1e-10, Provenance::Oracle, src));
    }
    Ok(out.route("rp"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MellinZero {
    /// Exponent of the pure power `x^alpha`.
    pub alpha: f64,
    /// Mellin variables at which the pure power is transformed.
    pub s: Vec<f64>,
}

impl Default for MellinZero {
    fn default() -> Self {
        Self {
            alpha: -0.5,
            s: vec![0.3, 1.7],
        }
    }
}

impl Params for MellinZero {
    fn validate(&self) -> std::result::Result<(), String> {
        if !self.alpha.is_finite() || self.s.iter().any(|s| !s.is_finite()) || self.s.len() > 32 {
            return Err("alpha and s must be finite (at most 32 values of s)".into());
        }
        Ok(())
    }
}

pub fn mellin_zero(p: &MellinZero, budget: &Budget) -> Result<Outcome> {
    let mut out = Outcome::default();
    let base = budget.halfline(HalflineConfig::default());
    let alpha = p.alpha;
    for &s in &p.s {
        let t = vec![Term::new(s - 1.0 + alpha, 0)];
        let at0 = ExpansionModel::at_zero(t.clone(), (s - 1.0 + alpha + 4.0).max(0.0))?;
        let atinf = ExpansionModel::at_infinity(t, (s - 1.0 + alpha - 4.0).min(-2.0))?;
        let v = mellin_reg(|x| Ok(Complex64::new(x.powf(alpha), 0.0)), s, &at0, &atinf, &base)?;
        out.push(Check::real_abs(
            &format!("x^{alpha} at s = {s}"),
            v,
            0.0,
            1e-8,
            Provenance::ClosedForm,
            "regularized Mellin transform of a pure power vanishes",
        ));
    }

    let at0 = ExpansionModel::powers_at_zero(&[1.0, 2.0, 3.0, 4.0, 5.0], 6.0)?;
    let cfg = budget.halfline(HalflineConfig {
        ladder_at_infinity: RadiusLadder::new(64.0, 65536.0, 16),
        ..Default::default()
    });
    let v = mellin_reg(|x| Ok(Complex64::new((-x).exp(), 0.0)), 2.0, &at0, &ExpansionModel::empty(-8.0), &cfg)?;
    out.push(Check::real_abs("e^-x at s = 2", v, 1.0, 1e-8, Provenance::Exact, "Gamma(2) = 1"));

    let at0 = ExpansionModel::powers_at_zero(&[-0.5, 0.5, 1.5, 2.5, 3.5], 4.5)?;
    let atinf = ExpansionModel::powers(&[-1.5, -2.5, -3.5, -4.5], -5.5)?;
    let cfg = budget.halfline(HalflineConfig {
        ladder_at_infinity: RadiusLadder::new(64.0, 65536.0, 24),
        ladder_at_zero: RadiusLadder::new(1.0 / 65536.0, 1.0 / 64.0, 24),
        ..Default::default()
    });
    let v = mellin_reg(|x| Ok(Complex64::new(1.0 / (1.0 + x), 0.0)), 0.5, &at0, &atinf, &cfg)?;
    out.push(Check::real_abs(
        "1/(1+x) at s = 1/2",
        v,
        PI,
        1e-8,
        Provenance::Oracle,
        "beta integral pi / sin(pi s)",
    ));
    Ok(out.route("halfline"))
}
