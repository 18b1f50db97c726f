use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Params;
use crate::cli::config::Budget;
use crate::cli::report::{Check, Outcome, Provenance};
use crate::partrace::{l2_trace, named_kernel, tr_param, Kernel, SpectralFamily, SpectralModel, TraceConfig};
use crate::special::hurwitz_zeta;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceTanh {
    pub a: f64,
    pub mu: Vec<f64>,
}

impl Default for TraceTanh {
    fn default() -> Self {
        Self {
            a: 0.5,
            mu: vec![0.5, 1.0, 5.0],
        }
    }
}

impl Params for TraceTanh {
    fn validate(&self) -> std::result::Result<(), String> {
        SpectralModel::circle(self.a).map_err(|e| e.to_string())?;
        if self.mu.is_empty() || self.mu.iter().any(|m| !(*m > 0.0 && *m <= 100.0)) {
            return Err("mu values must lie in (0, 100]".into());
        }
        Ok(())
    }
}

/// `Σ_n ((n+a)² + μ²)^{-1}` by partial fractions.
fn resolvent_sum(a: f64, mu: f64) -> f64 {
    let t = 2.0 * PI * mu;
    // sinh(t)/(cosh(t) - cos(2πa)) with the large-t overflow removed
    let e = (-t).exp();
    let ratio = (1.0 - e * e) / (1.0 + e * e - 2.0 * e * (2.0 * PI * a).cos());
    PI / mu * ratio
}

pub fn trace_tanh(p: &TraceTanh, budget: &Budget) -> Result<Outcome> {
    let tcfg = budget.trace(TraceConfig::default());
    let model = SpectralModel::circle(p.a)?;
    let fam = SpectralFamily::new(model.clone(), Kernel::Expr(named_kernel("resolvent(1)", 1)?), -2.0)?;
    let mut out = Outcome::default();
    for &mu in &p.mu {
        let tr = l2_trace(&fam, &[mu], &tcfg)?;
        out = out.error_estimate(tr.tail_estimate);
        out.push(Check::real_rel(
            &format!("mu={mu}"),
            tr.value,
            resolvent_sum(p.a, mu),
            1e-8,
            Provenance::ClosedForm,
            "(pi/mu) sinh(2 pi mu)/(cosh(2 pi mu) - cos(2 pi a))",
        ));
    }
    let eta = SpectralFamily::new(model, Kernel::Expr(named_kernel("eta_kernel(2)", 1)?), -3.0)?;
    let tr = l2_trace(&eta, &[0.0], &tcfg)?;
    let b = p.a - p.a.floor();
    out.push(Check::real_abs(
        "sum of lambda^-3",
        tr.value,
        hurwitz_zeta(3.0, b) - hurwitz_zeta(3.0, 1.0 - b),
        1e-10,
        Provenance::Oracle,
        "zeta_H(3,a) - zeta_H(3,1-a)",
    ));
    Ok(out.route("eigenvalue-sum"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrDerivativeCheck {
    pub a: f64,
    pub mu: f64,
    /// Finite-difference step in `μ`.
    pub step: f64,
}

impl Default for TrDerivativeCheck {
    fn default() -> Self {
        Self {
            a: 0.25,
            mu: 2.0,
            step: 1e-2,
        }
    }
}

impl Params for TrDerivativeCheck {
    fn validate(&self) -> std::result::Result<(), String> {
        SpectralModel::circle(self.a).map_err(|e| e.to_string())?;
        if !(self.mu.is_finite() && self.mu.abs() <= 100.0) {
            return Err("mu must lie in [-100, 100]".into());
        }
        if !(self.step > 1e-5 && self.step <= 0.1) {
            return Err(format!("step {} outside (1e-5, 0.1]", self.step));
        }
        Ok(())
    }
}

pub fn tr_derivative(p: &TrDerivativeCheck, budget: &Budget) -> Result<Outcome> {
    let tcfg = budget.trace(TraceConfig::default());
    let k = named_kernel("mu_sq_resolvent", 1)?;
    let fam = SpectralFamily::new(SpectralModel::circle(p.a)?, Kernel::Expr(k.clone()), 0.0)?;
    let v = |m: f64| -> Result<Complex64> { Ok(tr_param(&fam, &[m], &tcfg)?.value) };
    let (mu, h) = (p.mu, p.step);
    let (m2, m1, z, p1, p2) = (v(mu - 2.0 * h)?, v(mu - h)?, v(mu)?, v(mu + h)?, v(mu + 2.0 * h)?);
    let fd1 = (m2 - p2 + 8.0 * (p1 - m1)) / (12.0 * h);
    let fd2 = (-m2 - p2 + 16.0 * (p1 + m1) - 30.0 * z) / (12.0 * h * h);

    let d1 = fam.with_kernel(Kernel::Expr(k.derivative(0)?), -1.0)?;
    let d2 = fam.with_kernel(Kernel::Expr(k.derivative(0)?.derivative(0)?), -2.0)?;
    let t1 = tr_param(&d1, &[mu], &tcfg)?;
    let t2 = l2_trace(&d2, &[mu], &tcfg)?;
    let mut out = Outcome::default().error_estimate(t1.tail_estimate.max(t2.tail_estimate));
    out.push(Check::abs(
        "TR(d^2 A) vs d^2 TR(A)",
        t2.value,
        fd2,
        1e-6,
        Provenance::Oracle,
        "five-point second difference of TR(A)",
    ));
    out.push(Check::abs(
        "TR(d A) vs d TR(A)",
        t1.value,
        fd1,
        1e-6,
        Provenance::Oracle,
        "five-point first difference of TR(A)",
    ));
    Ok(out.route("eigenvalue-sum"))
}
