use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::path::PathFamily;
use crate::cutoff::smooth_step;
use crate::forms::MatrixFamily;
use crate::fd::partial;
use crate::ids::{expect_args, parse_call};
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

type PathFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Scalar path `(s, λ) ↦ f_s(λ)` with `∂_λ f_s` supported in `|λ| < support`.
#[derive(Clone)]
pub struct ScalarPath {
    pub name: String,
    pub support: f64,
    /// Whether every `f_s` is invertible, so that `η(f_s)` itself is defined.
    pub invertible: bool,
    f: PathFn,
    /// Optional exact `∂_λ f / f` and `∂_s f`.
    dlog_lambda: Option<PathFn>,
    ds: Option<PathFn>,
}

impl std::fmt::Debug for ScalarPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarPath")
            .field("name", &self.name)
            .field("support", &self.support)
            .field("invertible", &self.invertible)
            .finish()
    }
}

impl ScalarPath {
    pub fn new<F>(name: &str, support: f64, invertible: bool, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            name: name.to_string(),
            support,
            invertible,
            f: Arc::new(f),
            dlog_lambda: None,
            ds: None,
        }
    }

    pub fn with_dlog_lambda<F>(mut self, g: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        self.dlog_lambda = Some(Arc::new(g));
        self
    }

    pub fn with_ds<F>(mut self, g: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        self.ds = Some(Arc::new(g));
        self
    }

    pub fn eval(&self, s: f64, lambda: f64) -> Complex64 {
        (self.f)(s, lambda)
    }

    fn ds_at(&self, s: f64, lambda: f64) -> Result<Complex64> {
        match &self.ds {
            Some(g) => Ok(g(s, lambda)),
            None => partial(&|t: &[f64]| Ok((self.f)(t[0], lambda)), &[s], 0, 1e-3),
        }
    }

    fn dlog_at(&self, s: f64, lambda: f64) -> Result<Complex64> {
        match &self.dlog_lambda {
            Some(g) => Ok(g(s, lambda)),
            None => {
                let d = partial(&|l: &[f64]| Ok((self.f)(s, l[0])), &[lambda], 0, 1e-4)?;
                Ok(d / (self.f)(s, lambda))
            }
        }
    }

    /// `f_s` as a rank-one family on the line.
    pub fn family_at(&self, s: f64) -> MatrixFamily {
        let (p1, p2) = (self.clone(), self.clone());
        let one = |z: Complex64| crate::CMat::from_element(1, 1, z);
        MatrixFamily::new(1, 1, move |x| Ok(one(p1.eval(s, x[0]))))
            .with_partials(move |x| Ok(vec![one(p2.dlog_at(s, x[0])? * p2.eval(s, x[0]))]))
    }

    pub fn to_path_family(&self) -> PathFamily {
        let (p, q) = (self.clone(), self.clone());
        PathFamily::new(1, 1, move |s| Ok(p.family_at(s))).with_derivative(move |s| {
            let q = q.clone();
            Ok(MatrixFamily::new(1, 1, move |x| {
                Ok(crate::CMat::from_element(1, 1, q.ds_at(s, x[0])?))
            }))
        })
    }

    /// `vη(f_s) = (1/πi)((∂_s f/f)(+∞) - (∂_s f/f)(-∞))`, read off beyond the support.
    pub fn v_eta(&self, s: f64) -> Result<Complex64> {
        let l = self.support;
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, sign) in [(l, 1.0), (-l, -1.0)] {
            let v = (self.f)(s, x);
            if v.norm() < 1e-12 {
                return Err(Error::Singular { point: vec![s, x] });
            }
            acc += self.ds_at(s, x)? / v * sign;
        }
        Ok(acc / (PI * I))
    }

    /// `η(f_s) = (1/πi) ∫ f_s'/f_s dλ` for invertible paths.
    pub fn eta(&self, s: f64) -> Result<Complex64> {
        let gl = GaussLegendre::new(16);
        let panels = 512;
        let h = 2.0 * self.support / panels as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..panels {
            let a = -self.support + h * i as f64;
            for (x, w) in gl.on_interval(a, a + h) {
                if (self.f)(s, x).norm() < 1e-12 {
                    return Err(Error::Singular { point: vec![s, x] });
                }
                acc += self.dlog_at(s, x)? * w;
            }
        }
        Ok(acc / (PI * I))
    }
}

/// `∫_{-∞}^{u} S(v) dv` for the smooth step `S`.
fn step_primitive(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        u - 0.5
    } else {
        GaussLegendre::new(64).integrate(0.0, u, smooth_step)
    }
}

/// Smoothed clamp of `λ` to `[s, 1]`: `s + ∫_s^1 S((λ - t)/w) dt`.
fn soft_clamp(s: f64, lambda: f64, w: f64) -> f64 {
    s + w * (step_primitive((lambda - s) / w) - step_primitive((lambda - 1.0) / w))
}

/// The phase-unwinding path `f_s = exp(2πi clamp(λ, s, 1))` with corners
/// smoothed over width `w`.
pub fn unwinding_path(w: f64) -> ScalarPath {
    ScalarPath::new("unwinding", 2.0 + w, true, move |s, l| {
        (I * 2.0 * PI * soft_clamp(s, l, w)).exp()
    })
    .with_dlog_lambda(move |s, l| I * 2.0 * PI * (smooth_step((l - s) / w) - smooth_step((l - 1.0) / w)))
    .with_ds(move |s, l| {
        let f = (I * 2.0 * PI * soft_clamp(s, l, w)).exp();
        f * I * 2.0 * PI * (1.0 - smooth_step((l - s) / w))
    })
}

/// `g_s = (1 - s) f_0 + s f_1` between the endpoints of [`unwinding_path`].
pub fn linear_path(w: f64) -> ScalarPath {
    let f0 = move |l: f64| (I * 2.0 * PI * soft_clamp(0.0, l, w)).exp();
    let f1 = move |l: f64| (I * 2.0 * PI * soft_clamp(1.0, l, w)).exp();
    ScalarPath::new("linear", 2.0 + w, false, move |s, l| f0(l) * (1.0 - s) + f1(l) * s)
        .with_ds(move |_s, l| f1(l) - f0(l))
}

/// `f_s = f_0` for every `s`.
pub fn constant_path(w: f64) -> ScalarPath {
    ScalarPath::new("constant", 2.0 + w, true, move |_s, l| {
        (I * 2.0 * PI * soft_clamp(0.0, l, w)).exp()
    })
}

/// Ids: `unwinding`, `linear`, `constant`, each optionally with a width argument.
pub fn named_scalar_path(id: &str, default_width: f64) -> Result<ScalarPath> {
    let (name, args) = parse_call(id)?;
    let w = match args.len() {
        0 => default_width,
        _ => {
            expect_args(&name, &args, 1)?;
            args[0]
        }
    };
    if !(w > 0.0 && w <= 0.5) {
        return Err(Error::InvalidInput(format!("smoothing width {w} must lie in (0, 0.5]")));
    }
    match name.as_str() {
        "unwinding" => Ok(unwinding_path(w)),
        "linear" => Ok(linear_path(w)),
        "constant" => Ok(constant_path(w)),
        other => Err(Error::InvalidInput(format!("unknown path id `{other}`"))),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathFlow {
    pub name: String,
    /// `∫_0^1 vη(f_s) ds`.
    pub integral: Complex64,
    /// `η(f_1) - η(f_0)` when both endpoints are invertible.
    pub eta_change: Option<Complex64>,
    /// `½(η(f_1) - η(f_0) - ∫ vη)`.
    pub divisor_flow: Option<Complex64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivisorFlowReport {
    pub a: PathFlow,
    pub b: PathFlow,
    /// `∫ vη` along `a` minus along `b`.
    pub discrepancy: Complex64,
}

fn endpoint_eta(path: &ScalarPath, s: f64) -> Option<Complex64> {
    path.eta(s).ok()
}

pub fn path_flow(path: &ScalarPath, nodes: usize) -> Result<PathFlow> {
    let gl = GaussLegendre::new(nodes);
    let mut integral = Complex64::new(0.0, 0.0);
    for (s, w) in gl.on_interval(0.0, 1.0) {
        integral += path.v_eta(s)? * w;
    }
    let eta_change = match (endpoint_eta(path, 0.0), endpoint_eta(path, 1.0)) {
        (Some(a), Some(b)) => Some(b - a),
        _ => None,
    };
    Ok(PathFlow {
        name: path.name.clone(),
        integral,
        eta_change,
        divisor_flow: eta_change.map(|d| (d - integral) * 0.5),
    })
}

/// Integrates `vη` over `s ∈ [0, 1]` along both paths.
pub fn divisor_flow(a: &ScalarPath, b: &ScalarPath, nodes: usize) -> Result<DivisorFlowReport> {
    let fa = path_flow(a, nodes)?;
    let fb = path_flow(b, nodes)?;
    Ok(DivisorFlowReport {
        discrepancy: fa.integral - fb.integral,
        a: fa,
        b: fb,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unwinding_path_flows_by_minus_two() {
        let r = divisor_flow(&unwinding_path(0.05), &linear_path(0.05), 16).unwrap();
        assert!((r.a.integral.re + 2.0).abs() < 1e-10, "{:?}", r.a);
        assert!(r.b.integral.norm() < 1e-10, "{:?}", r.b);
        assert!((r.discrepancy.re + 2.0).abs() < 1e-10);
        let change = r.a.eta_change.unwrap();
        assert!((change.re + 2.0).abs() < 1e-9, "{change}");
        assert!(r.a.divisor_flow.unwrap().norm() < 1e-9);
    }

    #[test]
    fn interior_variation_matches_boundary_formula() {
        let p = unwinding_path(0.05);
        let s = 0.5;
        let d = partial(&|t: &[f64]| p.eta(t[0]), &[s], 0, 1e-3).unwrap();
        assert!((d - p.v_eta(s).unwrap()).norm() < 1e-8, "{d}");
        assert!((p.eta(0.0).unwrap().re - 2.0).abs() < 1e-10);
    }

    #[test]
    fn halving_the_width_changes_nothing() {
        let a = path_flow(&unwinding_path(0.05), 16).unwrap().integral;
        let b = path_flow(&unwinding_path(0.025), 16).unwrap().integral;
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn soft_clamp_limits() {
        assert!((soft_clamp(0.3, -5.0, 0.05) - 0.3).abs() < 1e-15);
        assert!((soft_clamp(0.3, 5.0, 0.05) - 1.0).abs() < 1e-12);
        assert!((soft_clamp(0.3, 0.6, 0.05) - 0.6 + 0.025).abs() < 1e-12);
        assert!(named_scalar_path("unwinding(0)", 0.05).is_err());
        assert!(constant_path(0.05).v_eta(0.4).unwrap().norm() < 1e-12);
    }
}
