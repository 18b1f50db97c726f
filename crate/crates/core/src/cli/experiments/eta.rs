use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Params;
use crate::asymptotics::{ExpansionModel, RegintConfig};
use crate::clifford::CliffordRep;
use crate::cli::config::Budget;
use crate::cli::report::{Check, Outcome, Provenance, Table};
use crate::eta::{
    additivity_defect, boundary_model, eta1_additivity, eta_affine_closed_form, eta_k, eta_suspension,
    eta_suspension_full, eta_variation, named_scalar_path, unwinding_path, path_flow, spectral_eta, winding,
    PathFamily, SpectralEtaMethod,
};
use crate::forms::{clifford_cone, default_s3_resolution, moebius_family, named_family, MatrixFamily};
use crate::partrace::{SpectralModel, TraceConfig};
use crate::quadrature::RadiusLadder;
use crate::sphere::SphereResolution;
use crate::{CMat, Error, Result};

fn line_cfg(budget: &Budget) -> RegintConfig {
    budget.regint(RegintConfig::default().with_ladder(RadiusLadder::new(16.0, 65536.0, 24)))
}

fn moebius_model() -> Result<ExpansionModel> {
    ExpansionModel::powers(&[-2.0, -4.0, -6.0, -8.0], -10.0)
}

/// Density model of `a + c(x)` on `ℝ^{2k-1}`: `(a² + r²)^{-k}` expanded at infinity.
fn affine_model(k: usize) -> Result<ExpansionModel> {
    let d = -2.0 * k as f64;
    ExpansionModel::powers(&[d, d - 2.0, d - 4.0, d - 6.0], d - 8.0)
}

fn unit_clifford_models() -> Result<(ExpansionModel, ExpansionModel)> {
    let degs: Vec<f64> = (4..=11).map(|d| -(d as f64)).collect();
    let density = ExpansionModel::powers(&degs, -12.0)?;
    let tdeg: Vec<f64> = (2..=9).map(|d| -(d as f64)).collect();
    let theta = boundary_model(&ExpansionModel::powers(&tdeg, -10.0)?, 3)?;
    Ok((density, theta))
}

fn default_density_model(id: &str) -> Option<ExpansionModel> {
    let name = id.split('(').next().unwrap_or("").trim();
    match name {
        "moebius" | "moebius_power" | "scaled_moebius" => moebius_model().ok(),
        "affine_clifford" | "spectral_slice" => {
            let k = crate::ids::parse_call(id).ok()?.1.get(1).copied()? as usize;
            affine_model(k).ok()
        }
        "unit_clifford" => unit_clifford_models().ok().map(|m| m.0),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EtaMatrix {
    /// Family registry id; the built-in corpus runs when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ExpansionModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl Params for EtaMatrix {
    fn validate(&self) -> std::result::Result<(), String> {
        match &self.family {
            None if self.model.is_some() || self.reference.is_some() => {
                Err("`model` and `reference` apply only together with `family`".into())
            }
            Some(_) if self.reference.is_none() => Err("eta-matrix with `family` needs a `reference`".into()),
            Some(id) if self.model.is_none() && default_density_model(id).is_none() => {
                Err(format!("no default density model for `{id}`; supply `model`"))
            }
            _ => Ok(()),
        }
    }
}

fn k_of(f: &MatrixFamily) -> Result<usize> {
    if f.p % 2 == 1 {
        Ok(f.p.div_ceil(2))
    } else {
        Err(Error::InvalidInput(format!("eta needs an odd-dimensional parameter space, got p = {}", f.p)))
    }
}

pub fn eta_matrix(p: &EtaMatrix, budget: &Budget) -> Result<Outcome> {
    let mut out = Outcome::default();
    let cfg = line_cfg(budget);
    if let Some(id) = &p.family {
        let f = named_family(id)?;
        let model = match &p.model {
            Some(m) => m.clone(),
            None => default_density_model(id).ok_or_else(|| Error::InvalidInput(format!("no model for `{id}`")))?,
        };
        let e = eta_k(&f, k_of(&f)?, &model, &cfg)?;
        out = out.error_estimate(e.error_estimate);
        for rv in &e.diagnostics {
            out.tables.extend(Table::from_regint("density", rv));
        }
        out.push(Check::real_abs(
            id,
            e.value,
            p.reference.unwrap_or(0.0),
            p.tolerance.unwrap_or(1e-6),
            Provenance::Oracle,
            "supplied reference",
        ));
        return Ok(out.route("matrix-form"));
    }

    for (id, expect) in [("moebius", 2.0), ("moebius_power(3)", 6.0)] {
        let e = eta_k(&named_family(id)?, 1, &moebius_model()?, &cfg)?;
        out = out.error_estimate(e.error_estimate);
        out.push(Check::real_abs(
            &format!("eta_1({id})"),
            e.value,
            expect,
            1e-8,
            Provenance::Oracle,
            "residue integral: twice the winding number",
        ));
    }
    let rep = CliffordRep::standard(2)?;
    for a in [1.0, -1.0] {
        let f = crate::forms::affine_clifford(a, &rep);
        let e = eta_k(&f, 2, &affine_model(2)?, &cfg)?;
        out = out.error_estimate(e.error_estimate);
        out.push(Check::real_abs(
            &format!("eta_2({a} + c(x))"),
            e.value,
            -a.signum(),
            1e-4,
            Provenance::ClosedForm,
            "-sgn(a)",
        ));
        let closed = eta_affine_closed_form(a, 2, &affine_model(2)?, &cfg)?;
        out.push(Check::rel(
            &format!("eta_2({a} + c(x)): matrix vs closed-form route"),
            e.value,
            closed.value,
            1e-8,
            Provenance::Oracle,
            "radial integral of the closed-form density",
        ));
    }
    let c = MatrixFamily::constant(3, CMat::identity(2, 2) * Complex64::new(2.0, 1.0));
    let e = eta_k(&c, 2, &affine_model(2)?, &cfg)?;
    out.push(Check::real_abs("eta_2(constant)", e.value, 0.0, 1e-12, Provenance::Exact, "dA = 0"));
    Ok(out.route("matrix-form"))
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Winding {
    /// `1` (circle and line) or `2` (three-sphere); both when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

impl Params for Winding {
    fn validate(&self) -> std::result::Result<(), String> {
        match self.k {
            Some(k) if !(1..=2).contains(&k) => Err(format!("winding supports k = 1, 2; got {k}")),
            _ => Ok(()),
        }
    }
}

pub fn winding_numbers(p: &Winding, budget: &Budget) -> Result<Outcome> {
    let mut out = Outcome::default();
    if p.k.is_none_or(|k| k == 1) {
        let e = eta_k(&moebius_family(1.0, 1), 1, &moebius_model()?, &line_cfg(budget))?;
        out.push(Check::real_abs(
            "eta_1((x-i)/(x+i))",
            e.value,
            2.0,
            1e-8,
            Provenance::Oracle,
            "residue integral (1/pi i) int 2i/(x^2+1)",
        ));
        let e = eta_k(&named_family("moebius_power(-2)")?, 1, &moebius_model()?, &line_cfg(budget))?;
        out.push(Check::real_abs(
            "eta_1(((x-i)/(x+i))^-2) / 2",
            e.value * 0.5,
            -2.0,
            1e-8,
            Provenance::Oracle,
            "winding number -2",
        ));
        let circle = MatrixFamily::affine(
            CMat::zeros(1, 1),
            vec![CMat::identity(1, 1), CMat::identity(1, 1) * Complex64::new(0.0, 1.0)],
        );
        let w = winding(&circle, 1, budget.sphere(SphereResolution::default()))?;
        out.push(Check::real_abs("S^1: x0 + i x1", w.value, 1.0, 1e-12, Provenance::Exact, "classical winding number"));
        let c = MatrixFamily::constant(2, CMat::identity(1, 1));
        let w = winding(&c, 1, budget.sphere(SphereResolution::default()))?;
        out.push(Check::real_abs("S^1: constant", w.value, 0.0, 1e-12, Provenance::Exact, "df = 0"));
    }
    if p.k.is_none_or(|k| k == 2) {
        let f = clifford_cone(&CliffordRep::standard(2)?);
        let w = winding(&f, 2, budget.sphere(default_s3_resolution()))?;
        out = out.error_estimate(w.error_estimate);
        out.push(Check::real_abs(
            "S^3: x0 + c(x')",
            w.value,
            -1.0,
            1e-6,
            Provenance::ClosedForm,
            "c_2 (-24 pi^2)",
        ));
    }
    Ok(out.route("boundary"))
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VariationCheck {
    /// `constant`, `moebius-homotopy`, `divisor` or `unit-clifford`; all when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

const VARIATION_PATHS: [&str; 4] = ["constant", "moebius-homotopy", "divisor", "unit-clifford"];

impl Params for VariationCheck {
    fn validate(&self) -> std::result::Result<(), String> {
        match &self.path {
            Some(c) if !VARIATION_PATHS.contains(&c.as_str()) => Err(format!("unknown variation path `{c}`")),
            _ => Ok(()),
        }
    }
}

fn unit_clifford_path(rep: CliffordRep) -> PathFamily {
    PathFamily::new(3, rep.rank, move |s| {
        let r = rep.clone();
        let n = r.rank;
        Ok(MatrixFamily::new(3, n, move |x| {
            let jb = (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt();
            Ok(CMat::identity(n, n) + r.action(x)? * Complex64::new(s / jb, 0.0))
        }))
    })
}

pub fn variation_check(p: &VariationCheck, budget: &Budget) -> Result<Outcome> {
    let mut out = Outcome::default();
    let line_theta = boundary_model(&ExpansionModel::powers(&[-1.0, -3.0, -5.0, -7.0], -9.0)?, 1)?;
    for case in VARIATION_PATHS {
        if p.path.as_deref().is_some_and(|c| c != case) {
            continue;
        }
        let (chk, s, oracle) = match case {
            "constant" => {
                let path = PathFamily::new(1, 1, |_| Ok(moebius_family(1.0, 1)));
                let chk = eta_variation(&path, 1, 0.5, &moebius_model()?, &line_theta, &line_cfg(budget))?;
                (chk, 0.5, Some((0.0, Provenance::Exact, "constant path")))
            }
            "moebius-homotopy" => {
                let path = PathFamily::new(1, 1, |s| Ok(moebius_family(s, 1)));
                let chk = eta_variation(&path, 1, 0.75, &moebius_model()?, &line_theta, &line_cfg(budget))?;
                (chk, 0.75, Some((0.0, Provenance::Oracle, "homotopy with fixed boundary values")))
            }
            "divisor" => {
                let path = unwinding_path(0.05).to_path_family().with_step(1e-3);
                let empty = ExpansionModel::empty(-8.0);
                let mut base = RegintConfig::default().with_ladder(RadiusLadder::new(4.0, 64.0, 8));
                // the smoothed corners need a finer radial rule
                base.radial_nodes = 48;
                let cfg = budget.regint(base);
                let chk = eta_variation(&path, 1, 0.5, &empty, &boundary_model(&empty, 1)?, &cfg)?;
                (chk, 0.5, Some((-2.0, Provenance::Oracle, "boundary values of d_s f / f")))
            }
            _ => {
                let (density, theta) = unit_clifford_models()?;
                let path = unit_clifford_path(CliffordRep::standard(2)?);
                (eta_variation(&path, 2, 0.8, &density, &theta, &line_cfg(budget))?, 0.8, None)
            }
        };
        out.push(Check::abs(
            &format!("{case} at s = {s}: d/ds eta vs formal trace"),
            chk.lhs,
            chk.rhs,
            1e-4,
            Provenance::Oracle,
            "formal trace of the variation form",
        ));
        if let Some((v, prov, src)) = oracle {
            out.push(Check::real_abs(&format!("{case}: formal trace side"), chk.rhs, v, 1e-6, prov, src));
        }
    }
    Ok(out.route("matrix-form"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdditivityDefect {
    /// Rotation angle (about the third axis) relating `B` to `A` in the `η_2` case.
    pub angle: f64,
}

impl Default for AdditivityDefect {
    fn default() -> Self {
        Self { angle: 0.7 }
    }
}

impl Params for AdditivityDefect {
    fn validate(&self) -> std::result::Result<(), String> {
        if self.angle.is_finite() {
            Ok(())
        } else {
            Err("angle must be finite".into())
        }
    }
}

pub fn additivity(p: &AdditivityDefect, budget: &Budget) -> Result<Outcome> {
    let mut out = Outcome::default();
    let cfg = line_cfg(budget);
    for (a, b) in [("moebius", "scaled_moebius(2)"), ("moebius_power(2)", "moebius_power(-3)")] {
        let chk = eta1_additivity(&named_family(a)?, &named_family(b)?, &moebius_model()?, &cfg)?;
        out.push(Check::abs(
            &format!("eta_1({a} * {b})"),
            chk.lhs,
            chk.rhs,
            1e-6,
            Provenance::ClosedForm,
            "eta_1(A) + eta_1(B)",
        ));
    }
    let (density, theta) = unit_clifford_models()?;
    let a = named_family("unit_clifford(2)")?;
    let (c, s) = (p.angle.cos(), p.angle.sin());
    let o = nalgebra::DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
    let b = a.rotated(&o)?;
    let chk = additivity_defect(&a, &b, &density, &theta, &cfg)?;
    out.push(Check::abs(
        "eta_2(AB) - eta_2(A) - eta_2(B)",
        chk.lhs,
        chk.rhs,
        1e-4,
        Provenance::Oracle,
        "-6 c_2 times the formal trace of omega_1 ^ omega_2",
    ));
    Ok(out.route("matrix-form"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralEta {
    /// Shift `a` of `D = -i d/dθ + a`; the built-in corpus runs when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// Weight `k` of the regularized-integral route.
    pub k: usize,
}

impl Default for SpectralEta {
    fn default() -> Self {
        Self { a: None, k: 2 }
    }
}

impl Params for SpectralEta {
    fn validate(&self) -> std::result::Result<(), String> {
        if let Some(a) = self.a {
            SpectralModel::circle(a).map_err(|e| e.to_string())?;
        }
        if !(2..=6).contains(&self.k) {
            return Err(format!("k = {} outside 2..=6", self.k));
        }
        Ok(())
    }
}

fn spectral_cfg(budget: &Budget) -> RegintConfig {
    budget.regint(RegintConfig::default().with_ladder(RadiusLadder::new(8.0, 512.0, 12)))
}

fn eta_reference(a: f64) -> f64 {
    let b = a - a.floor();
    1.0 - 2.0 * b
}

pub fn spectral(p: &SpectralEta, budget: &Budget) -> Result<Outcome> {
    let mut out = Outcome::default();
    let tcfg = budget.trace(TraceConfig::default());
    let cfg = spectral_cfg(budget);
    let model = ExpansionModel::empty(-8.0);
    let (hurwitz_as, regint_as) = match p.a {
        Some(a) => (vec![a], vec![a]),
        None => (vec![0.1, 0.25, 0.4, 0.5], vec![0.25, 0.1, 0.4]),
    };
    for a in hurwitz_as {
        let m = SpectralModel::circle(a)?;
        let e = spectral_eta(&m, SpectralEtaMethod::Hurwitz, &model, &cfg, &tcfg)?;
        out.push(Check::real_abs(
            &format!("hurwitz a={a}"),
            e.value,
            eta_reference(a),
            1e-12,
            Provenance::ClosedForm,
            "zeta_H(0,a) - zeta_H(0,1-a) = 1 - 2a",
        ));
    }
    for a in regint_as {
        let m = SpectralModel::circle(a)?;
        let e = spectral_eta(&m, SpectralEtaMethod::Regint { k: p.k }, &model, &cfg, &tcfg)?;
        out = out.error_estimate(e.error_estimate);
        for rv in &e.diagnostics {
            out.tables.extend(Table::from_regint(&format!("a={a}"), rv));
        }
        out.push(Check::real_abs(
            &format!("regint k={} a={a}", p.k),
            e.value,
            eta_reference(a),
            1e-3,
            Provenance::Oracle,
            "Hurwitz zeta value 1 - 2a",
        ));
    }
    Ok(out.route("spectral-reduction"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EtaSuspension {
    pub a: f64,
    pub k: usize,
    /// `+1` or `-1`; both when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<i32>,
    /// Also integrate the eigenvalue sum over the full `ℝ^{2k-1}`.
    pub full_check: bool,
}

impl Default for EtaSuspension {
    fn default() -> Self {
        Self {
            a: 0.25,
            k: 2,
            sign: None,
            full_check: true,
        }
    }
}

impl Params for EtaSuspension {
    fn validate(&self) -> std::result::Result<(), String> {
        SpectralModel::circle(self.a).map_err(|e| e.to_string())?;
        if !(1..=4).contains(&self.k) {
            return Err(format!("k = {} outside 1..=4", self.k));
        }
        if self.full_check && self.k > 2 {
            return Err("the full-dimensional check is limited to k <= 2".into());
        }
        match self.sign {
            Some(s) if s != 1 && s != -1 => Err("sign must be +1 or -1".into()),
            _ => Ok(()),
        }
    }
}

pub fn suspension(p: &EtaSuspension, budget: &Budget) -> Result<Outcome> {
    let mut out = Outcome::default();
    let m = SpectralModel::circle(p.a)?;
    let tcfg = budget.trace(TraceConfig::default());
    let model = ExpansionModel::empty(-8.0);
    let signs = p.sign.map_or_else(|| vec![1, -1], |s| vec![s]);
    let eta_d = eta_reference(p.a);
    for &s in &signs {
        let e = eta_suspension(&m, p.k, s as f64, &model, &spectral_cfg(budget), &tcfg)?;
        out = out.error_estimate(e.error_estimate);
        for rv in &e.diagnostics {
            out.tables.extend(Table::from_regint(&format!("sign{s:+}"), rv));
        }
        out.push(Check::real_abs(
            &format!("eta_{}(D {} c(mu))", p.k, if s > 0 { "+" } else { "-" }),
            e.value,
            -(s as f64) * eta_d,
            5e-3,
            Provenance::ClosedForm,
            "-/+ eta(D) with eta(D) = 1 - 2a",
        ));
    }
    if p.full_check {
        let s = signs[0];
        let cfg = budget.regint(
            RegintConfig::default()
                .with_ladder(RadiusLadder::new(8.0, 64.0, 6))
                .with_sphere(SphereResolution::new(8, 16)),
        );
        let e = eta_suspension_full(&m, p.k, s as f64, &model, &cfg, &tcfg)?;
        out.push(Check::real_abs(
            "full-dimensional quadrature",
            e.value,
            -(s as f64) * eta_d,
            5e-3,
            Provenance::ClosedForm,
            "-/+ eta(D) with eta(D) = 1 - 2a",
        ));
    }
    Ok(out.route("spectral-reduction"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DivisorFlowParams {
    /// `unwinding`, `linear` or `constant`; the path comparison runs when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    /// Corner-smoothing width.
    pub width: f64,
    /// Gauss–Legendre nodes for the integral over `s`.
    pub nodes: usize,
}

impl Default for DivisorFlowParams {
    fn default() -> Self {
        Self {
            path: None,
            width: 0.05,
            nodes: 16,
        }
    }
}

impl Params for DivisorFlowParams {
    fn validate(&self) -> std::result::Result<(), String> {
        if !(self.width > 0.0 && self.width <= 0.5) {
            return Err(format!("width {} must lie in (0, 0.5]", self.width));
        }
        if !(2..=256).contains(&self.nodes) {
            return Err(format!("nodes {} outside 2..=256", self.nodes));
        }
        if let Some(id) = &self.path {
            named_scalar_path(id, self.width).map_err(|e| e.to_string())?;
        }
        Ok(())
    }
}

pub fn divisor(p: &DivisorFlowParams, budget: &Budget) -> Result<Outcome> {
    let mut out = Outcome::default();
    let nodes = budget.nodes(p.nodes);
    if let Some(id) = &p.path {
        let path = named_scalar_path(id, p.width)?;
        let flow = path_flow(&path, nodes)?;
        let (expect, prov, src) = match path.name.as_str() {
            "unwinding" => (-2.0, Provenance::ClosedForm, "phase-unwinding path"),
            "linear" => (0.0, Provenance::ClosedForm, "linear interpolation"),
            _ => (0.0, Provenance::Exact, "constant path"),
        };
        out.push(Check::real_abs(&format!("{id}: integral of v_eta"), flow.integral, expect, 1e-6, prov, src));
        return Ok(out.route("boundary"));
    }
    let f = path_flow(&named_scalar_path("unwinding", p.width)?, nodes)?;
    out.push(Check::real_abs(
        "unwinding: integral of v_eta",
        f.integral,
        -2.0,
        1e-6,
        Provenance::ClosedForm,
        "phase-unwinding path",
    ));
    let g = path_flow(&named_scalar_path("linear", p.width)?, nodes)?;
    out.push(Check::real_abs(
        "linear: integral of v_eta",
        g.integral,
        0.0,
        1e-6,
        Provenance::ClosedForm,
        "linear interpolation",
    ));
    let h = path_flow(&named_scalar_path("unwinding", p.width / 2.0)?, nodes)?;
    out.push(Check::abs(
        "unwinding: halved smoothing width",
        h.integral,
        f.integral,
        1e-6,
        Provenance::Oracle,
        "same path with the default width",
    ));
    if let Some(change) = f.eta_change {
        out.push(Check::abs(
            "unwinding: eta(f_1) - eta(f_0)",
            change,
            f.integral,
            1e-6,
            Provenance::Oracle,
            "integral of v_eta along the invertible path",
        ));
    }
    Ok(out.route("boundary"))
}
