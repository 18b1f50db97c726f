use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fit::{fit_radial, FitConfig};
use super::model::{ExpansionModel, Side};
use super::regint::{panel_integrals, RegularizedValue};
use crate::quadrature::{zero_panel_edges, RadiusLadder};
use crate::{Error, Result};

/// Ladders and quadrature for the partie finie on `(0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalflineConfig {
    pub ladder_at_infinity: RadiusLadder,
    pub ladder_at_zero: RadiusLadder,
    pub radial_nodes: usize,
    pub fit: FitConfig,
}

impl Default for HalflineConfig {
    fn default() -> Self {
        Self {
            ladder_at_infinity: RadiusLadder::default(),
            ladder_at_zero: RadiusLadder::default_at_zero(),
            radial_nodes: 24,
            fit: FitConfig::default(),
        }
    }
}

fn finite(v: Complex64, x: f64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { at: vec![x] })
    }
}

/// `LIM_{a→0} ∫_a^1 f + LIM_{b→∞} ∫_1^b f`.
///
/// `model_at_zero` describes `f` near the origin (ascending degrees, remainder
/// `> -1`), `model_at_infinity` near infinity (remainder `< -1`).
pub fn regint_halfline<F>(
    f: F,
    model_at_zero: &ExpansionModel,
    model_at_infinity: &ExpansionModel,
    cfg: &HalflineConfig,
) -> Result<RegularizedValue>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    if model_at_zero.side != Side::Zero || model_at_infinity.side != Side::Infinity {
        return Err(Error::InvalidInput(
            "half-line models must be declared at zero and at infinity respectively".into(),
        ));
    }
    cfg.ladder_at_infinity.validate()?;
    cfg.ladder_at_zero.validate()?;
    let g = |x: f64| finite(f(x)?, x);

    // Upper end: J(b) = ∫_1^b f.
    let big = cfg.ladder_at_infinity.radii();
    if big[0] <= 1.0 {
        return Err(Error::InvalidInput("ladder at infinity must start above 1".into()));
    }
    let mut edges = vec![1.0];
    for &b in &big {
        while b > 2.0 * edges.last().unwrap() {
            let next = 2.0 * edges.last().unwrap();
            edges.push(next);
        }
        edges.push(b);
    }
    let panels = panel_integrals(&edges, cfg.radial_nodes, g)?;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut upper = Vec::with_capacity(big.len());
    for (i, v) in panels.iter().enumerate() {
        acc += v;
        if big.contains(&edges[i + 1]) {
            upper.push(acc);
        }
    }
    let prim_inf = model_at_infinity.primitive(1)?;
    let fit_inf = fit_radial(
        |b| Ok(upper[big.iter().position(|&x| x == b).unwrap()]),
        &prim_inf,
        &big,
        &cfg.fit,
    )?;
    fit_inf.ensure_valid()?;

    // Lower end: K(a) = ∫_a^1 f, summed from 1 downward.
    let small = cfg.ladder_at_zero.radii();
    if *small.last().unwrap() >= 1.0 {
        return Err(Error::InvalidInput("ladder at zero must end below 1".into()));
    }
    let zedges = zero_panel_edges(&small);
    let zpanels = panel_integrals(&zedges, cfg.radial_nodes, g)?;
    let mut lower_all = vec![Complex64::new(0.0, 0.0); zedges.len()];
    for i in (0..zpanels.len()).rev() {
        lower_all[i] = lower_all[i + 1] + zpanels[i];
    }
    let lower: Vec<Complex64> = small
        .iter()
        .map(|a| lower_all[zedges.iter().position(|e| e == a).unwrap()])
        .collect();
    let prim_zero = model_at_zero.primitive(1)?;
    let fit_zero = fit_radial(
        |a| Ok(lower[small.iter().position(|&x| x == a).unwrap()]),
        &prim_zero,
        &small,
        &cfg.fit,
    )?;
    fit_zero.ensure_valid()?;

    let c_inf = fit_inf.require(0.0, 0)?[0];
    let c_zero = fit_zero.require(0.0, 0)?[0];
    Ok(RegularizedValue {
        value: c_inf + c_zero,
        ambiguity_degree: -1,
        diagnostics: vec![fit_zero, fit_inf],
    })
}

/// `⨍_0^∞ x^{s-1} f(x) dx` for real `s`; the models describe the product `x^{s-1} f`.
pub fn mellin_reg<F>(
    f: F,
    s: f64,
    model_at_zero: &ExpansionModel,
    model_at_infinity: &ExpansionModel,
    cfg: &HalflineConfig,
) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    if !s.is_finite() {
        return Err(Error::InvalidInput("Mellin variable must be finite".into()));
    }
    regint_halfline(
        |x| Ok(f(x)? * x.powf(s - 1.0)),
        model_at_zero,
        model_at_infinity,
        cfg,
    )
    .map(|v| v.value)
}
