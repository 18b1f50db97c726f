use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{checked, fit_radial, FitConfig, FittedExpansion, Integrand};
use super::model::ExpansionModel;
use crate::quadrature::{radial_panel_edges, GaussLegendre, RadiusLadder};
use crate::sphere::{sphere_volume, SphereResolution, SphereRule};
use crate::{Error, Result};

/// Ball quadrature and LIM-extraction settings for `⨍_{ℝ^p}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegintConfig {
    pub ladder: RadiusLadder,
    pub sphere: SphereResolution,
    /// Gauss–Legendre nodes per radial panel.
    pub radial_nodes: usize,
    pub fit: FitConfig,
}

impl Default for RegintConfig {
    fn default() -> Self {
        Self {
            ladder: RadiusLadder::default(),
            sphere: SphereResolution::default(),
            radial_nodes: 24,
            fit: FitConfig::default(),
        }
    }
}

impl RegintConfig {
    pub fn with_ladder(mut self, ladder: RadiusLadder) -> Self {
        self.ladder = ladder;
        self
    }

    pub fn with_sphere(mut self, sphere: SphereResolution) -> Self {
        self.sphere = sphere;
        self
    }
}

/// A regularized integral together with the fit it was extracted from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegularizedValue {
    pub value: Complex64,
    /// `-1` when the value is unambiguous; `d ≥ 0` when it is only defined
    /// modulo polynomials of degree `d`.
    pub ambiguity_degree: i32,
    /// Fits used for the LIM extraction (one per endpoint).
    pub diagnostics: Vec<FittedExpansion>,
}

impl RegularizedValue {
    pub fn residual(&self) -> f64 {
        self.diagnostics.iter().fold(0.0, |m, d| m.max(d.residual))
    }
}

/// Sum of `values` over panels with a fixed left-to-right order.
fn cumulative(panels: &[Complex64]) -> Vec<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    panels
        .iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

/// Radial integrals `∫_{e_i}^{e_{i+1}} g(r) dr` for consecutive edges.
pub(crate) fn panel_integrals<G>(edges: &[f64], nodes: usize, g: G) -> Result<Vec<Complex64>>
where
    G: Fn(f64) -> Result<Complex64> + Sync,
{
    let gl = GaussLegendre::new(nodes);
    edges
        .par_windows(2)
        .map(|w| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (r, wt) in gl.on_interval(w[0], w[1]) {
                acc += g(r)? * wt;
            }
            Ok(acc)
        })
        .collect()
}

/// `I(R) = ∫_{|x| ≤ R} f` at every radius of the ladder.
pub fn ball_integrals(
    f: &dyn Integrand,
    p: usize,
    radii: &[f64],
    cfg: &RegintConfig,
) -> Result<Vec<Complex64>> {
    if p == 0 {
        return Err(Error::InvalidInput("cone dimension must be positive".into()));
    }
    let rule = SphereRule::new(p - 1, cfg.sphere);
    let shell = |r: f64| -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut x = vec![0.0; p];
        for (d, w) in rule.points.iter().zip(&rule.weights) {
            for (xi, di) in x.iter_mut().zip(d) {
                *xi = r * di;
            }
            acc += checked(f, &x)? * *w;
        }
        Ok(acc * r.powi(p as i32 - 1))
    };
    let edges = radial_panel_edges(radii);
    let panels = panel_integrals(&edges, cfg.radial_nodes, shell)?;
    Ok(pick_at(&edges, &cumulative(&panels), radii))
}

fn pick_at(edges: &[f64], cum: &[Complex64], radii: &[f64]) -> Vec<Complex64> {
    radii
        .iter()
        .map(|&r| {
            let i = edges
                .iter()
                .position(|&e| e == r)
                .expect("ladder radii are panel edges");
            if i == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                cum[i - 1]
            }
        })
        .collect()
}

fn extract_constant(fit: FittedExpansion) -> Result<RegularizedValue> {
    fit.ensure_valid()?;
    let value = fit
        .coefficient(0.0, 0)
        .map(|c| c[0])
        .ok_or(Error::MissingCoefficient {
            degree: 0.0,
            log_power: 0,
        })?;
    Ok(RegularizedValue {
        value,
        ambiguity_degree: -1,
        diagnostics: vec![fit],
    })
}

/// Fit already computed primitive samples `I(R_i)` and return their constant term.
pub fn regint_from_primitive(
    radii: &[f64],
    samples: &[Complex64],
    primitive_model: &ExpansionModel,
    fit: &FitConfig,
) -> Result<RegularizedValue> {
    if radii.len() != samples.len() {
        return Err(Error::DimensionMismatch {
            expected: radii.len(),
            got: samples.len(),
        });
    }
    let fitted = fit_radial(
        |r| {
            let i = radii.iter().position(|&x| x == r).unwrap();
            Ok(samples[i])
        },
        primitive_model,
        radii,
        fit,
    )?;
    extract_constant(fitted)
}

/// `⨍_{ℝ^p} f`: constant term of the fitted expansion of `∫_{|x|≤R} f`.
///
/// The model describes `f` at infinity and must list every term of degree `≥ -p`.
pub fn regint_rp(
    f: &dyn Integrand,
    p: usize,
    model: &ExpansionModel,
    cfg: &RegintConfig,
) -> Result<RegularizedValue> {
    cfg.ladder.validate()?;
    let prim = model.primitive(p)?;
    let radii = cfg.ladder.radii();
    if radii.len() < 2 * prim.basis_len() {
        return Err(Error::LadderTooShort {
            radii: radii.len(),
            terms: prim.basis_len(),
        });
    }
    let samples = ball_integrals(f, p, &radii, cfg)?;
    regint_from_primitive(&radii, &samples, &prim, &cfg.fit)
}

/// `⨍_{ℝ^p} g(|x|) dx = |S^{p-1}| ⨍_0^∞ g(r) r^{p-1} dr` (LIM at infinity only).
pub fn regint_radial<G>(g: G, p: usize, model: &ExpansionModel, cfg: &RegintConfig) -> Result<RegularizedValue>
where
    G: Fn(f64) -> Result<Complex64> + Sync,
{
    if p == 0 {
        return Err(Error::InvalidInput("cone dimension must be positive".into()));
    }
    cfg.ladder.validate()?;
    let prim = model.primitive(p)?;
    let radii = cfg.ladder.radii();
    let vol = sphere_volume(p - 1);
    let edges = radial_panel_edges(&radii);
    let panels = panel_integrals(&edges, cfg.radial_nodes, |r| {
        let v = g(r)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { at: vec![r] });
        }
        Ok(v * r.powi(p as i32 - 1) * vol)
    })?;
    let samples = pick_at(&edges, &cumulative(&panels), &radii);
    regint_from_primitive(&radii, &samples, &prim, &cfg.fit)
}

/// Ordinary `∫_{ℝ^p} f` for absolutely integrable `f`, by doubling radial panels
/// continued until the panel contributions are negligible.
pub fn ordinary_integral_rp(f: &dyn Integrand, p: usize, cfg: &RegintConfig) -> Result<Complex64> {
    if p == 0 {
        return Err(Error::InvalidInput("cone dimension must be positive".into()));
    }
    let rule = SphereRule::new(p - 1, cfg.sphere);
    let shell = |r: f64| -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut x = vec![0.0; p];
        for (d, w) in rule.points.iter().zip(&rule.weights) {
            for (xi, di) in x.iter_mut().zip(d) {
                *xi = r * di;
            }
            acc += checked(f, &x)? * *w;
        }
        Ok(acc * r.powi(p as i32 - 1))
    };
    let inner: Vec<f64> = (0..=16).map(|i| i as f64 / 16.0).collect();
    let mut total: Complex64 = panel_integrals(&inner, cfg.radial_nodes, shell)?.iter().sum();
    let mut lo = 1.0;
    let mut last = Complex64::new(0.0, 0.0);
    // Blocks of 8 doubling panels keep the parallel work coarse.
    for _ in 0..64 {
        let edges: Vec<f64> = (0..=8).map(|i| lo * 2f64.powi(i)).collect();
        let panels = panel_integrals(&edges, cfg.radial_nodes, shell)?;
        for v in &panels {
            total += v;
        }
        last = panels[7];
        lo = edges[8];
        if last.norm() <= 1e-17 * total.norm().max(1e-300) {
            // Geometric tail estimate from the last two panels.
            let q = last.norm() / panels[6].norm().max(1e-300);
            if q < 1.0 {
                total += last * (q / (1.0 - q));
            }
            return Ok(total);
        }
    }
    Err(Error::QuadratureNonconvergence {
        difference: last.norm(),
    })
}
