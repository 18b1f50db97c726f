use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{ExpansionModel, Term};
use crate::quadrature::RadiusLadder;
use crate::sphere::{SphereResolution, SphereRule};
use crate::{Error, Result};

/// A complex-valued function on `ℝ^p`. Evaluations must be pure so they can be
/// issued concurrently.
pub trait Integrand: Sync {
    fn eval(&self, x: &[f64]) -> Result<Complex64>;
}

impl<F> Integrand for F
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    fn eval(&self, x: &[f64]) -> Result<Complex64> {
        Ok(self(x))
    }
}

/// Adapter for evaluators that can fail.
pub struct Fallible<F>(pub F);

impl<F> Integrand for Fallible<F>
where
    F: Fn(&[f64]) -> Result<Complex64> + Sync,
{
    fn eval(&self, x: &[f64]) -> Result<Complex64> {
        (self.0)(x)
    }
}

pub(crate) fn checked(f: &dyn Integrand, x: &[f64]) -> Result<Complex64> {
    let v = f.eval(x)?;
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { at: x.to_vec() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub residual_threshold: f64,
    pub condition_guard: f64,
    /// Fits whose largest (row-scaled) absolute residual stays below this
    /// count as valid whatever their relative residual.
    #[serde(default = "default_floor")]
    pub absolute_floor: f64,
}

fn default_floor() -> f64 {
    1e-12
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            residual_threshold: 1e-6,
            condition_guard: 1e10,
            absolute_floor: default_floor(),
        }
    }
}

fn basis_value(t: &Term, r: f64) -> f64 {
    let lr = r.ln();
    r.powf(t.degree) * lr.powi(t.log_power as i32)
}

fn term_label(t: &Term) -> String {
    match t.log_power {
        0 => format!("r^{}", t.degree),
        1 => format!("r^{} log r", t.degree),
        l => format!("r^{} log^{} r", t.degree, l),
    }
}

/// Least-squares fit of samples `y(r_i)` against `{r^deg log^l r}`.
#[derive(Debug, Clone)]
pub(crate) struct LadderFit {
    pub coefficients: Vec<Complex64>,
    pub residual: f64,
    pub absolute_residual: f64,
    pub condition: f64,
}

/// Rows are scaled by the largest basis magnitude at that radius and columns
/// to unit norm before the SVD; the condition guard applies to that matrix.
pub(crate) fn fit_ladder(
    radii: &[f64],
    samples: &[Complex64],
    basis: &[Term],
    cfg: &FitConfig,
) -> Result<LadderFit> {
    let n = radii.len();
    let m = basis.len();
    if m == 0 {
        return Ok(LadderFit {
            coefficients: vec![],
            residual: 0.0,
            absolute_residual: 0.0,
            condition: 1.0,
        });
    }
    let mut a = DMatrix::<f64>::zeros(n, m);
    let mut rhs = DMatrix::<f64>::zeros(n, 2);
    for (i, &r) in radii.iter().enumerate() {
        let row: Vec<f64> = basis.iter().map(|t| basis_value(t, r)).collect();
        let scale = row.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
        for (j, v) in row.iter().enumerate() {
            a[(i, j)] = v / scale;
        }
        rhs[(i, 0)] = samples[i].re / scale;
        rhs[(i, 1)] = samples[i].im / scale;
    }
    let col_norms: Vec<f64> = (0..m)
        .map(|j| a.column(j).norm().max(f64::MIN_POSITIVE))
        .collect();
    for (j, c) in col_norms.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / c);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > cfg.condition_guard {
        let (mut bi, mut bj, mut best) = (0, 1.min(m - 1), -1.0);
        for i in 0..m {
            for j in i + 1..m {
                let c = a.column(i).dot(&a.column(j)).abs();
                if c > best {
                    best = c;
                    bi = i;
                    bj = j;
                }
            }
        }
        return Err(Error::IllConditioned {
            condition,
            first: term_label(&basis[bi]),
            second: term_label(&basis[bj]),
        });
    }
    let sol = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::InvalidInput(format!("least squares: {e}")))?;
    let fitted = &a * &sol;
    let mut max_res = 0.0f64;
    let mut max_val = 0.0f64;
    for i in 0..n {
        let dr = fitted[(i, 0)] - rhs[(i, 0)];
        let di = fitted[(i, 1)] - rhs[(i, 1)];
        max_res = max_res.max(dr.hypot(di));
        max_val = max_val.max(rhs[(i, 0)].hypot(rhs[(i, 1)]));
    }
    let residual = if max_res > 0.0 { max_res / max_val } else { 0.0 };
    let coefficients = (0..m)
        .map(|j| Complex64::new(sol[(j, 0)], sol[(j, 1)]) / col_norms[j])
        .collect();
    Ok(LadderFit {
        coefficients,
        residual,
        absolute_residual: max_res,
        condition,
    })
}

/// Fitted coefficients of a log-polyhomogeneous function, per sample direction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FittedExpansion {
    pub model: ExpansionModel,
    /// Basis functions `r^deg log^l r`, in model order.
    pub basis: Vec<Term>,
    pub radii: Vec<f64>,
    /// Unit direction vectors (empty vectors for radial or tabulated data).
    pub directions: Vec<Vec<f64>>,
    /// Quadrature weights attached to the directions (sphere measure).
    pub weights: Vec<f64>,
    /// `coefficients[b][d]`: coefficient of basis `b` in direction `d`.
    pub coefficients: Vec<Vec<Complex64>>,
    /// `samples[d][i]`: raw sample at `radii[i]` in direction `d`.
    pub samples: Vec<Vec<Complex64>>,
    pub residual: f64,
    pub absolute_residual: f64,
    pub condition: f64,
    pub threshold: f64,
    pub absolute_floor: f64,
}

impl FittedExpansion {
    pub fn is_valid(&self) -> bool {
        self.residual <= self.threshold || self.absolute_residual <= self.absolute_floor
    }

    pub fn ensure_valid(&self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::FitResidual {
                residual: self.residual,
                threshold: self.threshold,
            })
        }
    }

    /// Angular samples of the coefficient of `r^degree log^log_power r`.
    pub fn coefficient(&self, degree: f64, log_power: u32) -> Option<&[Complex64]> {
        self.basis
            .iter()
            .position(|t| (t.degree - degree).abs() < 1e-9 && t.log_power == log_power)
            .map(|i| self.coefficients[i].as_slice())
    }

    pub fn require(&self, degree: f64, log_power: u32) -> Result<&[Complex64]> {
        self.coefficient(degree, log_power)
            .ok_or(Error::MissingCoefficient { degree, log_power })
    }

    /// `∫_{S^{p-1}} g̃(ξ) h(ξ) dvol` for the coefficient `g̃` of the given term.
    pub fn sphere_integral<H: Fn(&[f64]) -> Complex64>(
        &self,
        degree: f64,
        log_power: u32,
        h: H,
    ) -> Result<Complex64> {
        let c = self.require(degree, log_power)?;
        Ok(c.iter()
            .zip(&self.directions)
            .zip(&self.weights)
            .map(|((c, d), w)| c * h(d) * *w)
            .sum())
    }
}

pub(crate) fn fit_samples(
    model: &ExpansionModel,
    radii: Vec<f64>,
    directions: Vec<Vec<f64>>,
    weights: Vec<f64>,
    samples: Vec<Vec<Complex64>>,
    cfg: &FitConfig,
) -> Result<FittedExpansion> {
    model.validate()?;
    let basis = model.basis();
    if radii.len() < 2 * basis.len().max(1) {
        return Err(Error::LadderTooShort {
            radii: radii.len(),
            terms: basis.len(),
        });
    }
    let fits: Vec<LadderFit> = samples
        .iter()
        .map(|s| fit_ladder(&radii, s, &basis, cfg))
        .collect::<Result<_>>()?;
    let residual = fits.iter().fold(0.0f64, |m, f| m.max(f.residual));
    let absolute_residual = fits.iter().fold(0.0f64, |m, f| m.max(f.absolute_residual));
    let condition = fits.iter().fold(1.0f64, |m, f| m.max(f.condition));
    let coefficients = (0..basis.len())
        .map(|b| fits.iter().map(|f| f.coefficients[b]).collect())
        .collect();
    Ok(FittedExpansion {
        model: model.clone(),
        basis,
        radii,
        directions,
        weights,
        coefficients,
        samples,
        residual,
        absolute_residual,
        condition,
        threshold: cfg.residual_threshold,
        absolute_floor: cfg.absolute_floor,
    })
}

/// Fit `f(r ω)` against the model for each direction `ω` of a sphere rule on `S^{p-1}`.
pub fn fit_expansion(
    f: &dyn Integrand,
    p: usize,
    model: &ExpansionModel,
    ladder: &RadiusLadder,
    sphere: SphereResolution,
    cfg: &FitConfig,
) -> Result<FittedExpansion> {
    if p == 0 {
        return Err(Error::InvalidInput("cone dimension must be positive".into()));
    }
    ladder.validate()?;
    let radii = ladder.radii();
    let rule = SphereRule::new(p - 1, sphere);
    let samples: Vec<Vec<Complex64>> = rule
        .points
        .par_iter()
        .map(|d| {
            radii
                .iter()
                .map(|&r| {
                    let x: Vec<f64> = d.iter().map(|v| r * v).collect();
                    super::fit::checked(f, &x)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    fit_samples(model, radii, rule.points, rule.weights, samples, cfg)
}

/// Fit a function of a single positive variable (radial profile or half-line).
pub fn fit_radial<G: Fn(f64) -> Result<Complex64> + Sync>(
    g: G,
    model: &ExpansionModel,
    radii: &[f64],
    cfg: &FitConfig,
) -> Result<FittedExpansion> {
    let samples: Vec<Complex64> = radii
        .par_iter()
        .map(|&r| {
            let v = g(r)?;
            if v.re.is_finite() && v.im.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite { at: vec![r] })
            }
        })
        .collect::<Result<_>>()?;
    fit_samples(model, radii.to_vec(), vec![vec![]], vec![1.0], vec![samples], cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::sphere_volume;

    #[test]
    fn exact_inverse_square_in_three_dimensions() {
        let f = |x: &[f64]| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            Complex64::new(1.0 / r2, 0.0)
        };
        let model = ExpansionModel::powers(&[-2.0], -3.0).unwrap();
        let fit = fit_expansion(
            &f,
            3,
            &model,
            &RadiusLadder::default(),
            SphereResolution::new(4, 8),
            &FitConfig::default(),
        )
        .unwrap();
        assert!(fit.residual < 1e-12);
        for c in fit.coefficient(-2.0, 0).unwrap() {
            assert!((c - 1.0).norm() < 1e-12);
        }
        let total = fit.sphere_integral(-2.0, 0, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!((total.re - sphere_volume(2)).abs() < 1e-10);
    }

    #[test]
    fn log_term_on_the_line() {
        let f = |x: &[f64]| {
            let r = x[0].abs();
            Complex64::new(r.ln() / r + 1.0 / (r * r), 0.0)
        };
        let model =
            ExpansionModel::at_infinity(vec![Term::new(-1.0, 1), Term::new(-2.0, 0)], -3.0).unwrap();
        let fit = fit_expansion(
            &f,
            1,
            &model,
            &RadiusLadder::default(),
            SphereResolution::default(),
            &FitConfig::default(),
        )
        .unwrap();
        for d in 0..2 {
            assert!((fit.coefficient(-1.0, 1).unwrap()[d] - 1.0).norm() < 1e-10);
            assert!(fit.coefficient(-1.0, 0).unwrap()[d].norm() < 1e-10);
            assert!((fit.coefficient(-2.0, 0).unwrap()[d] - 1.0).norm() < 1e-10);
        }
    }

    #[test]
    fn nearly_equal_degrees_are_rejected_by_name() {
        let f = |x: &[f64]| Complex64::new(1.0 / x[0].abs(), 0.0);
        let model = ExpansionModel::powers(&[-1.0, -1.0 - 1e-12], -3.0).unwrap();
        let err = fit_expansion(
            &f,
            1,
            &model,
            &RadiusLadder::default(),
            SphereResolution::default(),
            &FitConfig::default(),
        )
        .unwrap_err();
        match err {
            Error::IllConditioned { first, second, .. } => {
                assert_eq!(first, "r^-1");
                assert!(second.starts_with("r^-1.0000"));
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn short_ladder_and_nan_are_errors() {
        let f = |x: &[f64]| Complex64::new(1.0 / x[0].abs(), 0.0);
        let model = ExpansionModel::powers(&[-1.0, -2.0], -3.0).unwrap();
        let short = RadiusLadder::new(4.0, 64.0, 3);
        assert!(matches!(
            fit_expansion(&f, 1, &model, &short, SphereResolution::default(), &FitConfig::default()),
            Err(Error::LadderTooShort { .. })
        ));
        let g = |_: &[f64]| Complex64::new(f64::NAN, 0.0);
        assert!(matches!(
            fit_expansion(&g, 1, &model, &RadiusLadder::default(), SphereResolution::default(), &FitConfig::default()),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn misspecified_model_is_flagged_invalid() {
        let f = |x: &[f64]| Complex64::new(x[0].abs().powf(-0.5), 0.0);
        let model = ExpansionModel::powers(&[-1.0, -2.0], -3.0).unwrap();
        let fit = fit_expansion(
            &f,
            1,
            &model,
            &RadiusLadder::default(),
            SphereResolution::default(),
            &FitConfig::default(),
        )
        .unwrap();
        assert!(!fit.is_valid());
        assert!(fit.ensure_valid().is_err());
    }
}
