//! Randomized invariant checks. Each sample is one check; the corpus is a pure
//! function of `(seed, samples)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::Params;
use crate::asymptotics::{named_function, NamedFunction, ordinary_integral_rp, regint_rp, ExpansionModel, RegintConfig, Term};
use crate::cli::config::Budget;
use crate::cli::report::{Check, Outcome, Provenance};
use crate::forms::{indices, structure_equation_defect, DerivativeScheme, FormValue, MatrixFamily, MatrixForm};
use crate::partrace::{named_kernel, tr_param, Kernel, SpectralFamily, SpectralModel, TraceConfig};
use crate::quadrature::RadiusLadder;
use crate::{CMat, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropParams {
    pub samples: usize,
    pub seed: u64,
}

impl Default for PropParams {
    fn default() -> Self {
        Self { samples: 16, seed: 0 }
    }
}

impl Params for PropParams {
    fn validate(&self) -> std::result::Result<(), String> {
        if (1..=256).contains(&self.samples) {
            Ok(())
        } else {
            Err(format!("samples = {} outside 1..=256", self.samples))
        }
    }

    fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
    }
}

fn rng(p: &PropParams, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(p.seed);
    r.set_stream(stream);
    r
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CMat {
    CMat::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
    })
}

fn random_point(rng: &mut ChaCha8Rng, p: usize) -> Vec<f64> {
    (0..p).map(|_| rng.random_range(-1.5..1.5)).collect()
}

/// `Σ_I Σ_t C_{I,t} sin(b_t·x + c_t) dx_I` with analytic partials.
fn trig_form(rng: &mut ChaCha8Rng, p: usize, rank: usize, degree: usize) -> MatrixForm {
    let waves: Vec<(Vec<f64>, f64)> = (0..2)
        .map(|_| ((0..p).map(|_| rng.random_range(-2.0..2.0)).collect(), rng.random_range(0.0..2.0 * PI)))
        .collect();
    let coeffs: Vec<(u32, Vec<CMat>)> = (0u32..1 << p)
        .filter(|m| m.count_ones() as usize == degree)
        .map(|m| (m, waves.iter().map(|_| random_matrix(rng, rank, 1.0)).collect()))
        .collect();
    let phase = |w: &(Vec<f64>, f64), x: &[f64]| w.0.iter().zip(x).map(|(b, v)| b * v).sum::<f64>() + w.1;
    let (w1, c1) = (waves.clone(), coeffs.clone());
    let value = move |x: &[f64]| {
        let mut v = FormValue::zero(p, rank, degree);
        for (m, cs) in &c1 {
            let mut a = CMat::zeros(rank, rank);
            for (w, c) in w1.iter().zip(cs) {
                a += c * Complex64::new(phase(w, x).sin(), 0.0);
            }
            v.set(&indices(*m), a);
        }
        Ok(v)
    };
    let partials = move |x: &[f64]| {
        Ok((0..p)
            .map(|i| {
                let mut v = FormValue::zero(p, rank, degree);
                for (m, cs) in &coeffs {
                    let mut a = CMat::zeros(rank, rank);
                    for (w, c) in waves.iter().zip(cs) {
                        a += c * Complex64::new(phase(w, x).cos() * w.0[i], 0.0);
                    }
                    v.set(&indices(*m), a);
                }
                v
            })
            .collect())
    };
    MatrixForm::new(p, rank, degree, value).with_partials(partials)
}

fn zero_check(name: String, defect: f64, tol: f64, source: &str) -> Check {
    Check::real_abs(&name, Complex64::new(defect, 0.0), 0.0, tol, Provenance::Exact, source)
}

pub fn d_squared(p: &PropParams, _budget: &Budget) -> Result<Outcome> {
    let mut rng = rng(p, 1);
    let mut out = Outcome::default();
    for i in 0..p.samples {
        let dim = rng.random_range(2..=4usize);
        let degree = rng.random_range(0..dim - 1);
        let w = trig_form(&mut rng, dim, 2, degree);
        let x = random_point(&mut rng, dim);
        let dd = w
            .exterior_derivative(DerivativeScheme::Analytic)?
            .exterior_derivative(DerivativeScheme::FiniteDifference(Some(1e-3)))?;
        let v = dd.eval(&x)?.max_abs();
        out.push(zero_check(format!("sample {i}: p={dim} q={degree}"), v, 1e-6, "d d = 0"));
    }
    Ok(out.route("finite-difference"))
}

pub fn leibniz(p: &PropParams, _budget: &Budget) -> Result<Outcome> {
    let mut rng = rng(p, 2);
    let mut out = Outcome::default();
    for i in 0..p.samples {
        let dim = rng.random_range(2..=4usize);
        let qa = rng.random_range(0..dim);
        let qb = rng.random_range(0..dim - qa);
        let a = trig_form(&mut rng, dim, 2, qa);
        let b = trig_form(&mut rng, dim, 2, qb);
        let x = random_point(&mut rng, dim);
        let an = DerivativeScheme::Analytic;
        let lhs = a.wedge(&b)?.exterior_derivative(an)?.eval(&x)?;
        let sign = if qa % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = a
            .exterior_derivative(an)?
            .wedge(&b)?
            .add(&a.wedge(&b.exterior_derivative(an)?)?.scale(Complex64::new(sign, 0.0)))?
            .eval(&x)?;
        let v = lhs.add(&rhs.scale(Complex64::new(-1.0, 0.0)))?.max_abs();
        out.push(zero_check(
            format!("sample {i}: p={dim} |a|={qa} |b|={qb}"),
            v,
            1e-10,
            "d(a^b) = da^b + (-1)^|a| a^db",
        ));
    }
    Ok(out.route("analytic"))
}

pub fn structure(p: &PropParams, _budget: &Budget) -> Result<Outcome> {
    let mut rng = rng(p, 3);
    let mut out = Outcome::default();
    for i in 0..p.samples {
        let dim = rng.random_range(2..=4usize);
        let rank = rng.random_range(1..=3usize);
        let ms: Vec<CMat> = (0..dim).map(|_| random_matrix(&mut rng, rank, 0.3)).collect();
        let cs: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        let base = random_matrix(&mut rng, rank, 0.2) + CMat::identity(rank, rank) * Complex64::new(2.0, 0.5);
        let (m1, c1) = (ms.clone(), cs.clone());
        let f = MatrixFamily::new(dim, rank, move |x| {
            let mut a = base.clone();
            for ((m, c), v) in m1.iter().zip(&c1).zip(x) {
                a += m * Complex64::new((v + c).sin(), 0.0);
            }
            Ok(a)
        })
        .with_partials(move |x| {
            Ok(ms
                .iter()
                .zip(&cs)
                .zip(x)
                .map(|((m, c), v)| m * Complex64::new((v + c).cos(), 0.0))
                .collect())
        });
        let x = random_point(&mut rng, dim);
        let v = structure_equation_defect(&f, &x, DerivativeScheme::FiniteDifference(Some(1e-3)))?;
        out.push(zero_check(
            format!("sample {i}: p={dim} rank={rank}"),
            v,
            1e-6,
            "d(f^-1 df) + (f^-1 df)^2 = 0",
        ));
    }
    Ok(out.route("finite-difference"))
}

/// Largest residual after removing the least-squares polynomial of degree `deg` in `t`.
fn polynomial_residual(t: &[f64], v: &[Complex64], deg: i32) -> Result<f64> {
    if deg < 0 {
        return Ok(v.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let n = deg as usize + 1;
    let a = DMatrix::from_fn(t.len(), n, |r, c| Complex64::new(t[r].powi(c as i32), 0.0));
    let b = DMatrix::from_column_slice(t.len(), 1, v);
    let coef = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidInput(format!("polynomial projection: {e}")))?;
    Ok((a * coef - b).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

const KERNEL_POOL: [(&str, f64); 6] = [
    ("resolvent(1)", -2.0),
    ("resolvent(2)", -4.0),
    ("eta_kernel(1)", -1.0),
    ("eta_kernel(2)", -3.0),
    ("weighted_eta(2)", -1.0),
    ("mu_sq_resolvent", 0.0),
];

struct LineSample {
    fam: SpectralFamily,
    kernel: crate::partrace::KernelExpr,
    dir: usize,
    points: Vec<Vec<f64>>,
    t: Vec<f64>,
    label: String,
}

fn line_sample(rng: &mut ChaCha8Rng, count: usize) -> Result<LineSample> {
    let (id, order) = KERNEL_POOL[rng.random_range(0..KERNEL_POOL.len())];
    let dim = rng.random_range(1..=3usize);
    let a = rng.random_range(0.05..0.95);
    let kernel = named_kernel(id, dim)?;
    let fam = SpectralFamily::new(SpectralModel::circle(a)?, Kernel::Expr(kernel.clone()), order)?;
    let mut u: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let n = u.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
    u.iter_mut().for_each(|v| *v /= n);
    // Start at |μ0| = 1.5 and move away from the origin.
    let mut mu0: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let m = mu0.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
    mu0.iter_mut().for_each(|v| *v *= 1.5 / m);
    if mu0.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>() < 0.0 {
        u.iter_mut().for_each(|v| *v = -*v);
    }
    let t: Vec<f64> = (0..count).map(|j| 0.4 * j as f64).collect();
    let points = t
        .iter()
        .map(|s| mu0.iter().zip(&u).map(|(m, d)| m + s * d).collect())
        .collect();
    Ok(LineSample {
        fam,
        kernel,
        dir: rng.random_range(0..dim),
        points,
        t,
        label: format!("{id} p={dim} a={a:.3}"),
    })
}

pub fn tr_derivative(p: &PropParams, budget: &Budget) -> Result<Outcome> {
    let mut rng = rng(p, 4);
    let tcfg = budget.trace(TraceConfig::default());
    let mut out = Outcome::default();
    let h = 1e-2;
    for i in 0..p.samples {
        let s = line_sample(&mut rng, 6)?;
        let dfam = s.fam.with_kernel(Kernel::Expr(s.kernel.derivative(s.dir)?), s.fam.order - 1.0)?;
        let mut diffs = Vec::new();
        let mut scale: f64 = 1.0;
        let mut amb = -1;
        for mu in &s.points {
            let mut at = |off: f64| -> Result<Complex64> {
                let mut m = mu.clone();
                m[s.dir] += off;
                let tv = tr_param(&s.fam, &m, &tcfg)?;
                amb = amb.max(tv.ambiguity_degree);
                Ok(tv.value)
            };
            let fd = (at(-2.0 * h)? - at(2.0 * h)? + 8.0 * (at(h)? - at(-h)?)) / (12.0 * h);
            let exact = tr_param(&dfam, mu, &tcfg)?.value;
            scale = scale.max(exact.norm());
            diffs.push(exact - fd);
        }
        let r = polynomial_residual(&s.t, &diffs, amb - 1)?;
        out.push(zero_check(
            format!("sample {i}: d_{} on {}", s.dir, s.label),
            r / scale,
            1e-6,
            "TR(d A) - d TR(A) is a polynomial of degree < ambiguity degree",
        ));
    }
    Ok(out.route("eigenvalue-sum"))
}

pub fn mu_multiplication(p: &PropParams, budget: &Budget) -> Result<Outcome> {
    let mut rng = rng(p, 5);
    let tcfg = budget.trace(TraceConfig::default());
    let mut out = Outcome::default();
    for i in 0..p.samples {
        let s = line_sample(&mut rng, 8)?;
        let mfam = s.fam.with_kernel(Kernel::Expr(s.kernel.times_mu(s.dir)?), s.fam.order + 1.0)?;
        let mut diffs = Vec::new();
        let mut scale: f64 = 1.0;
        let mut deg = -1;
        for mu in &s.points {
            let a = tr_param(&s.fam, mu, &tcfg)?;
            let b = tr_param(&mfam, mu, &tcfg)?;
            deg = deg.max(b.ambiguity_degree).max(a.ambiguity_degree + 1);
            scale = scale.max(b.value.norm());
            diffs.push(b.value - a.value * mu[s.dir]);
        }
        let r = polynomial_residual(&s.t, &diffs, deg)?;
        out.push(zero_check(
            format!("sample {i}: mu_{} on {}", s.dir, s.label),
            r / scale,
            1e-9,
            "TR(mu A) - mu TR(A) is a polynomial of degree <= ambiguity degree",
        ));
    }
    Ok(out.route("eigenvalue-sum"))
}

/// Union of two models at infinity; terms below the larger remainder are absorbed.
fn merge_models(a: &ExpansionModel, b: &ExpansionModel) -> Result<ExpansionModel> {
    let rem = a.remainder.max(b.remainder);
    let mut terms: Vec<Term> = Vec::new();
    for t in a.terms.iter().chain(&b.terms).filter(|t| t.degree > rem) {
        match terms.iter_mut().find(|u| u.degree == t.degree) {
            Some(u) => u.log_power = u.log_power.max(t.log_power),
            None => terms.push(*t),
        }
    }
    terms.sort_by(|x, y| y.degree.total_cmp(&x.degree));
    ExpansionModel::at_infinity(terms, rem)
}

/// A pool function with its model extended to remainder degree -12.
fn random_function(rng: &mut ChaCha8Rng, p: usize) -> Result<(NamedFunction, ExpansionModel)> {
    if rng.random_bool(0.3) {
        let f = named_function("lorentzian", p)?;
        Ok((f, ExpansionModel::powers(&[-2.0, -4.0, -6.0, -8.0, -10.0], -12.0)?))
    } else {
        let alpha = (rng.random_range(-3.0..2.0f64) * 8.0).round() / 8.0 + 0.0625;
        let f = named_function(&format!("cutoff_power({alpha}, {})", rng.random_range(0..=1u32)), p)?;
        // exact beyond the cutoff
        let m = ExpansionModel::at_infinity(f.model.terms.clone(), -12.0)?;
        Ok((f, m))
    }
}

pub fn linearity(p: &PropParams, budget: &Budget) -> Result<Outcome> {
    let mut rng = rng(p, 6);
    let cfg = budget.regint(RegintConfig::default().with_ladder(RadiusLadder::new(8.0, 1024.0, 24)));
    let mut out = Outcome::default();
    for i in 0..p.samples {
        let dim = rng.random_range(1..=3usize);
        let (f, fm) = random_function(&mut rng, dim)?;
        let (g, gm) = random_function(&mut rng, dim)?;
        let (ca, cb) = (
            Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
            Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
        );
        let rf = regint_rp(&|x: &[f64]| (f.f)(x), dim, &fm, &cfg)?.value;
        let rg = regint_rp(&|x: &[f64]| (g.f)(x), dim, &gm, &cfg)?.value;
        let merged = merge_models(&fm, &gm)?;
        let combo = regint_rp(&|x: &[f64]| ca * (f.f)(x) + cb * (g.f)(x), dim, &merged, &cfg)?.value;
        let rhs = ca * rf + cb * rg;
        out.push(Check::abs(
            &format!("sample {i}: p={dim} {} + {}", f.id, g.id),
            combo,
            rhs,
            1e-7 * (1.0 + rhs.norm()),
            Provenance::Oracle,
            "linear combination of the separate regularized integrals",
        ));
    }
    Ok(out.route("regularized-integral"))
}

pub fn convergent(p: &PropParams, budget: &Budget) -> Result<Outcome> {
    let mut rng = rng(p, 7);
    let cfg = budget.regint(RegintConfig::default().with_ladder(RadiusLadder::new(16.0, 65536.0, 24)));
    let mut out = Outcome::default();
    for i in 0..p.samples {
        let dim = rng.random_range(1..=3usize);
        let half = dim as f64 / 2.0;
        let s = rng.random_range(half + 0.6..half + 2.5);
        let f = move |x: &[f64]| Complex64::new((1.0 + x.iter().map(|v| v * v).sum::<f64>()).powf(-s), 0.0);
        let d = -2.0 * s;
        let model = ExpansionModel::powers(&[d, d - 2.0, d - 4.0, d - 6.0], d - 8.0)?;
        let reg = regint_rp(&f, dim, &model, &cfg)?.value;
        let plain = ordinary_integral_rp(&f, dim, &cfg)?;
        let exact = PI.powf(half) * gamma(s - half) / gamma(s);
        out.push(Check::real_rel(
            &format!("sample {i}: p={dim} s={s:.4} regularized"),
            reg,
            exact,
            1e-7,
            Provenance::ClosedForm,
            "pi^(p/2) Gamma(s - p/2) / Gamma(s)",
        ));
        out.push(Check::rel(
            &format!("sample {i}: p={dim} s={s:.4} ordinary"),
            plain,
            reg,
            1e-7,
            Provenance::Oracle,
            "ordinary quadrature",
        ));
    }
    Ok(out.route("regularized-integral"))
}
