//! Acceptance suite: one PASS/FAIL line per criterion. Reference values are
//! computed here, independently of the library routes under test.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use etaforge::asymptotics::{
    cov_correction, named_function, ordinary_integral_rp, regint_halfline, regint_rp, stokes_defect, ExpansionModel,
    Fallible, HalflineConfig, RegintConfig, Term,
};
use etaforge::clifford::CliffordRep;
use etaforge::cutoff::chi;
use etaforge::eta::{
    additivity_defect, boundary_model, eta1_additivity, eta_k, eta_suspension, eta_variation, named_scalar_path,
    unwinding_path, path_flow, spectral_eta, winding, PathFamily, SpectralEtaMethod,
};
use etaforge::forms::{
    affine_clifford, clifford_cone, default_s3_resolution, maurer_cartan_power, moebius_family, named_family,
    sphere_integrate, trace_density, MatrixFamily,
};
use etaforge::partrace::{l2_trace, named_kernel, Kernel, SpectralFamily, SpectralModel, TraceConfig};
use etaforge::quadrature::RadiusLadder;
use etaforge::sphere::SphereResolution;
use etaforge::{CMat, Complex64, Result};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

/// One comparison inside a criterion.
struct Item {
    label: String,
    deviation: f64,
    tolerance: f64,
}

fn abs(label: &str, value: Complex64, reference: Complex64, tolerance: f64) -> Item {
    Item {
        label: label.into(),
        deviation: (value - reference).norm(),
        tolerance,
    }
}

fn real(label: &str, value: Complex64, reference: f64, tolerance: f64) -> Item {
    abs(label, value, Complex64::new(reference, 0.0), tolerance)
}

fn rel(label: &str, value: Complex64, reference: f64, tolerance: f64) -> Item {
    Item {
        label: label.into(),
        deviation: (value - reference).norm() / reference.abs(),
        tolerance,
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn line_cfg() -> RegintConfig {
    RegintConfig::default().with_ladder(RadiusLadder::new(16.0, 65536.0, 24))
}

fn moebius_model() -> ExpansionModel {
    ExpansionModel::powers(&[-2.0, -4.0, -6.0, -8.0], -10.0).unwrap()
}

fn affine_model() -> ExpansionModel {
    ExpansionModel::powers(&[-4.0, -6.0, -8.0, -10.0], -12.0).unwrap()
}

fn unit_clifford_models() -> (ExpansionModel, ExpansionModel) {
    let d: Vec<f64> = (4..=11).map(|d| -(d as f64)).collect();
    let t: Vec<f64> = (2..=9).map(|d| -(d as f64)).collect();
    let theta = boundary_model(&ExpansionModel::powers(&t, -10.0).unwrap(), 3).unwrap();
    (ExpansionModel::powers(&d, -12.0).unwrap(), theta)
}

fn clifford() -> Result<Vec<Item>> {
    let mut out = Vec::new();
    for k in 1..=5usize {
        let rep = CliffordRep::standard(k)?;
        let n = rep.rank;
        let id = CMat::identity(n, n);
        let mut skew: f64 = 0.0;
        let mut anti: f64 = 0.0;
        for (i, e) in rep.generators.iter().enumerate() {
            skew = skew.max((e + e.adjoint()).norm());
            for (j, f) in rep.generators.iter().enumerate() {
                let target = if i == j { &id * c(-2.0) } else { CMat::zeros(n, n) };
                anti = anti.max((e * f + f * e - target).norm());
            }
        }
        let prod = rep.generators.iter().fold(id.clone(), |acc, e| acc * e);
        let i_k = Complex64::i().powi(k as i32);
        out.push(real(&format!("k={k} skew"), c(skew), 0.0, 1e-12));
        out.push(real(&format!("k={k} anticommutation"), c(anti), 0.0, 1e-12));
        out.push(real(&format!("k={k} volume element"), c((&prod * i_k - &id).norm()), 0.0, 1e-12));
        let expect = c((1u64 << (k - 1)) as f64) / i_k;
        out.push(abs(&format!("k={k} tr(E_1...E_p)"), prod.trace(), expect, 1e-12));
    }
    Ok(out)
}

fn sphere() -> Result<Vec<Item>> {
    let f = clifford_cone(&CliffordRep::standard(2)?);
    let mc = maurer_cartan_power(&f, 3)?;
    let s = sphere_integrate(&mc.trace, default_s3_resolution())?;
    Ok(vec![rel("S^3 integral", s.value, -24.0 * PI * PI, 1e-6)])
}

fn full_space() -> Result<Vec<Item>> {
    let rep = CliffordRep::standard(2)?;
    let mut out = Vec::new();
    for a in [1.0, -1.0] {
        let f = affine_clifford(a, &rep);
        let density = Fallible(|x: &[f64]| trace_density(&f, x));
        let expect = -a * 12.0 * PI * PI;
        let v = regint_rp(&density, 3, &affine_model(), &line_cfg())?.value;
        out.push(rel(&format!("a={a} regularized"), v, expect, 1e-4));
        let plain = ordinary_integral_rp(&density, 3, &line_cfg())?;
        out.push(rel(&format!("a={a} plain quadrature"), plain, expect, 1e-4));
    }
    Ok(out)
}

fn axioms() -> Result<Vec<Item>> {
    let mut out = Vec::new();
    let halfline = |id: &str| -> Result<Complex64> {
        let nf = named_function(id, 1)?;
        let cfg = HalflineConfig {
            ladder_at_infinity: nf.ladder,
            ladder_at_zero: nf.ladder_at_zero,
            ..Default::default()
        };
        let zero = nf.model_at_zero.clone().expect("half-line function");
        Ok(regint_halfline(|x| Ok((nf.f)(&[x])), &zero, &nf.model, &cfg)?.value)
    };
    for (alpha, l) in [(-1.5, 0), (-1.0, 1), (0.5, 2)] {
        let v = halfline(&format!("power_log({alpha}, {l})"))?;
        out.push(real(&format!("x^{alpha} log^{l}"), v, 0.0, 1e-8));
    }
    // Antiderivative log(x/(1+x)): finite part at infinity is its limit, at zero
    // the log x term is dropped, leaving -log(1+x) -> 0.
    let (big, small) = (1e12f64, 1e-12f64);
    let oracle = (big / (1.0 + big)).ln() + (1.0 + small).ln();
    out.push(real("1/(x(1+x))", halfline("inv_x_one_plus_x")?, oracle, 1e-8));

    let poly = |x: &[f64]| {
        let y = if x.len() > 1 { x[1] } else { 0.3 };
        c(2.0 - x[0] + 3.0 * x[0] * x[0] * y - y * y * y + 0.5 * x[0] * y)
    };
    for p in [1usize, 2, 3] {
        let model = ExpansionModel::powers(&[3.0, 2.0, 1.0, 0.0], -(p as f64) - 1.0)?;
        let cfg = RegintConfig::default()
            .with_ladder(RadiusLadder::new(4.0, 4096.0, 24))
            .with_sphere(SphereResolution::new(8, 16));
        out.push(real(&format!("polynomial on R^{p}"), regint_rp(&poly, p, &model, &cfg)?.value, 0.0, 1e-8));
    }
    Ok(out)
}

fn change_of_variables() -> Result<Vec<Item>> {
    let mut out = Vec::new();
    let f1 = |x: &[f64]| c(chi(x[0].abs()) / x[0].abs());
    let m1 = ExpansionModel::at_infinity(vec![Term::new(-1.0, 0)], -6.0)?;
    for a in [1.0, 2.0] {
        let (chk, corr) = cov_correction(&f1, 1, &m1, &DMatrix::from_element(1, 1, a), &RegintConfig::default())?;
        out.push(abs(&format!("A={a} on R"), chk.lhs, chk.rhs, 1e-6));
        // -(1/2) ∫_{S^0} log|A^{-1}ξ| with |A^{-1}ξ| = 1/A at both points
        out.push(real(&format!("A={a} log correction"), corr, a.ln(), 1e-10));
    }
    let f3 = |x: &[f64]| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        c(chi(r) * r.powi(-3))
    };
    let m3 = ExpansionModel::at_infinity(vec![Term::new(-3.0, 0)], -8.0)?;
    let cfg = RegintConfig::default().with_sphere(SphereResolution::new(24, 48));
    let a = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0, 1.0]));
    let (chk, _) = cov_correction(&f3, 3, &m3, &a, &cfg)?;
    out.push(abs("A=diag(2,1,1) on R^3", chk.lhs, chk.rhs, 1e-6));
    Ok(out)
}

fn stokes() -> Result<Vec<Item>> {
    let mut out = Vec::new();
    let m0 = ExpansionModel::at_infinity(vec![Term::new(0.0, 0)], -6.0)?;
    let compact = |x: &[f64]| c((1.0 - chi(x[0].abs())) * x[0]);
    let chk = stokes_defect(&compact, None, 1, 0, &m0, &RegintConfig::default())?;
    out.push(abs("compact support", chk.lhs, chk.rhs, 1e-6));
    out.push(real("compact support rhs", chk.rhs, 0.0, 1e-6));
    let sign = |x: &[f64]| c(chi(x[0].abs()) * x[0].signum());
    let chk = stokes_defect(&sign, None, 1, 0, &m0, &RegintConfig::default())?;
    out.push(abs("sign on R", chk.lhs, chk.rhs, 1e-6));
    out.push(real("sign on R rhs", chk.rhs, 2.0, 1e-6));
    let coord = |x: &[f64]| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        c(chi(r) * x[0] / r.powi(3))
    };
    let m = ExpansionModel::at_infinity(vec![Term::new(-2.0, 0)], -7.0)?;
    let cfg = RegintConfig::default().with_sphere(SphereResolution::new(12, 24));
    let chk = stokes_defect(&coord, None, 3, 0, &m, &cfg)?;
    out.push(abs("x_1/|x|^3 on R^3", chk.lhs, chk.rhs, 1e-6));
    // ∫_{S^2} ξ_1² = |S^2|/3
    out.push(real("x_1/|x|^3 rhs", chk.rhs, 4.0 * PI / 3.0, 1e-6));
    Ok(out)
}

/// `Σ_{n∈ℤ} ((n+½)²+μ²)^{-1}` by direct summation plus an Euler–Maclaurin tail.
fn brute_resolvent_sum(mu: f64) -> f64 {
    let n = 200_000usize;
    let f = |x: f64| 1.0 / (x * x + mu * mu);
    let head: f64 = (0..n).rev().map(|j| f(j as f64 + 0.5)).sum();
    // midpoint rule: Σ_{j≥N} f(j+½) = ∫_N^∞ f + f'(N)/24 - 7 f'''(N)/5760 + ...
    let x = n as f64;
    let integral = (PI / 2.0 - (x / mu).atan()) / mu;
    let d1 = -2.0 * x / (x * x + mu * mu).powi(2);
    2.0 * (head + integral - d1 / 24.0)
}

fn trace_identity() -> Result<Vec<Item>> {
    let fam = SpectralFamily::new(
        SpectralModel::circle(0.5)?,
        Kernel::Expr(named_kernel("resolvent(1)", 1)?),
        -2.0,
    )?;
    let mut out = Vec::new();
    for mu in [0.5, 1.0, 5.0] {
        let oracle = brute_resolvent_sum(mu);
        let v = l2_trace(&fam, &[mu], &TraceConfig::default())?.value;
        out.push(rel(&format!("mu={mu} vs partial sums"), v, oracle, 1e-8));
        out.push(rel(&format!("mu={mu} vs (pi/mu) tanh(pi mu)"), v, PI / mu * (PI * mu).tanh(), 1e-8));
    }
    Ok(out)
}

fn spectral() -> Result<Vec<Item>> {
    let mut out = Vec::new();
    let model = ExpansionModel::empty(-8.0);
    let cfg = RegintConfig::default().with_ladder(RadiusLadder::new(8.0, 512.0, 12));
    let tcfg = TraceConfig::default();
    let m = SpectralModel::circle(0.25)?;
    let v = spectral_eta(&m, SpectralEtaMethod::Regint { k: 2 }, &model, &cfg, &tcfg)?.value;
    out.push(real("regint k=2 a=1/4", v, 0.5, 1e-3));
    for a in [0.1, 0.25, 0.4] {
        // ζ_H(0, q) = 1/2 - q
        let oracle = (0.5 - a) - (0.5 - (1.0 - a));
        let v = spectral_eta(&SpectralModel::circle(a)?, SpectralEtaMethod::Hurwitz, &model, &cfg, &tcfg)?.value;
        out.push(real(&format!("hurwitz a={a}"), v, oracle, 1e-12));
    }
    Ok(out)
}

fn suspension() -> Result<Vec<Item>> {
    let m = SpectralModel::circle(0.25)?;
    let cfg = RegintConfig::default().with_ladder(RadiusLadder::new(8.0, 512.0, 12));
    let v = eta_suspension(&m, 2, 1.0, &ExpansionModel::empty(-8.0), &cfg, &TraceConfig::default())?.value;
    Ok(vec![real("eta_2(D + c(mu)), a=1/4", v, -0.5, 5e-3)])
}

fn winding_numbers() -> Result<Vec<Item>> {
    let e = eta_k(&moebius_family(1.0, 1), 1, &moebius_model(), &line_cfg())?;
    // (1/πi) ∫ 2i/(1+x²) dx by residues
    let mut out = vec![real("eta_1((x-i)/(x+i))", e.value, 2.0, 1e-8)];
    let w = winding(&clifford_cone(&CliffordRep::standard(2)?), 2, default_s3_resolution())?;
    out.push(real("S^3 winding of x0 + c(x')", w.value, -1.0, 1e-6));
    Ok(out)
}

fn variation() -> Result<Vec<Item>> {
    let mut out = Vec::new();
    let theta1 = boundary_model(&ExpansionModel::powers(&[-1.0, -3.0, -5.0, -7.0], -9.0)?, 1)?;
    let path = PathFamily::new(1, 1, |s| Ok(moebius_family(s, 1)));
    let chk = eta_variation(&path, 1, 0.75, &moebius_model(), &theta1, &line_cfg())?;
    out.push(abs("moebius homotopy", chk.lhs, chk.rhs, 1e-4));

    let path = unwinding_path(0.05).to_path_family().with_step(1e-3);
    let empty = ExpansionModel::empty(-8.0);
    let mut cfg = RegintConfig::default().with_ladder(RadiusLadder::new(4.0, 64.0, 8));
    cfg.radial_nodes = 48;
    let chk = eta_variation(&path, 1, 0.5, &empty, &boundary_model(&empty, 1)?, &cfg)?;
    out.push(abs("divisor path", chk.lhs, chk.rhs, 1e-4));

    let rep = CliffordRep::standard(2)?;
    let path = PathFamily::new(3, rep.rank, move |s| {
        let r = rep.clone();
        let n = r.rank;
        Ok(MatrixFamily::new(3, n, move |x| {
            let jb = (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt();
            Ok(CMat::identity(n, n) + r.action(x)? * c(s / jb))
        }))
    });
    let (density, theta) = unit_clifford_models();
    let chk = eta_variation(&path, 2, 0.8, &density, &theta, &line_cfg())?;
    out.push(abs("1 + s c(x)/<x>", chk.lhs, chk.rhs, 1e-4));
    Ok(out)
}

fn additivity() -> Result<Vec<Item>> {
    let mut out = Vec::new();
    for (a, b) in [("moebius", "scaled_moebius(2)"), ("moebius_power(2)", "moebius_power(-3)")] {
        let chk = eta1_additivity(&named_family(a)?, &named_family(b)?, &moebius_model(), &line_cfg())?;
        out.push(abs(&format!("eta_1 {a} * {b}"), chk.lhs, chk.rhs, 1e-6));
    }
    let a = named_family("unit_clifford(2)")?;
    let (cs, sn) = (0.7f64.cos(), 0.7f64.sin());
    let b = a.rotated(&DMatrix::from_row_slice(3, 3, &[cs, -sn, 0.0, sn, cs, 0.0, 0.0, 0.0, 1.0]))?;
    let (density, theta) = unit_clifford_models();
    let chk = additivity_defect(&a, &b, &density, &theta, &line_cfg())?;
    out.push(abs("eta_2 defect", chk.lhs, chk.rhs, 1e-4));
    Ok(out)
}

fn divisor() -> Result<Vec<Item>> {
    let f = path_flow(&named_scalar_path("unwinding", 0.05)?, 16)?;
    let g = path_flow(&named_scalar_path("linear", 0.05)?, 16)?;
    let h = path_flow(&named_scalar_path("unwinding", 0.025)?, 16)?;
    Ok(vec![
        real("unwinding path", f.integral, -2.0, 1e-6),
        real("linear path", g.integral, 0.0, 1e-6),
        abs("halved width", h.integral, f.integral, 1e-6),
    ])
}

type Criterion = (usize, &'static str, fn() -> Result<Vec<Item>>);

const CRITERIA: [Criterion; 13] = [
    (1, "Clifford identities", clifford),
    (2, "sphere integral", sphere),
    (3, "full-space integral", full_space),
    (4, "regularized-integral axioms", axioms),
    (5, "change of variables", change_of_variables),
    (6, "Stokes defect", stokes),
    (7, "trace identity", trace_identity),
    (8, "spectral eta", spectral),
    (9, "suspension", suspension),
    (10, "winding numbers", winding_numbers),
    (11, "variation formula", variation),
    (12, "additivity and defect", additivity),
    (13, "divisor flow", divisor),
];

fn main() -> ExitCode {
    let results: Vec<(Result<Vec<Item>>, f64)> = CRITERIA
        .par_iter()
        .map(|(_, _, f)| {
            let t = Instant::now();
            (f(), t.elapsed().as_secs_f64())
        })
        .collect();
    let mut failed = 0;
    for ((n, name, _), (res, secs)) in CRITERIA.iter().zip(results) {
        match res {
            Ok(items) => {
                let ok = items.iter().all(|i| i.deviation <= i.tolerance);
                let worst = items
                    .iter()
                    .max_by(|a, b| (a.deviation / a.tolerance).total_cmp(&(b.deviation / b.tolerance)))
                    .expect("criteria have items");
                println!(
                    "{} {n:>2} {name:<28} worst: {} dev {:.2e} tol {:.0e} ({secs:.1} s)",
                    if ok { "PASS" } else { "FAIL" },
                    worst.label,
                    worst.deviation,
                    worst.tolerance
                );
                for i in items.iter().filter(|i| i.deviation > i.tolerance) {
                    println!("       {}: dev {:.3e} > tol {:.0e}", i.label, i.deviation, i.tolerance);
                }
                failed += usize::from(!ok);
            }
            Err(e) => {
                println!("FAIL {n:>2} {name:<28} error: {e}");
                failed += 1;
            }
        }
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
