use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::{Kernel, KernelTerm};
use super::spectral::{SpectralFamily, SpectralModel};
use crate::special::lattice_tails;
use crate::{Error, Result};

const CHUNK: usize = 4096;

/// Summation controls for eigenvalue sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig {
    /// Smallest direct-summation window `L` (eigenvalues with `|λ| ≤ L`).
    pub min_window: f64,
    /// The window is at least this multiple of `|μ|`.
    pub window_factor: f64,
    /// Required `tail_estimate / |value|`.
    pub tail_tolerance: f64,
    /// Escalation stops with an error beyond this window.
    pub max_window: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            min_window: 64.0,
            window_factor: 2.0,
            tail_tolerance: 1e-10,
            max_window: 4_194_304.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceValue {
    pub value: Complex64,
    /// Degree of the subtracted Taylor polynomial (`-1` for trace-class values).
    pub ambiguity_degree: i32,
    pub window: f64,
    pub tail_estimate: f64,
}

fn check(v: Complex64, lambda: f64, mu: &[f64]) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        let mut at = vec![lambda];
        at.extend_from_slice(mu);
        Err(Error::NonFinite { at })
    }
}

/// `F(λ, μ) - T_d F(λ, μ)` for one eigenvalue.
fn remainder(kernel: &Kernel, lambda: f64, mu: &[f64], d: i32) -> Result<Complex64> {
    let v = match kernel {
        Kernel::Expr(e) => e.terms.iter().map(|t| t.remainder(lambda, mu, d)).sum(),
        Kernel::Custom { f, .. } => match d {
            -1 => f(lambda, mu),
            0 => f(lambda, mu) - f(lambda, &vec![0.0; mu.len()]),
            _ => {
                return Err(Error::DerivativeUnavailable(format!(
                    "closure kernels support Taylor degree 0 only, this family needs degree {d}"
                )))
            }
        },
    };
    check(v, lambda, mu)
}

/// Ordered sum of remainders over a list of eigenvalues, with the sum of moduli.
fn direct_sum(kernel: &Kernel, eigen: &[f64], mu: &[f64], d: i32) -> Result<(Complex64, f64)> {
    let parts: Vec<(Complex64, f64)> = eigen
        .par_chunks(CHUNK)
        .map(|c| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut abs = 0.0;
            for &l in c {
                let v = remainder(kernel, l, mu, d)?;
                acc += v;
                abs += v.norm();
            }
            Ok((acc, abs))
        })
        .collect::<Result<_>>()?;
    Ok(parts
        .into_iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(a, b), (c, d)| (a + c, b + d)))
}

/// Tail `Σ_{|λ| > L} (F - T_d F)(λ, μ)` of one term through its series in `u/λ²`
/// and Hurwitz zeta values; returns the sum and the size of the first omitted term.
fn series_tail(t: &KernelTerm, a: f64, window: f64, mu: &[f64], d: i32) -> Result<(Complex64, f64)> {
    let u: f64 = mu.iter().map(|v| v * v).sum();
    let mut mono = u.powi(t.j as i32);
    for (b, x) in t.beta.iter().zip(mu) {
        mono *= x.powi(*b as i32);
    }
    let base = t.mu_degree() as i32;
    let i0 = if d < base { 0 } else { ((d - base) / 2 + 1) as u32 };
    let k = t.k as f64;
    // binom(-k, i0)
    let mut c = 1.0;
    for i in 0..i0 {
        c *= -(k + i as f64) / (i as f64 + 1.0);
    }
    let mut acc = 0.0;
    let mut last = f64::INFINITY;
    let mut upow = u.powi(i0 as i32);
    let mut i = i0;
    loop {
        let s = 2 * t.k as i32 + 2 * i as i32 - t.e;
        if s < 2 {
            return Err(Error::OrderViolation(format!(
                "eigenvalue sum of λ^{} diverges; declared order too low for Taylor subtraction",
                -s
            )));
        }
        let (pos, neg) = lattice_tails(s, a, window);
        let term = c * upow * (pos + neg);
        acc += term;
        let bound = c.abs() * upow * 2.0 * window.powi(1 - s);
        if u == 0.0 {
            // every later term carries a factor u
            last = 0.0;
            break;
        }
        if bound <= 1e-17 * acc.abs() || bound == 0.0 {
            last = bound;
            break;
        }
        if i > i0 + 600 {
            last = bound;
            break;
        }
        c *= -(k + i as f64) / (i as f64 + 1.0);
        upow *= u;
        i += 1;
        last = last.min(bound);
    }
    Ok((t.coeff * (mono * acc), last * t.coeff.norm() * mono.abs()))
}

/// Parametric trace `TR(A)(μ) = Σ_λ (F - T_{N-1}F)(λ, μ)`, Taylor polynomial at `μ0 = 0`.
pub fn tr_param(fam: &SpectralFamily, mu: &[f64], cfg: &TraceConfig) -> Result<TraceValue> {
    if mu.len() != fam.p() {
        return Err(Error::DimensionMismatch {
            expected: fam.p(),
            got: mu.len(),
        });
    }
    if mu.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { at: mu.to_vec() });
    }
    let d = fam.taylor_degree();
    let mult = fam.multiplicity();
    let a = match &fam.model {
        SpectralModel::Point { eigenvalues } => {
            let (v, _) = direct_sum(&fam.kernel, eigenvalues, mu, d)?;
            return Ok(TraceValue {
                value: v * mult,
                ambiguity_degree: d,
                window: 0.0,
                tail_estimate: 0.0,
            });
        }
        SpectralModel::Circle { a } => *a,
    };
    let norm_mu = mu.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut window = cfg.min_window.max(cfg.window_factor * norm_mu).max(2.0 * norm_mu);
    let mut previous: Option<Complex64> = None;
    loop {
        let eigen = fam.model.eigenvalues_within(window);
        let (head, abs) = direct_sum(&fam.kernel, &eigen, mu, d)?;
        let (tail, tail_estimate) = match &fam.kernel {
            Kernel::Expr(e) => {
                let mut t = Complex64::new(0.0, 0.0);
                let mut est = 0.0;
                for term in &e.terms {
                    let (v, r) = series_tail(term, a, window, mu, d)?;
                    t += v;
                    est += r;
                }
                (t, est)
            }
            // Without a series, the change against the previous window stands in for the tail.
            Kernel::Custom { .. } => (
                Complex64::new(0.0, 0.0),
                previous.map_or(f64::INFINITY, |p| (p - head).norm()),
            ),
        };
        let value = head + tail;
        if tail_estimate <= cfg.tail_tolerance * value.norm() + 1e-15 * abs {
            return Ok(TraceValue {
                value: value * mult,
                ambiguity_degree: d,
                window,
                tail_estimate: tail_estimate * mult,
            });
        }
        if window * 4.0 > cfg.max_window {
            return Err(Error::TailNotConverged {
                tail: tail_estimate,
                window: window as usize,
            });
        }
        previous = Some(head);
        window *= 4.0;
    }
}

/// Ordinary trace of a trace-class `A(μ)`.
pub fn l2_trace(fam: &SpectralFamily, mu: &[f64], cfg: &TraceConfig) -> Result<TraceValue> {
    if !fam.is_trace_class() {
        return Err(Error::OrderViolation(format!(
            "order {} with base dimension {} is not trace class",
            fam.order,
            fam.model.dim()
        )));
    }
    tr_param(fam, mu, cfg)
}
